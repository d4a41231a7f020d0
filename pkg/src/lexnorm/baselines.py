"""Reference normalizers: leave-as-is and most-frequent-replacement.

MFR distills the training corpus into a lexicon mapping each raw word to the
normalization it most often received, identity-preferring on count ties so
the baseline never rewrites a word without majority evidence.  Multi-word and
empty normalizations pass through unchanged, so 1-to-N splits and N-to-1
merges that recur word-by-word are covered.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .corpus import Corpus


class LexiconError(ValueError):
    pass


_MISSING = object()


@dataclass
class Lexicon:
    #: raw word -> [(normalization, count), ...] sorted best-first
    entries: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    fold_case: bool = True

    def _key(self, word: str) -> str:
        return word.casefold() if self.fold_case else word

    def head(self, word: str, default=_MISSING):
        """Most frequent normalization for ``word``; ``default`` if unseen."""
        ranked = self.entries.get(self._key(word))
        if not ranked:
            return None if default is _MISSING else default
        return ranked[0][0]

    def __len__(self) -> int:
        return len(self.entries)


def lai(tokens: Sequence[str]) -> list[str]:
    """Leave-as-is: the identity baseline anchoring ERR's denominator."""
    return list(tokens)


def _rank(key: str):
    # Most frequent first; ties prefer the identity normalization, then
    # lexicographic order, making the build order-independent.
    def order(item: tuple[str, int]):
        norm, count = item
        return (-count, norm != key, norm)

    return order


def build_lexicon(train: Corpus, fold_case: bool = True) -> Lexicon:
    counts: dict[str, Counter] = defaultdict(Counter)
    fold = (lambda s: s.casefold()) if fold_case else (lambda s: s)
    for sentence in train.sentences:
        for token in sentence.tokens:
            counts[fold(token.raw)][fold(token.norm)] += 1
    entries = {
        key: sorted(counter.items(), key=_rank(key)) for key, counter in counts.items()
    }
    return Lexicon(entries, fold_case)


def mfr(tokens: Sequence[str], lexicon: Lexicon) -> list[str]:
    """Replace each token by its lexicon head; unseen tokens pass through.

    Outputs may be multi-word or empty strings, usable directly as per-token
    assignments.
    """
    return [lexicon.head(t, default=t) for t in tokens]


def merge_lexicons(lexica: Sequence[Lexicon]) -> Lexicon:
    """Pool counts from several lexica and re-rank.

    All inputs must share the same fold_case policy.
    """
    if not lexica:
        raise LexiconError("merge_lexicons needs at least one lexicon")
    policies = {lex.fold_case for lex in lexica}
    if len(policies) != 1:
        raise LexiconError("cannot merge lexica with different fold_case policies")
    counts: dict[str, Counter] = defaultdict(Counter)
    for lex in lexica:
        for key, ranked in lex.entries.items():
            for norm, count in ranked:
                counts[key][norm] += count
    entries = {
        key: sorted(counter.items(), key=_rank(key)) for key, counter in counts.items()
    }
    return Lexicon(entries, policies.pop())


def dump_lexicon(lexicon: Lexicon, out: TextIO) -> None:
    """``RAW<TAB>NORM<TAB>COUNT`` lines, sorted by raw then rank."""
    for key in sorted(lexicon.entries):
        for norm, count in lexicon.entries[key]:
            out.write(f"{key}\t{norm}\t{count}\n")


def load_lexicon(inp: TextIO, fold_case: bool = True) -> Lexicon:
    """Load a dumped lexicon.  The comparison policy is not stored in the
    file; pass the fold_case the lexicon was built with."""
    counts: dict[str, list[tuple[str, int]]] = defaultdict(list)
    for lineno, line in enumerate(inp, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise LexiconError(
                f"line {lineno}: expected RAW<TAB>NORM<TAB>COUNT, got {line!r}"
            )
        raw, norm, count_text = fields
        try:
            count = int(count_text)
        except ValueError:
            raise LexiconError(f"line {lineno}: bad count {count_text!r}") from None
        if count < 1:
            raise LexiconError(f"line {lineno}: count must be >= 1")
        counts[raw].append((norm, count))
    entries = {key: sorted(ranked, key=_rank(key)) for key, ranked in counts.items()}
    return Lexicon(entries, fold_case)
