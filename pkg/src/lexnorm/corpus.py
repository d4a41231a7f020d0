"""Word-aligned normalization corpora.

File format: UTF-8 text, one ``RAW<TAB>NORM`` line per token, a blank line
between sentences (the final blank line may be omitted).  The norm column
encodes 1-to-N normalizations with single spaces ("im" -> "i am") and N-to-1
merges with an empty norm on the continuation tokens ("wan na" -> "wanna",
where "na" carries an empty norm).  Case and all code points are preserved
exactly; nothing is unicode-normalized on ingest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, TextIO


class CorpusError(ValueError):
    """Malformed corpus data.  ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedLine(CorpusError):
    """A non-blank line does not have exactly two tab-separated fields."""


class EmptyRawToken(CorpusError):
    """The raw column is empty."""


class LeadingMergeContinuation(CorpusError):
    """A sentence starts with an empty norm, which has nothing to merge into."""


class InvalidField(CorpusError):
    """A raw or norm field violates its shape constraints."""


def _is_canonical_spacing(s: str) -> bool:
    return s == " ".join(s.split())


@dataclass(frozen=True)
class AnnotatedToken:
    """One raw token with its gold normalization.

    ``norm`` may be empty (this token was merged into the one before it) or
    contain single spaces (the token normalizes to several words).
    """

    raw: str
    norm: str

    def __post_init__(self):
        if not self.raw:
            raise EmptyRawToken("empty raw token")
        if any(ch.isspace() for ch in self.raw):
            raise InvalidField(f"raw token contains whitespace: {self.raw!r}")
        if not _is_canonical_spacing(self.norm):
            raise InvalidField(
                f"norm must be single-space separated with no surrounding "
                f"whitespace: {self.norm!r}"
            )


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[AnnotatedToken, ...]
    lang: str
    sid: int

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise CorpusError("sentence has no tokens")
        if not self.tokens[0].norm:
            raise LeadingMergeContinuation(
                "first token of a sentence has an empty norm"
            )

    def raw_tokens(self) -> list[str]:
        return [t.raw for t in self.tokens]


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    lang: str
    source_path: str = field(default="<string>", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for s in self.sentences:
            if s.lang != self.lang:
                raise CorpusError(
                    f"sentence {s.sid} has language {s.lang!r}, corpus is {self.lang!r}"
                )

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


@dataclass(frozen=True)
class SentencePair:
    """The machine-translation view of one sentence: raw text in, clean text out."""

    lang: str
    src: str
    tgt: str
    sid: int

    def __post_init__(self):
        for name in ("src", "tgt"):
            value = getattr(self, name)
            if not _is_canonical_spacing(value):
                raise InvalidField(f"{name} is not single-space separated: {value!r}")


def parse_corpus(text: str, lang: str, source_path: str = "<string>") -> Corpus:
    """Parse the tab-separated word-aligned format into a Corpus.

    Raises MalformedLine / EmptyRawToken / LeadingMergeContinuation /
    InvalidField with 1-based line numbers.  Trailing blank lines are ignored.
    """
    sentences: list[Sentence] = []
    pending: list[AnnotatedToken] = []
    pending_start = 0

    def flush():
        nonlocal pending
        if pending:
            try:
                sentences.append(Sentence(tuple(pending), lang, len(sentences)))
            except LeadingMergeContinuation:
                raise LeadingMergeContinuation(
                    "first token of a sentence has an empty norm", line=pending_start
                ) from None
            pending = []

    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            flush()
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise MalformedLine(
                f"expected RAW<TAB>NORM, got {len(fields)} field(s)", line=lineno
            )
        raw, norm = fields
        try:
            token = AnnotatedToken(raw, norm)
        except EmptyRawToken:
            raise EmptyRawToken("empty raw token", line=lineno) from None
        except InvalidField as e:
            raise InvalidField(str(e), line=lineno) from None
        if not pending:
            pending_start = lineno
        pending.append(token)
    flush()
    return Corpus(tuple(sentences), lang, source_path)


def serialize_corpus(corpus: Corpus) -> str:
    """Render a corpus in canonical form: one blank line between sentences,
    trailing newline, no trailing blank line.  Empty corpus -> empty string."""
    blocks = [
        "\n".join(f"{t.raw}\t{t.norm}" for t in sentence.tokens)
        for sentence in corpus.sentences
    ]
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def load_corpus(path: str, lang: str) -> Corpus:
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f.read(), lang, source_path=path)


def gold_word_assignments(sentence: Sentence) -> list[str]:
    """Per-token gold normalization strings; merged-away tokens yield ""."""
    return [t.norm for t in sentence.tokens]


def join_assignments(assignments: Iterable[str]) -> str:
    """Join per-token assignment strings into a sentence, dropping empties."""
    return " ".join(a for a in assignments if a)


def to_sentence_pairs(corpus: Corpus) -> list[SentencePair]:
    """One (noisy, normalized) string pair per sentence, in corpus order."""
    pairs = []
    for sentence in corpus.sentences:
        src = " ".join(t.raw for t in sentence.tokens)
        tgt = join_assignments(t.norm for t in sentence.tokens)
        pairs.append(SentencePair(sentence.lang, src, tgt, sentence.sid))
    return pairs


def write_sentence_pairs(pairs: Iterable[SentencePair], out: TextIO) -> None:
    """One JSON object per line with fields lang, sid, src, tgt."""
    for p in pairs:
        record = {"lang": p.lang, "sid": p.sid, "src": p.src, "tgt": p.tgt}
        out.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_sentence_pairs(inp: TextIO) -> list[SentencePair]:
    pairs = []
    for lineno, line in enumerate(inp, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            pairs.append(
                SentencePair(record["lang"], record["src"], record["tgt"], record["sid"])
            )
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise CorpusError(f"bad sentence-pair record: {e}", line=lineno) from None
    return pairs
