"""Project sentence-level normalizer output back onto raw token slots.

A normalized sentence comes back as one string; evaluation needs one
assignment per raw token.  ``align_output`` finds the minimum-cost monotone
segmentation: output words are split into contiguous (possibly empty) spans,
one span per raw token, scored by character edit distance between each token
and its span.  An empty span means the token was merged into the token to its
left, so the first token's span must be non-empty unless the whole output is
empty.
"""

from __future__ import annotations

from dataclasses import dataclass


class EmptyInput(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class AlignConfig:
    #: casefold both sides before costing (social-media casing is noisy)
    fold_case: bool = True
    #: added per empty assignment, to discourage spurious merges on cost ties
    merge_penalty: int = 1

    def __post_init__(self):
        if self.merge_penalty < 0:
            raise ValueError("merge_penalty must be >= 0")


@dataclass(frozen=True)
class Alignment:
    assignments: tuple[str, ...]
    total_cost: int


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert/delete/substitute all cost 1)."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            curr.append(min(prev[j] + 1, curr[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = curr
    return prev[-1]


_INF = (1 << 60, 1 << 60)


def align_output(
    raw_tokens: list[str], output: str, cfg: AlignConfig = AlignConfig()
) -> Alignment:
    """Minimum-cost monotone assignment of output word spans to raw tokens.

    Total cost is the sum of per-token edit distances plus
    ``merge_penalty`` for every empty assignment (an empty span also pays the
    full deletion cost of its token).  Ties are resolved deterministically:
    fewest empty assignments first, then leftmost span boundaries.
    """
    if not raw_tokens:
        raise EmptyInput("raw_tokens is empty")
    words = output.split()
    n, m = len(raw_tokens), len(words)

    fold = (lambda s: s.casefold()) if cfg.fold_case else (lambda s: s)
    ftokens = [fold(t) for t in raw_tokens]
    fwords = [fold(w) for w in words]
    mp = cfg.merge_penalty

    if m == 0:
        # Complete deletion: every token maps to the empty span.
        return Alignment(("",) * n, sum(len(t) + mp for t in ftokens))

    if m == n:
        fast = fast_path_align(raw_tokens, output, cfg)
        if fast.total_cost == 0:
            # A zero-cost assignment is necessarily 1-1 and unique.
            return fast

    # Per-token span costs: span_cost[i][j][j2] = lev(token i, words j..j2).
    # Spans are joined with single spaces before costing.
    span_text = [[""] * (m + 1) for _ in range(m + 1)]
    for j in range(m):
        text = fwords[j]
        span_text[j][j + 1] = text
        for j2 in range(j + 2, m + 1):
            text = text + " " + fwords[j2 - 1]
            span_text[j][j2] = text

    # best[i][j]: minimal (cost, empty-count) assigning words j.. to tokens i..
    best = [[_INF] * (m + 1) for _ in range(n + 1)]
    best[n][m] = (0, 0)
    for i in range(n - 1, -1, -1):
        tok = ftokens[i]
        empty_cost = len(tok) + mp
        for j in range(m, -1, -1):
            acc = _INF
            if i > 0:  # the first token may not be merged leftward
                tail = best[i + 1][j]
                if tail is not _INF:
                    cand = (empty_cost + tail[0], 1 + tail[1])
                    if cand < acc:
                        acc = cand
            for j2 in range(j + 1, m + 1):
                tail = best[i + 1][j2]
                if tail is _INF:
                    continue
                cand = (levenshtein(tok, span_text[j][j2]) + tail[0], tail[1])
                if cand < acc:
                    acc = cand
            best[i][j] = acc

    # Reconstruct, taking the smallest feasible boundary at every step; this
    # yields the lexicographically earliest boundary vector among optima.
    assignments: list[str] = []
    j = 0
    for i in range(n):
        tok = ftokens[i]
        target = best[i][j]
        chosen = None
        if i > 0:
            tail = best[i + 1][j]
            if tail is not _INF and (len(tok) + mp + tail[0], 1 + tail[1]) == target:
                chosen = j
        if chosen is None:
            for j2 in range(j + 1, m + 1):
                tail = best[i + 1][j2]
                if tail is _INF:
                    continue
                if (levenshtein(tok, span_text[j][j2]) + tail[0], tail[1]) == target:
                    chosen = j2
                    break
        assert chosen is not None, "DP reconstruction failed"
        assignments.append(" ".join(words[j:chosen]))
        j = chosen

    return Alignment(tuple(assignments), best[0][0][0])


def fast_path_align(
    raw_tokens: list[str], output: str, cfg: AlignConfig = AlignConfig()
) -> Alignment:
    """Positional 1-1 assignment when word counts already match.

    Only valid as a shortcut when its cost attains the DP minimum (always
    true at cost zero); callers wanting full semantics use ``align_output``.
    """
    words = output.split()
    if len(words) != len(raw_tokens):
        raise LengthMismatch(
            f"{len(raw_tokens)} tokens vs {len(words)} output words"
        )
    if not raw_tokens:
        raise EmptyInput("raw_tokens is empty")
    fold = (lambda s: s.casefold()) if cfg.fold_case else (lambda s: s)
    cost = sum(levenshtein(fold(t), fold(w)) for t, w in zip(raw_tokens, words))
    return Alignment(tuple(words), cost)
