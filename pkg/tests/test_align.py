import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexnorm.align import (
    AlignConfig,
    Alignment,
    EmptyInput,
    LengthMismatch,
    align_output,
    fast_path_align,
    levenshtein,
)


def reference_levenshtein(a, b):
    """Full-matrix oracle, kept independent of the two-row implementation."""
    d = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        d[i][0] = i
    for j in range(len(b) + 1):
        d[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return d[-1][-1]


def brute_force_align(tokens, output, fold_case=True, merge_penalty=1):
    """Enumerate every monotone segmentation; return (assignments, cost).

    Applies the same tie rule as the DP: min cost, then fewest empties, then
    lexicographically earliest boundary vector.
    """
    words = output.split()
    fold = (lambda s: s.casefold()) if fold_case else (lambda s: s)
    ftokens = [fold(t) for t in tokens]
    fwords = [fold(w) for w in words]
    n, m = len(tokens), len(words)
    if m == 0:
        return ("",) * n, sum(len(t) + merge_penalty for t in ftokens)
    best = None
    for bounds in itertools.combinations_with_replacement(range(m + 1), n - 1):
        b = (0,) + bounds + (m,)
        if any(b[i] > b[i + 1] for i in range(n)):
            continue
        if b[1] == 0:  # first token may not merge leftward
            continue
        cost = 0
        empties = 0
        for i in range(n):
            span = " ".join(fwords[b[i] : b[i + 1]])
            if span == "":
                cost += len(ftokens[i]) + merge_penalty
                empties += 1
            else:
                cost += reference_levenshtein(ftokens[i], span)
        key = (cost, empties, bounds)
        if best is None or key < best[0]:
            assignments = tuple(
                " ".join(words[b[i] : b[i + 1]]) for i in range(n)
            )
            best = (key, assignments)
    return best[1], best[0][0]


def test_levenshtein_basics():
    assert levenshtein("abc", "abc") == 0
    assert levenshtein("", "abc") == 3
    assert levenshtein("abc", "") == 3
    assert levenshtein("kitten", "sitting") == 3


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="abcd", max_size=8), st.text(alphabet="abcd", max_size=8))
def test_levenshtein_matches_reference_and_is_symmetric(a, b):
    d = levenshtein(a, b)
    assert d == reference_levenshtein(a, b)
    assert d == levenshtein(b, a)
    assert (d == 0) == (a == b)


def test_identity_alignment():
    result = align_output(["a", "b"], "a b")
    assert result.assignments == ("a", "b")
    assert result.total_cost == 0


def test_split_alignment():
    # "i am" vs "im" ties with "i"/"am so" against "i am"/"so"; the leftmost
    # boundary rule resolves it, and brute force agrees.
    result = align_output(["im", "soooo", "happy"], "i am so happy")
    expected = brute_force_align(["im", "soooo", "happy"], "i am so happy")
    assert (result.assignments, result.total_cost) == expected
    assert result.assignments == ("i", "am so", "happy")
    assert result.total_cost == 5


def test_merge_alignment():
    result = align_output(["wan", "na", "go"], "wanna go")
    assert result.assignments == ("wanna", "", "go")
    assert result.total_cost == brute_force_align(["wan", "na", "go"], "wanna go")[1]


def test_empty_output_degenerate_case():
    result = align_output(["ok"], "", AlignConfig(merge_penalty=1))
    assert result.assignments == ("",)
    assert result.total_cost == len("ok") + 1
    several = align_output(["ok", "go"], "  ")
    assert several.assignments == ("", "")


def test_empty_tokens_is_error():
    with pytest.raises(EmptyInput):
        align_output([], "a b")


def test_first_assignment_never_empty_on_nonempty_output():
    # merging the first token leftward is impossible even when cheaper
    result = align_output(["ab", "x"], "x")
    assert result.assignments[0] != ""
    assert result.assignments == ("x", "")


def test_fold_case_costing():
    folded = align_output(["U"], "u")
    assert folded.total_cost == 0
    exact = align_output(["U"], "u", AlignConfig(fold_case=False))
    assert exact.total_cost == 1


def test_merge_penalty_is_charged_per_empty_assignment():
    # ("wanna", "", "go"): lev(wan, wanna)=2, empty slot
    # pays len("na") plus the penalty
    with_penalty = align_output(["wan", "na", "go"], "wanna go")
    assert with_penalty.total_cost == 5
    without = align_output(["wan", "na", "go"], "wanna go", AlignConfig(merge_penalty=0))
    assert without.total_cost == 4
    assert without.assignments == with_penalty.assignments == ("wanna", "", "go")


def test_fast_path_positional():
    assert fast_path_align(["u", "r"], "you are").assignments == ("you", "are")
    assert fast_path_align(["a"], "a") == Alignment(("a",), 0)
    with pytest.raises(LengthMismatch):
        fast_path_align(["a", "b"], "a")


def test_fast_path_agrees_when_it_attains_the_minimum():
    rng = random.Random(99)
    checked = 0
    for _ in range(300):
        n = rng.randint(1, 5)
        tokens = [
            "".join(rng.choice("abcd") for _ in range(rng.randint(1, 4)))
            for _ in range(n)
        ]
        words = [
            "".join(rng.choice("abcd") for _ in range(rng.randint(1, 4)))
            for _ in range(n)
        ]
        fast = fast_path_align(tokens, " ".join(words))
        full = align_output(tokens, " ".join(words))
        if fast.total_cost == full.total_cost:
            assert fast == full
            checked += 1
    assert checked > 50


def test_optimality_against_brute_force():
    rng = random.Random(4321)
    for _ in range(200):
        n = rng.randint(1, 5)
        m = rng.randint(0, 5)
        tokens = [
            "".join(rng.choice("abcd") for _ in range(rng.randint(1, 4)))
            for _ in range(n)
        ]
        output = " ".join(
            "".join(rng.choice("abcd") for _ in range(rng.randint(1, 4)))
            for _ in range(m)
        )
        result = align_output(tokens, output)
        expected_assignments, expected_cost = brute_force_align(tokens, output)
        assert result.total_cost == expected_cost
        assert result.assignments == expected_assignments


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.text(alphabet="abcd", min_size=1, max_size=5), min_size=1, max_size=5),
    st.lists(st.text(alphabet="abcd", min_size=1, max_size=5), min_size=0, max_size=6),
)
def test_property_reconstruction(tokens, words):
    output = " ".join(words)
    result = align_output(tokens, output)
    assert len(result.assignments) == len(tokens)
    assert " ".join(a for a in result.assignments if a) == " ".join(output.split())


def test_cost_monotone_under_identical_extension():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 4)
        tokens = [
            "".join(rng.choice("abc") for _ in range(rng.randint(1, 3)))
            for _ in range(n)
        ]
        words = [
            "".join(rng.choice("abc") for _ in range(rng.randint(1, 3)))
            for _ in range(rng.randint(1, 4))
        ]
        base = align_output(tokens, " ".join(words)).total_cost
        extended = align_output(tokens + ["same"], " ".join(words + ["same"]))
        assert extended.total_cost <= base
