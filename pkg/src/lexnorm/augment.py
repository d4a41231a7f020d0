"""Deterministic spelling-noise channels for synthetic training pairs.

Every sentence gets its own random substream derived from (seed, sentence
index) by SHA-256, so corrupting sentences in parallel or in any order gives
byte-identical output.  The substreams are Mersenne Twister generators used
only through ``random()`` draws, the one stream Python guarantees stable
across versions, so (seed, input) -> output is reproducible everywhere.

Channels operate strictly within a word: they never insert or remove
whitespace and never empty a word, so word counts are preserved and the
corrupted sentence stays alignable 1-1 with the clean one.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Sequence

from .corpus import SentencePair

CHANNEL_NAMES = (
    "char_swap",
    "char_drop",
    "char_dup",
    "keyboard_sub",
    "vowel_drop",
    "case_flip",
    "elongate",
)

# Lowercase QWERTY adjacency (rows staggered, diagonals included).  Characters
# outside the table are simply not valid keyboard_sub positions, which makes
# the channel a no-op on non-Latin scripts.
QWERTY_NEIGHBORS = {
    "q": "wa", "w": "qase", "e": "wsdr", "r": "edft", "t": "rfgy",
    "y": "tghu", "u": "yhji", "i": "ujko", "o": "iklp", "p": "ol",
    "a": "qwsz", "s": "awedxz", "d": "serfcx", "f": "drtgvc",
    "g": "ftyhbv", "h": "gyujnb", "j": "huikmn", "k": "jiolm",
    "l": "kop", "z": "asx", "x": "zsdc", "c": "xdfv", "v": "cfgb",
    "b": "vghn", "n": "bhjm", "m": "njk",
}

_VOWELS = set("aeiou")


@dataclass(frozen=True)
class NoiseSpec:
    #: (channel name, per-word firing probability), applied in order
    channels: tuple[tuple[str, float], ...]
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(tuple(c) for c in self.channels))
        for name, rate in self.channels:
            if name not in CHANNEL_NAMES:
                raise ValueError(f"unknown noise channel {name!r}")
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"rate for {name} out of [0, 1]: {rate}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def parse_channel_spec(text: str) -> tuple[tuple[str, float], ...]:
    """Parse ``"char_drop=0.2,elongate=0.1"`` into channel pairs."""
    channels = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, rate_text = part.partition("=")
        if not sep:
            raise ValueError(f"channel spec {part!r} is not NAME=RATE")
        channels.append((name, float(rate_text)))
    return tuple(channels)


class Stream:
    """Uniform draws backed by a seeded Mersenne Twister.

    Only ``Random.random()`` is consumed, to stay inside Python's
    cross-version reproducibility guarantee.
    """

    def __init__(self, seed_material: bytes):
        digest = hashlib.sha256(seed_material).digest()
        self._rng = random.Random(int.from_bytes(digest[:8], "big"))

    def uniform(self) -> float:
        return self._rng.random()

    def index(self, n: int) -> int:
        return min(int(self._rng.random() * n), n - 1)

    def pick(self, seq: Sequence):
        return seq[self.index(len(seq))]


def substream(seed: int, sid: int) -> Stream:
    return Stream(f"{seed}:{sid}".encode("ascii"))


def _swap(w: str, s: Stream) -> str:
    if len(w) < 2:
        return w
    i = s.index(len(w) - 1)
    return w[:i] + w[i + 1] + w[i] + w[i + 2:]


def _drop(w: str, s: Stream) -> str:
    if len(w) < 2:  # never empty a word
        return w
    i = s.index(len(w))
    return w[:i] + w[i + 1:]


def _dup(w: str, s: Stream) -> str:
    i = s.index(len(w))
    return w[: i + 1] + w[i] + w[i + 1:]


def _keyboard_sub(w: str, s: Stream) -> str:
    positions = [i for i, ch in enumerate(w) if ch.lower() in QWERTY_NEIGHBORS]
    if not positions:
        return w
    i = s.pick(positions)
    neighbor = s.pick(QWERTY_NEIGHBORS[w[i].lower()])
    if w[i].isupper():
        neighbor = neighbor.upper()
    return w[:i] + neighbor + w[i + 1:]


def _vowel_drop(w: str, s: Stream) -> str:
    if len(w) < 2:
        return w
    positions = [i for i, ch in enumerate(w) if ch.lower() in _VOWELS]
    if not positions:
        return w
    i = s.pick(positions)
    return w[:i] + w[i + 1:]


def _case_flip(w: str, s: Stream) -> str:
    positions = [i for i, ch in enumerate(w) if ch.swapcase() != ch]
    if not positions:
        return w
    i = s.pick(positions)
    return w[:i] + w[i].swapcase() + w[i + 1:]


def _elongate(w: str, s: Stream) -> str:
    i = s.index(len(w))
    extra = 2 + s.index(3)  # 2-4 extra copies
    return w[: i + 1] + w[i] * extra + w[i + 1:]


_APPLY = {
    "char_swap": _swap,
    "char_drop": _drop,
    "char_dup": _dup,
    "keyboard_sub": _keyboard_sub,
    "vowel_drop": _vowel_drop,
    "case_flip": _case_flip,
    "elongate": _elongate,
}


def corrupt_word(word: str, spec: NoiseSpec, stream: Stream) -> str:
    """Run every channel in `spec` over one word, each firing with its rate."""
    if not word:
        raise ValueError("cannot corrupt an empty word")
    for name, rate in spec.channels:
        if rate <= 0.0:
            continue
        if stream.uniform() < rate:
            word = _APPLY[name](word, stream)
    return word


def corrupt_corpus(
    clean: Sequence[tuple[str, str]], spec: NoiseSpec
) -> list[SentencePair]:
    """Corrupt (lang, sentence) pairs into (noisy src, clean tgt) pairs.

    The clean side is only whitespace-canonicalized, never corrupted.
    """
    pairs = []
    for sid, (lang, sentence) in enumerate(clean):
        words = sentence.split()
        stream = substream(spec.seed, sid)
        noisy = [corrupt_word(w, spec, stream) for w in words]
        pairs.append(SentencePair(lang, " ".join(noisy), " ".join(words), sid))
    return pairs
