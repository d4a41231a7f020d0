"""Uniform normalizer abstraction plus a remote-inference client.

Every backend takes sentence strings and returns sentence strings, one per
input, in order — the sentence-in/sentence-out contract that lets the same
evaluation pipeline run over the identity baseline, the lexicon baseline,
the toy seq2seq, or a full model served over HTTP.  Projection back to
word level is always the caller's job (see `align`).
"""

from __future__ import annotations

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import requests

from . import seq2seq
from .baselines import Lexicon, mfr

log = logging.getLogger(__name__)


class BackendFailure(Exception):
    """A backend could not produce normalizations; carries detail."""


class UnsupportedLanguage(BackendFailure):
    pass


class Timeout(BackendFailure):
    """No response obtained within the deadline, after all retries."""


class ProtocolError(BackendFailure):
    """The server's reply (or our request, per the server) violates the
    wire schema: bad JSON, missing keys, wrong count, or a 400."""


class ServerError(BackendFailure):
    """5xx passthrough after retries; carries status code and body."""

    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body
        super().__init__(f"server error {status}: {body[:200]}")


class EmptyBatch(ValueError):
    pass


@dataclass(frozen=True)
class Capability:
    name: str
    supports_langs: frozenset | str = "any"  # frozenset of codes, or "any"

    def supports(self, lang: str) -> bool:
        return self.supports_langs == "any" or lang in self.supports_langs


class Normalizer:
    """Interface: a capability descriptor plus batch normalization.

    Implementations must preserve order and count and be safe for
    concurrent calls (all bundled backends are read-only after init).
    """

    capability: Capability

    def normalize_batch(self, lang: str, sentences: Sequence[str]) -> list[str]:
        raise NotImplementedError


def normalize_batch(n: Normalizer, lang: str, sentences: Sequence[str]) -> list[str]:
    """Run a backend with the interface contract enforced.

    Checks language support up front, and on the way out checks the
    count contract and whitespace-normalizes every sentence.
    """
    sentences = list(sentences)
    if not sentences:
        raise EmptyBatch("normalize_batch requires a non-empty sentence list")
    if not n.capability.supports(lang):
        raise UnsupportedLanguage(
            f"backend {n.capability.name!r} does not support language {lang!r}"
        )
    out = n.normalize_batch(lang, sentences)
    if len(out) != len(sentences):
        raise BackendFailure(
            f"backend {n.capability.name!r} returned {len(out)} sentences "
            f"for {len(sentences)} inputs"
        )
    return [" ".join(s.split()) for s in out]


class LAINormalizer(Normalizer):
    """Leave-as-is: echoes its input."""

    capability = Capability("lai")

    def normalize_batch(self, lang: str, sentences: Sequence[str]) -> list[str]:
        return list(sentences)


class MFRNormalizer(Normalizer):
    """Word-by-word lexicon lookup (most-frequent replacement)."""

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self.capability = Capability("mfr")

    def normalize_batch(self, lang: str, sentences: Sequence[str]) -> list[str]:
        return [" ".join(mfr(s.split(), self.lexicon)) for s in sentences]


class ToyNormalizer(Normalizer):
    """Greedy decoding with a trained character-level seq2seq model."""

    def __init__(self, params: seq2seq.ModelParams, vocab: seq2seq.Vocab):
        self.params = params
        self.vocab = vocab
        self.capability = Capability("toy", frozenset(vocab.langs))

    @classmethod
    def from_checkpoint(cls, path: str) -> "ToyNormalizer":
        return cls(*seq2seq.load_model(path))

    def normalize_batch(self, lang: str, sentences: Sequence[str]) -> list[str]:
        if lang not in self.vocab.langs:
            raise UnsupportedLanguage(f"model has no language tag for {lang!r}")
        return [
            seq2seq.greedy_decode(self.params, self.vocab, lang, s)
            for s in sentences
        ]


@dataclass(frozen=True)
class RemoteConfig:
    base_url: str
    timeout: float = 30.0  # seconds per HTTP request
    max_inflight: int = 4
    retries: int = 2  # additional attempts after the first
    backoff_base: float = 0.5  # seconds; doubles per retry
    chunk_size: int = 32  # sentences per request

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")
        if self.max_inflight < 1 or self.chunk_size < 1:
            raise ValueError("max_inflight and chunk_size must be at least 1")


def _parse_normalized(payload, expected: int) -> list[str]:
    if not isinstance(payload, dict) or "normalized" not in payload:
        raise ProtocolError(f"response missing 'normalized': {payload!r}")
    out = payload["normalized"]
    if not isinstance(out, list) or not all(isinstance(s, str) for s in out):
        raise ProtocolError("'normalized' must be a list of strings")
    if len(out) != expected:
        raise ProtocolError(
            f"server returned {len(out)} sentences for {expected} inputs"
        )
    return out


def remote_call(cfg: RemoteConfig, lang: str, sentences: Sequence[str]) -> list[str]:
    """One POST /v1/normalize exchange, with idempotent retries.

    Transport failures (timeouts, refused connections) and 5xx responses
    are retried with exponential backoff; schema violations and 400s are
    not, since resending the same request cannot fix them.
    """
    url = cfg.base_url.rstrip("/") + "/v1/normalize"
    body = {"lang": lang, "sentences": list(sentences)}
    failure: BackendFailure | None = None
    for attempt in range(cfg.retries + 1):
        if attempt:
            time.sleep(cfg.backoff_base * 2 ** (attempt - 1))
            log.warning("retrying %s (attempt %d): %s", url, attempt + 1, failure)
        try:
            resp = requests.post(url, json=body, timeout=cfg.timeout)
        except (requests.Timeout, requests.ConnectionError) as exc:
            failure = Timeout(f"transport failure calling {url}: {exc}")
            continue
        if resp.status_code >= 500:
            failure = ServerError(resp.status_code, resp.text)
            continue
        if resp.status_code == 400:
            raise ProtocolError(f"server rejected request: {resp.text[:200]}")
        if resp.status_code != 200:
            raise ProtocolError(f"unexpected status {resp.status_code}")
        try:
            payload = resp.json()
        except ValueError as exc:
            raise ProtocolError(f"response is not JSON: {exc}") from exc
        return _parse_normalized(payload, len(sentences))
    assert failure is not None
    raise failure


def remote_health(cfg: RemoteConfig) -> dict:
    """GET /v1/health; returns the parsed body."""
    url = cfg.base_url.rstrip("/") + "/v1/health"
    try:
        resp = requests.get(url, timeout=cfg.timeout)
    except (requests.Timeout, requests.ConnectionError) as exc:
        raise Timeout(f"transport failure calling {url}: {exc}") from exc
    if resp.status_code != 200:
        raise ServerError(resp.status_code, resp.text)
    try:
        return resp.json()
    except ValueError as exc:
        raise ProtocolError(f"health response is not JSON: {exc}") from exc


class RemoteNormalizer(Normalizer):
    """HTTP client for the wire protocol, with a bounded in-flight cap.

    Large batches are split into chunks that go out over a small thread
    pool; results are collected back in order.
    """

    def __init__(self, cfg: RemoteConfig):
        self.cfg = cfg
        self.capability = Capability("remote")
        self._gate = threading.BoundedSemaphore(cfg.max_inflight)

    def _call(self, lang: str, chunk: list[str]) -> list[str]:
        with self._gate:
            return remote_call(self.cfg, lang, chunk)

    def normalize_batch(self, lang: str, sentences: Sequence[str]) -> list[str]:
        sentences = list(sentences)
        chunks = [
            sentences[i : i + self.cfg.chunk_size]
            for i in range(0, len(sentences), self.cfg.chunk_size)
        ]
        if len(chunks) == 1:
            return self._call(lang, chunks[0])
        with ThreadPoolExecutor(max_workers=self.cfg.max_inflight) as pool:
            parts = pool.map(lambda c: self._call(lang, c), chunks)
            return [s for part in parts for s in part]


def make_normalizer(selector: str, fold_case: bool = True) -> Normalizer:
    """Build a backend from a selector string.

    Selectors: ``lai``, ``mfr:<lexicon-path>``, ``toy:<checkpoint-path>``,
    ``remote:<url>``.  Malformed selectors raise ValueError.
    """
    kind, _, arg = selector.partition(":")
    if kind == "lai":
        if arg:
            raise ValueError("lai takes no argument")
        return LAINormalizer()
    if kind == "mfr":
        if not arg:
            raise ValueError("mfr selector needs a lexicon path: mfr:<path>")
        from .baselines import load_lexicon

        with open(arg, encoding="utf-8") as f:
            return MFRNormalizer(load_lexicon(f, fold_case=fold_case))
    if kind == "toy":
        if not arg:
            raise ValueError("toy selector needs a checkpoint path: toy:<path>")
        return ToyNormalizer.from_checkpoint(arg)
    if kind == "remote":
        if not arg:
            raise ValueError("remote selector needs a URL: remote:<url>")
        return RemoteNormalizer(RemoteConfig(base_url=arg))
    raise ValueError(f"unknown backend selector {selector!r}")
