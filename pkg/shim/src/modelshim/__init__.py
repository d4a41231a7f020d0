"""Inference shim: serves a seq2seq model behind the normalization wire
protocol, with an echo mode that needs no weights."""

from .config import ConfigError, ShimConfig, parse_lang_map
from .service import Faults, ShimServer, serve

__all__ = [
    "ConfigError",
    "Faults",
    "ShimConfig",
    "ShimServer",
    "parse_lang_map",
    "serve",
]
