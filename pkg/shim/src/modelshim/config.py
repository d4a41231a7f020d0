"""Service configuration.

The shim serves exactly one model (or the echo stand-in) and needs an
explicit mapping from the corpus language codes used on the wire ("en",
"da") to the wrapped model's own codes ("en_XX", "da_DK"), because the
two vocabularies never agree.  Decoding knobs are configuration rather
than constants: the right beam and length limit depend on the wrapped
checkpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ShimConfig:
    model: str = ""  # checkpoint path or hub identifier; unused in echo mode
    device: str = "cpu"
    max_batch: int = 16  # sentences per internal model call
    lang_map: dict[str, str] = field(default_factory=dict)
    echo_mode: bool = False
    beam_size: int = 1
    max_new_tokens: int = 128

    def __post_init__(self):
        if not self.echo_mode and not self.model:
            raise ConfigError("either a model path/identifier or echo mode is required")
        if self.max_batch < 1:
            raise ConfigError("max_batch must be at least 1")
        if self.beam_size < 1:
            raise ConfigError("beam_size must be at least 1")
        if self.max_new_tokens < 1:
            raise ConfigError("max_new_tokens must be at least 1")
        for corpus_code, model_code in self.lang_map.items():
            if not corpus_code or not model_code:
                raise ConfigError(
                    f"empty language code in mapping {corpus_code!r} -> {model_code!r}"
                )

    def model_code(self, lang: str) -> str:
        """Model-side code for a corpus language; KeyError if unmapped."""
        return self.lang_map[lang]


def parse_lang_map(text: str) -> dict[str, str]:
    """Parse "en=en_XX,da=da_DK" into a mapping."""
    mapping: dict[str, str] = {}
    if not text:
        return mapping
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"language mapping entry {item!r} is not CODE=MODELCODE")
        corpus_code, model_code = item.split("=", 1)
        corpus_code, model_code = corpus_code.strip(), model_code.strip()
        if not corpus_code or not model_code:
            raise ConfigError(f"language mapping entry {item!r} has an empty side")
        mapping[corpus_code] = model_code
    return mapping
