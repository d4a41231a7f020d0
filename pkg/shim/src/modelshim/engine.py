"""Normalization engines behind the service.

EchoEngine returns its input verbatim and exists so the protocol can be
exercised with no model weights on disk (and no torch import at all).
HFEngine wraps any local or hub seq2seq checkpoint; torch and
transformers are imported lazily inside it, keeping echo servers free of
the model stack.
"""

from __future__ import annotations

import logging
import os

log = logging.getLogger("modelshim.engine")


class EngineError(RuntimeError):
    pass


class EchoEngine:
    model_id = "echo"

    def __init__(self):
        # batch sizes seen, so tests can observe internal micro-batching
        self.calls: list[int] = []

    def normalize(self, lang: str, sentences: list[str]) -> list[str]:
        self.calls.append(len(sentences))
        return list(sentences)


class HFEngine:
    """Greedy/beam inference over a seq2seq transformers checkpoint.

    Multilingual translation tokenizers (the mBART family) mark the
    language with a dedicated code token; during fine-tuning the decoder
    is conditioned on the target-language code as its first token, so
    inference starts decoding from that same code rather than forcing it
    after a generic start token.  Tokenizers without language codes are
    served as-is and the mapping value is ignored.
    """

    def __init__(self, cfg):
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self._torch = torch
        self.cfg = cfg
        log.info("loading %s on %s", cfg.model, cfg.device)
        self.tokenizer = AutoTokenizer.from_pretrained(cfg.model)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(cfg.model)
        self.model.to(cfg.device)
        self.model.eval()
        self.model_id = os.path.basename(os.path.normpath(cfg.model)) or cfg.model
        log.info("model ready (%d parameters)",
                 sum(p.numel() for p in self.model.parameters()))

    def _lang_token_id(self, model_code: str):
        tok = self.tokenizer
        if not model_code or not hasattr(tok, "src_lang"):
            return None
        token_id = tok.convert_tokens_to_ids(model_code)
        if token_id is None or token_id == tok.unk_token_id:
            raise EngineError(
                f"language code {model_code!r} is not in the model vocabulary"
            )
        return token_id

    def normalize(self, lang: str, sentences: list[str]) -> list[str]:
        tok = self.tokenizer
        model_code = self.cfg.lang_map.get(lang, "")
        lang_id = self._lang_token_id(model_code)
        if lang_id is not None:
            tok.src_lang = model_code
        enc = tok(list(sentences), return_tensors="pt", padding=True,
                  truncation=True)
        enc = {k: v.to(self.cfg.device) for k, v in enc.items()}
        kwargs = dict(
            num_beams=self.cfg.beam_size,
            max_new_tokens=self.cfg.max_new_tokens,
        )
        if lang_id is not None:
            # normalization keeps the language: decode starts from the
            # source language's own code, matching the training shift
            kwargs["decoder_start_token_id"] = lang_id
        with self._torch.no_grad():
            out = self.model.generate(**enc, **kwargs)
        return tok.batch_decode(out, skip_special_tokens=True)


def make_engine(cfg):
    if cfg.echo_mode:
        return EchoEngine()
    return HFEngine(cfg)
