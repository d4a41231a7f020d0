"""Supervised fine-tuning on noisy/clean sentence pairs.

Consumes the sentence-pair JSONL export (one object per line with
"lang", "src", "tgt"); all languages are pooled and shuffled together
every epoch, so a single multilingual model sees them mixed.  The
shuffle is seed-controlled and its order is logged per epoch, which
makes runs comparable.  The resulting checkpoint is written with
save_pretrained and is exactly what the serving side loads.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass

log = logging.getLogger("modelshim.finetune")


class PairsError(ValueError):
    pass


class MissingLanguageMapping(ValueError):
    def __init__(self, codes):
        self.codes = tuple(codes)
        super().__init__(
            "no model language code configured for: " + ", ".join(self.codes)
        )


@dataclass
class Pair:
    lang: str
    src: str
    tgt: str


def read_pairs(path: str) -> list[Pair]:
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                pairs.append(Pair(obj["lang"], obj["src"], obj["tgt"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise PairsError(f"{path}:{lineno}: bad sentence pair: {exc}") from exc
    if not pairs:
        raise PairsError(f"{path}: no sentence pairs")
    return pairs


def check_language_codes(pairs, cfg) -> list[str]:
    """Distinct corpus languages, after verifying the map covers them."""
    langs = sorted({p.lang for p in pairs})
    missing = [l for l in langs if l not in cfg.lang_map]
    if missing:
        raise MissingLanguageMapping(missing)
    return langs


def _encode(tokenizer, pair: Pair, model_code: str, max_length: int):
    if hasattr(tokenizer, "src_lang"):
        tokenizer.src_lang = model_code
        tokenizer.tgt_lang = model_code
    enc = tokenizer(pair.src, truncation=True, max_length=max_length)
    lab = tokenizer(text_target=pair.tgt, truncation=True, max_length=max_length)
    return enc["input_ids"], lab["input_ids"]


def _collate(torch, examples, pad_id):
    width_in = max(len(src) for src, _ in examples)
    width_out = max(len(lab) for _, lab in examples)
    input_ids, attention_mask, labels = [], [], []
    for src, lab in examples:
        pad = width_in - len(src)
        input_ids.append(src + [pad_id] * pad)
        attention_mask.append([1] * len(src) + [0] * pad)
        labels.append(lab + [-100] * (width_out - len(lab)))
    return (
        torch.tensor(input_ids),
        torch.tensor(attention_mask),
        torch.tensor(labels),
    )


def finetune(
    pairs_path: str,
    cfg,
    out_dir: str,
    *,
    epochs: int = 1,
    batch_size: int = 8,
    learning_rate: float = 5e-5,
    seed: int = 0,
    max_steps: int | None = None,
    max_length: int = 64,
) -> dict:
    """Fine-tune cfg.model on a sentence-pair export; returns a summary."""
    pairs = read_pairs(pairs_path)
    langs = check_language_codes(pairs, cfg)

    import torch
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

    torch.manual_seed(seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.model)
    model = AutoModelForSeq2SeqLM.from_pretrained(cfg.model)
    model.to(cfg.device)
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=learning_rate)
    pad_id = tokenizer.pad_token_id

    encoded = [
        _encode(tokenizer, p, cfg.lang_map[p.lang], max_length) for p in pairs
    ]
    log.info("fine-tuning on %d pairs across %s", len(pairs), ",".join(langs))

    steps = 0
    last_loss = float("nan")
    stop = False
    for epoch in range(epochs):
        order = list(range(len(pairs)))
        random.Random(f"{seed}:{epoch}").shuffle(order)
        digest = hashlib.sha256(json.dumps(order).encode()).hexdigest()[:16]
        log.info("epoch %d shuffle sha256=%s head=%s", epoch, digest, order[:8])
        for start in range(0, len(order), batch_size):
            batch = [encoded[i] for i in order[start : start + batch_size]]
            input_ids, attention_mask, labels = _collate(torch, batch, pad_id)
            out = model(
                input_ids=input_ids.to(cfg.device),
                attention_mask=attention_mask.to(cfg.device),
                labels=labels.to(cfg.device),
            )
            optimizer.zero_grad()
            out.loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
            optimizer.step()
            last_loss = float(out.loss.detach())
            steps += 1
            if max_steps is not None and steps >= max_steps:
                stop = True
                break
        log.info("epoch %d done, loss %.4f", epoch, last_loss)
        if stop:
            break

    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    return {
        "pairs": len(pairs),
        "langs": langs,
        "steps": steps,
        "final_loss": last_loss,
        "checkpoint": out_dir,
    }
