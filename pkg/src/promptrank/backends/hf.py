"""PyTorch encoder-decoder models loaded with ``transformers`` from a local directory.

T5 and BART checkpoints are both supported; the family only changes how the
decoder sequence is started.
"""
from __future__ import annotations

import os

import numpy as np

from .base import BackendError

FAMILIES = ("t5", "bart")


def leading_special_ids(tokenizer) -> list[int]:
    """Special ids the tokenizer puts before the text, e.g. ``<s>`` for BART."""
    plain = tokenizer("a", add_special_tokens=False)["input_ids"]
    wrapped = tokenizer("a")["input_ids"]
    for i in range(len(wrapped) - len(plain) + 1):
        if wrapped[i: i + len(plain)] == plain:
            return list(wrapped[:i])
    raise ValueError("tokenizer output with special tokens does not contain the plain tokens")


class TokenizerMixin:
    tokenizer = None

    def encode_text(self, text, max_tokens):
        return self.tokenizer(text, truncation=True, max_length=max_tokens)["input_ids"]

    def tokenize_decoder(self, text):
        return self.tokenizer(text, add_special_tokens=False)["input_ids"]


class TransformersBackend(TokenizerMixin):
    def __init__(self, weights_path: str | os.PathLike, family: str | None = None,
                 device: str = "cpu", dtype: str = "float32"):
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        path = os.fspath(weights_path)
        if not os.path.isdir(path):
            raise BackendError(f"model directory not found: {path}")
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(path)
            self.model = AutoModelForSeq2SeqLM.from_pretrained(path, dtype=getattr(torch, dtype))
        except (OSError, ValueError) as exc:
            raise BackendError(f"cannot load model from {path}: {exc}") from exc
        self.model.to(device).eval()
        self.device = device
        self._torch = torch

        model_type = self.model.config.model_type
        self.family = family or model_type
        if self.family not in FAMILIES:
            raise BackendError(f"unsupported model family {self.family!r} (have {model_type!r})")
        self.name = f"{self.family}:{os.path.basename(os.path.normpath(path))}"
        start = self.model.config.decoder_start_token_id
        if start is None:
            raise BackendError("model config has no decoder_start_token_id")
        self.decoder_start_ids = [start] + leading_special_ids(self.tokenizer)
        self.eos_id = self.tokenizer.eos_token_id
        self.pad_id = self.tokenizer.pad_token_id if self.tokenizer.pad_token_id is not None else 0

    def encode(self, encoder_ids):
        torch = self._torch
        ids = torch.tensor([list(encoder_ids)], dtype=torch.long, device=self.device)
        mask = torch.ones_like(ids)
        with torch.inference_mode():
            hidden = self.model.get_encoder()(input_ids=ids, attention_mask=mask).last_hidden_state
        return hidden, mask

    def decoder_logprobs(self, state, decoder_ids):
        torch = self._torch
        hidden, mask = state
        width = max(len(s) for s in decoder_ids)
        batch = len(decoder_ids)
        ids = torch.full((batch, width), self.pad_id, dtype=torch.long, device=self.device)
        dmask = torch.zeros((batch, width), dtype=torch.long, device=self.device)
        for b, seq in enumerate(decoder_ids):
            ids[b, : len(seq)] = torch.tensor(seq, dtype=torch.long)
            dmask[b, : len(seq)] = 1
        from transformers.modeling_outputs import BaseModelOutput

        with torch.inference_mode():
            out = self.model(
                encoder_outputs=BaseModelOutput(last_hidden_state=hidden.expand(batch, -1, -1)),
                attention_mask=mask.expand(batch, -1),
                decoder_input_ids=ids,
                decoder_attention_mask=dmask,
                use_cache=False,
            )
            logp = torch.log_softmax(out.logits.float(), dim=-1)
        return logp.cpu().numpy()
