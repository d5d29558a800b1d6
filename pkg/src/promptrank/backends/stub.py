"""Deterministic stand-in for a real encoder-decoder model.

The stub tokenizes into word pieces of at most four characters and produces
log-softmax rows that favour tokens present in the encoder input, so rankings
depend on the document the way a real model's would, only much more crudely.
"""
from __future__ import annotations

import re
import zlib
from collections import Counter
from functools import lru_cache

import numpy as np

PAD, EOS, UNK = 0, 1, 2
_RESERVED = 3
_PIECE = re.compile(r"\w{1,4}|[^\w\s]", re.UNICODE)


class StubBackend:
    name = "stub"

    def __init__(self, seed: int = 0, vocab_size: int = 997, constant: float | None = None,
                 doc_weight: float = 2.0):
        if vocab_size <= _RESERVED:
            raise ValueError("vocab_size too small")
        self.seed = seed
        self.vocab_size = vocab_size
        self.constant = constant
        self.doc_weight = doc_weight
        self.decoder_start_ids = [PAD]
        self.eos_id = EOS
        self.encode_calls = 0
        self._noise = lru_cache(maxsize=4096)(self._noise_row)

    def _piece_id(self, piece: str) -> int:
        h = zlib.crc32(f"{self.seed}\x00{piece}".encode("utf-8"))
        return _RESERVED + h % (self.vocab_size - _RESERVED)

    def pieces(self, text: str) -> list[str]:
        out = []
        for word in text.lower().split():
            for k, m in enumerate(_PIECE.finditer(word)):
                out.append(("▁" if k == 0 else "") + m.group())
        return out

    def tokenize_decoder(self, text: str) -> list[int]:
        return [self._piece_id(p) for p in self.pieces(text)]

    def encode_text(self, text: str, max_tokens: int) -> list[int]:
        ids = self.tokenize_decoder(text)[: max(max_tokens - 1, 0)]
        return (ids + [EOS])[:max_tokens]

    def encode(self, encoder_ids):
        self.encode_calls += 1
        counts = Counter(encoder_ids)
        bonus = np.zeros(self.vocab_size, dtype=np.float64)
        for tok, c in counts.items():
            bonus[tok] = self.doc_weight * np.log1p(c)
        return bonus

    def _noise_row(self, prev: int) -> np.ndarray:
        rng = np.random.default_rng([self.seed, prev])
        return rng.normal(0.0, 1.0, self.vocab_size)

    def decoder_logprobs(self, state, decoder_ids):
        width = max(len(seq) for seq in decoder_ids)
        out = np.zeros((len(decoder_ids), width, self.vocab_size), dtype=np.float64)
        if self.constant is not None:
            out.fill(self.constant)
            return out
        for b, seq in enumerate(decoder_ids):
            for t, prev in enumerate(seq):
                logits = self._noise(prev) + state
                m = logits.max()
                out[b, t] = logits - m - np.log(np.exp(logits - m).sum())
        return out
