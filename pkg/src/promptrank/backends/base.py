from __future__ import annotations

from typing import Any, Protocol, Sequence

import numpy as np


class BackendError(RuntimeError):
    pass


class Seq2SeqBackend(Protocol):
    """What the scorer needs from an encoder-decoder model.

    ``decoder_logprobs`` receives full decoder input sequences (start markers
    included) and returns an array of shape ``(batch, max_len, vocab)`` where
    row ``t`` is the log-softmax over the token that follows position ``t``.
    Rows past a sequence's length are ignored by the caller.
    """

    name: str
    decoder_start_ids: list[int]
    eos_id: int | None

    def encode_text(self, text: str, max_tokens: int) -> list[int]: ...

    def tokenize_decoder(self, text: str) -> list[int]: ...

    def encode(self, encoder_ids: Sequence[int]) -> Any: ...

    def decoder_logprobs(self, state: Any, decoder_ids: Sequence[Sequence[int]]) -> np.ndarray: ...
