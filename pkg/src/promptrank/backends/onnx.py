"""ONNX Runtime backend.

A model directory holds ``encoder_model.onnx``, ``decoder_model.onnx``, the
tokenizer files and ``config.json``. :func:`export_onnx` produces this layout
from a ``transformers`` checkpoint directory.

encoder_model.onnx: ``input_ids``, ``attention_mask`` -> ``last_hidden_state``
decoder_model.onnx: ``input_ids``, ``encoder_attention_mask``,
``encoder_hidden_states`` -> ``logits``
"""
from __future__ import annotations

import json
import os

import numpy as np

from .base import BackendError
from .hf import FAMILIES, TokenizerMixin, leading_special_ids

ENCODER_FILE = "encoder_model.onnx"
DECODER_FILE = "decoder_model.onnx"


def _log_softmax(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.float32, copy=False)
    m = x.max(axis=-1, keepdims=True)
    return x - m - np.log(np.exp(x - m).sum(axis=-1, keepdims=True))


class OnnxBackend(TokenizerMixin):
    def __init__(self, model_dir: str | os.PathLike, family: str | None = None,
                 providers: list[str] | None = None, intra_op_threads: int = 0):
        import onnxruntime as ort
        from transformers import AutoTokenizer

        path = os.fspath(model_dir)
        for fname in (ENCODER_FILE, DECODER_FILE, "config.json"):
            if not os.path.exists(os.path.join(path, fname)):
                raise BackendError(f"{path}: missing {fname}")
        with open(os.path.join(path, "config.json"), encoding="utf-8") as fh:
            config = json.load(fh)
        self.family = family or config.get("model_type")
        if self.family not in FAMILIES:
            raise BackendError(f"unsupported model family {self.family!r}")
        self.name = f"onnx-{self.family}:{os.path.basename(os.path.normpath(path))}"
        opts = ort.SessionOptions()
        opts.intra_op_num_threads = intra_op_threads
        providers = providers or ["CPUExecutionProvider"]
        try:
            self.encoder = ort.InferenceSession(os.path.join(path, ENCODER_FILE), opts, providers=providers)
            self.decoder = ort.InferenceSession(os.path.join(path, DECODER_FILE), opts, providers=providers)
            self.tokenizer = AutoTokenizer.from_pretrained(path)
        except Exception as exc:  # onnxruntime raises its own hierarchy
            raise BackendError(f"cannot load ONNX model from {path}: {exc}") from exc
        start = config.get("decoder_start_token_id")
        if start is None:
            raise BackendError("config.json has no decoder_start_token_id")
        self.decoder_start_ids = [start] + leading_special_ids(self.tokenizer)
        self.eos_id = self.tokenizer.eos_token_id
        self.pad_id = self.tokenizer.pad_token_id if self.tokenizer.pad_token_id is not None else 0

    def encode(self, encoder_ids):
        ids = np.asarray([list(encoder_ids)], dtype=np.int64)
        mask = np.ones_like(ids)
        hidden = self.encoder.run(["last_hidden_state"], {"input_ids": ids, "attention_mask": mask})[0]
        return hidden, mask

    def decoder_logprobs(self, state, decoder_ids):
        hidden, mask = state
        batch = len(decoder_ids)
        width = max(len(s) for s in decoder_ids)
        ids = np.full((batch, width), self.pad_id, dtype=np.int64)
        for b, seq in enumerate(decoder_ids):
            ids[b, : len(seq)] = seq
        logits = self.decoder.run(["logits"], {
            "input_ids": ids,
            "encoder_attention_mask": np.repeat(mask, batch, axis=0),
            "encoder_hidden_states": np.repeat(hidden, batch, axis=0),
        })[0]
        return _log_softmax(logits)


def export_onnx(model_dir: str | os.PathLike, out_dir: str | os.PathLike, opset: int = 18) -> None:
    """Export a local ``transformers`` encoder-decoder checkpoint for :class:`OnnxBackend`."""
    import torch
    from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
    from transformers.modeling_outputs import BaseModelOutput

    model = AutoModelForSeq2SeqLM.from_pretrained(model_dir).eval()
    os.makedirs(out_dir, exist_ok=True)

    class _Encoder(torch.nn.Module):
        def __init__(self, m):
            super().__init__()
            self.m = m

        def forward(self, input_ids, attention_mask):
            return self.m.get_encoder()(input_ids=input_ids, attention_mask=attention_mask).last_hidden_state

    class _Decoder(torch.nn.Module):
        def __init__(self, m):
            super().__init__()
            self.m = m

        def forward(self, input_ids, encoder_attention_mask, encoder_hidden_states):
            return self.m(
                encoder_outputs=BaseModelOutput(last_hidden_state=encoder_hidden_states),
                attention_mask=encoder_attention_mask,
                decoder_input_ids=input_ids,
                use_cache=False,
            ).logits

    start = model.config.decoder_start_token_id or 0
    enc_ids = torch.tensor([[start + 3] * 7 + [start]], dtype=torch.long)
    enc_mask = torch.ones_like(enc_ids)
    with torch.inference_mode():
        hidden = _Encoder(model)(enc_ids, enc_mask)
    dec_ids = torch.tensor([[start] + [start + 4] * 4] * 2, dtype=torch.long)
    seq = {0: "batch", 1: "enc_len"}
    torch.onnx.export(
        _Encoder(model).eval(), (enc_ids, enc_mask), os.path.join(out_dir, ENCODER_FILE),
        input_names=["input_ids", "attention_mask"], output_names=["last_hidden_state"],
        dynamic_axes={"input_ids": seq, "attention_mask": seq, "last_hidden_state": seq},
        opset_version=opset, dynamo=True,
    )
    torch.onnx.export(
        _Decoder(model).eval(), (dec_ids, enc_mask.expand(2, -1), hidden.expand(2, -1, -1)),
        os.path.join(out_dir, DECODER_FILE),
        input_names=["input_ids", "encoder_attention_mask", "encoder_hidden_states"],
        output_names=["logits"],
        dynamic_axes={
            "input_ids": {0: "batch", 1: "dec_len"},
            "encoder_attention_mask": seq,
            "encoder_hidden_states": seq,
            "logits": {0: "batch", 1: "dec_len"},
        },
        opset_version=opset, dynamo=True,
    )
    model.config.save_pretrained(out_dir)
    AutoTokenizer.from_pretrained(model_dir).save_pretrained(out_dir)
