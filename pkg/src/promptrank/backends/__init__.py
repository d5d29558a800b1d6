"""Model backends and the factory that builds one from a ``family`` / ``weights`` pair.

Families: ``stub`` (no weights; ``weights`` may carry ``seed=N``), ``t5`` and
``bart`` (local ``transformers`` checkpoint directory), ``onnx`` (directory
produced by :func:`promptrank.backends.onnx.export_onnx`).
"""
from __future__ import annotations

from .base import BackendError, Seq2SeqBackend
from .stub import StubBackend

BACKEND_FAMILIES = ("stub", "t5", "bart", "onnx")


def load_backend(family: str, weights: str | None = None) -> Seq2SeqBackend:
    if family == "stub":
        seed = 0
        if weights:
            key, _, value = weights.partition("=")
            if key != "seed" or not value.lstrip("-").isdigit():
                raise BackendError(f"stub backend takes 'seed=N', got {weights!r}")
            seed = int(value)
        return StubBackend(seed=seed)
    if not weights:
        raise BackendError(f"backend {family!r} needs a weights path")
    if family in ("t5", "bart"):
        from .hf import TransformersBackend

        return TransformersBackend(weights, family=family)
    if family == "onnx":
        from .onnx import OnnxBackend

        return OnnxBackend(weights)
    raise BackendError(f"unknown backend {family!r}; choose from {', '.join(BACKEND_FAMILIES)}")


__all__ = ["BackendError", "Seq2SeqBackend", "StubBackend", "load_backend", "BACKEND_FAMILIES"]
