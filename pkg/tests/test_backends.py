import numpy as np
import pytest

from promptrank.backends import BackendError, load_backend
from promptrank.backends.stub import StubBackend
from promptrank.candidates import Candidate
from promptrank.pipeline import KeyphraseExtractor, PipelineConfig
from promptrank.scorer import ScorerConfig, candidate_logprobs, locate_candidate_tokens
from promptrank.templates import get_template, render_decoder_prefix

TEXT = "This book mainly talks about deep learning, neural networks and language models."
CANDS = [Candidate("deep learning", "deep learning", 5, 2),
         Candidate("neural networks", "neural networks", 8, 2),
         Candidate("language models", "language models", 11, 2)]


def test_stub_is_deterministic():
    a, b = StubBackend(seed=1), StubBackend(seed=1)
    ids = [a.decoder_start_ids + a.tokenize_decoder("neural networks")]
    sa = a.encode(a.encode_text("doc", 16))
    sb = b.encode(b.encode_text("doc", 16))
    assert np.array_equal(a.decoder_logprobs(sa, ids), b.decoder_logprobs(sb, ids))
    assert np.allclose(np.exp(a.decoder_logprobs(sa, ids)).sum(-1), 1.0)


def test_load_backend_errors():
    with pytest.raises(BackendError):
        load_backend("t5", None)
    with pytest.raises(BackendError):
        load_backend("nope", "x")
    assert load_backend("stub", "seed=4").name.startswith("stub")


def full_forward(backend, enc_ids, seq):
    """Reference: one ordinary forward pass without encoder reuse or padding."""
    torch = backend._torch
    with torch.inference_mode():
        out = backend.model(input_ids=torch.tensor([enc_ids]), decoder_input_ids=torch.tensor([seq]))
    return torch.log_softmax(out.logits.float(), -1)[0].numpy()


@pytest.fixture(params=["t5", "bart"])
def hf_backend(request, tiny_t5, tiny_bart):
    from promptrank.backends.hf import TransformersBackend

    path = tiny_t5 if request.param == "t5" else tiny_bart
    return TransformersBackend(path)


def test_start_ids(tiny_t5, tiny_bart):
    from promptrank.backends.hf import TransformersBackend

    t5 = TransformersBackend(tiny_t5)
    bart = TransformersBackend(tiny_bart)
    assert t5.decoder_start_ids == [t5.pad_id]
    bos = bart.tokenizer.bos_token_id
    assert bart.decoder_start_ids == [bart.eos_id, bos]


def test_encoder_reuse_matches_full_forward(hf_backend):
    b = hf_backend
    enc = b.encode_text('Book:"' + TEXT + '"', 512)
    state = b.encode(enc)
    seqs = [b.decoder_start_ids + b.tokenize_decoder("This book mainly talks about " + c.surface) for c in CANDS]
    batched = b.decoder_logprobs(state, seqs)
    for row, seq in enumerate(seqs):
        ref = full_forward(b, enc, seq)
        assert np.allclose(batched[row, : len(seq)], ref, atol=1e-4)


def test_batch_size_invariance(hf_backend):
    t = get_template("default")
    a = candidate_logprobs(TEXT, CANDS, t, hf_backend, ScorerConfig(batch_size=1))
    b = candidate_logprobs(TEXT, CANDS, t, hf_backend, ScorerConfig(batch_size=64))
    for c in CANDS:
        assert np.allclose(a[c].token_logprobs, b[c].token_logprobs, atol=1e-5)


def test_candidate_tokens_cover_candidate(hf_backend):
    b = hf_backend
    prefix = render_decoder_prefix(get_template("default"))
    for c in CANDS:
        j, lc, ids = locate_candidate_tokens(prefix, c.surface, b.tokenize_decoder)
        assert lc >= 1
        assert b.tokenizer.decode(ids[j:]).strip() == c.surface


def test_truncation(hf_backend):
    assert len(hf_backend.encode_text("word " * 3000, 512)) == 512


def test_pipeline_with_real_backend(hf_backend):
    out = KeyphraseExtractor(PipelineConfig(), hf_backend).extract(TEXT)
    assert out and all(c.p_c <= 0 for c in out)


def test_missing_model_dir(tmp_path):
    pytest.importorskip("transformers")
    from promptrank.backends.hf import TransformersBackend

    with pytest.raises(BackendError):
        TransformersBackend(tmp_path / "nothing")


@pytest.mark.slow
@pytest.mark.parametrize("which", ["t5", "bart"])
def test_onnx_export_matches_torch(which, tiny_t5, tiny_bart, tmp_path):
    pytest.importorskip("onnxruntime")
    pytest.importorskip("onnxscript")
    pytest.importorskip("onnx")
    from promptrank.backends.hf import TransformersBackend
    from promptrank.backends.onnx import OnnxBackend, export_onnx

    src = tiny_t5 if which == "t5" else tiny_bart
    export_onnx(src, tmp_path / "onnx")
    ort = OnnxBackend(tmp_path / "onnx")
    pt = TransformersBackend(src)
    assert ort.decoder_start_ids == pt.decoder_start_ids
    t = get_template("default")
    a = candidate_logprobs(TEXT, CANDS, t, ort, ScorerConfig(batch_size=2))
    b = candidate_logprobs(TEXT, CANDS, t, pt, ScorerConfig(batch_size=2))
    for c in CANDS:
        assert np.allclose(a[c].token_logprobs, b[c].token_logprobs, atol=1e-4)
