"""Prompt-based candidate probability.

For every candidate the decoder reads ``prefix + candidate`` conditioned on
the encoded document. The candidate's score is the sum of its token
log-probabilities divided by ``l_c ** alpha``, with ``l_c`` counted in decoder
subword tokens.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .backends.base import BackendError, Seq2SeqBackend
from .candidates import Candidate
from .templates import PromptTemplate, render_decoder_prefix, render_encoder

log = logging.getLogger(__name__)


class TokenizationError(ValueError):
    pass


class ScoringError(RuntimeError):
    def __init__(self, doc_id, batch_index, cause):
        super().__init__(f"document {doc_id!r}, batch {batch_index}: {cause}")
        self.doc_id = doc_id
        self.batch_index = batch_index


@dataclass(frozen=True)
class ScorerConfig:
    alpha: float = 0.6
    encoder_max_tokens: int = 512
    batch_size: int = 64
    include_eos: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.encoder_max_tokens < 1:
            raise ValueError("encoder_max_tokens must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass(frozen=True)
class CandidateLogProbs:
    token_logprobs: tuple[float, ...]
    start_index_j: int

    def __post_init__(self):
        if not self.token_logprobs:
            raise ValueError("candidate has no tokens")
        if any(lp > 0 for lp in self.token_logprobs):
            raise ValueError("log-probabilities must be <= 0")

    @property
    def candidate_token_len_lc(self) -> int:
        return len(self.token_logprobs)


def locate_candidate_tokens(prefix: str, candidate: str,
                            tokenize: Callable[[str], list[int]]) -> tuple[int, int, list[int]]:
    """Locate the candidate inside the tokenized decoder text.

    Returns ``(j, l_c, ids)`` where ``ids`` tokenizes ``prefix + candidate``,
    ``j`` is the number of leading tokens it shares with the prefix tokenized
    alone and ``l_c`` the number of tokens after them. When a tokenizer merges
    the prefix's last piece into the candidate (byte-level BPE does this with a
    trailing space), the merged token counts as candidate. ``j`` excludes any
    decoder start markers.
    """
    if not candidate:
        raise ValueError("candidate must be non-empty")
    prefix_ids = tokenize(prefix) if prefix else []
    ids = tokenize(prefix + candidate)
    if len(ids) < len(prefix_ids):
        raise TokenizationError(
            f"tokenizing {prefix + candidate!r} gave {len(ids)} tokens, fewer than the prefix alone "
            f"({len(prefix_ids)})")
    j = 0
    for a, b in zip(prefix_ids, ids):
        if a != b:
            break
        j += 1
    return j, len(ids) - j, ids


def score_candidate(logprobs: CandidateLogProbs, cfg: ScorerConfig | float) -> float:
    alpha = cfg if isinstance(cfg, (int, float)) else cfg.alpha
    lc = logprobs.candidate_token_len_lc
    return float(sum(logprobs.token_logprobs)) / lc ** alpha


def candidate_logprobs(text: str, candidates: Sequence[Candidate], template: PromptTemplate,
                       backend: Seq2SeqBackend, cfg: ScorerConfig,
                       doc_id: str | None = None) -> dict[Candidate, CandidateLogProbs]:
    """Per-token log-probabilities of every scorable candidate of one document.

    The encoder runs once; its output is shared by every decoder batch.
    Candidates whose tokenization comes out empty are skipped with a warning.
    """
    if not candidates:
        return {}
    enc_ids = backend.encode_text(render_encoder(template, text), cfg.encoder_max_tokens)
    if not enc_ids:
        raise ScoringError(doc_id, -1, "empty encoder input")
    prefix = render_decoder_prefix(template)
    start = list(backend.decoder_start_ids)
    if not start:
        raise BackendError(f"backend {backend.name} declares no decoder start token")

    jobs = []  # (candidate, decoder input ids, first target position, target count)
    for cand in candidates:
        j, lc, ids = locate_candidate_tokens(prefix, cand.surface, backend.tokenize_decoder)
        if lc < 1:
            log.warning("document %s: candidate %r has no tokens after the prefix; skipped", doc_id, cand.surface)
            continue
        seq = start + ids
        n_targets = lc
        if cfg.include_eos and backend.eos_id is not None:
            seq = seq + [backend.eos_id]
            n_targets += 1
        jobs.append((cand, seq, len(start) + j, n_targets))
    if not jobs:
        return {}

    try:
        state = backend.encode(enc_ids)
    except Exception as exc:
        raise ScoringError(doc_id, -1, f"encoder failed: {exc}") from exc

    out: dict[Candidate, CandidateLogProbs] = {}
    for bi in range(0, len(jobs), cfg.batch_size):
        batch = jobs[bi: bi + cfg.batch_size]
        try:
            logp = backend.decoder_logprobs(state, [seq for _, seq, _, _ in batch])
        except Exception as exc:
            raise ScoringError(doc_id, bi // cfg.batch_size, exc) from exc
        for row, (cand, seq, first, n) in enumerate(batch):
            # row t holds the distribution of the token at t + 1
            positions = np.arange(first, first + n)
            lps = logp[row, positions - 1, np.asarray(seq)[positions]]
            out[cand] = CandidateLogProbs(tuple(min(float(x), 0.0) for x in lps), first)
    return out


def score_document(text: str, candidates: Sequence[Candidate], template: PromptTemplate,
                   backend: Seq2SeqBackend, cfg: ScorerConfig,
                   doc_id: str | None = None) -> dict[Candidate, float]:
    lps = candidate_logprobs(text, candidates, template, backend, cfg, doc_id)
    return {cand: score_candidate(lp, cfg) for cand, lp in lps.items()}


__all__ = [
    "BackendError", "CandidateLogProbs", "ScorerConfig", "ScoringError", "TokenizationError",
    "candidate_logprobs", "locate_candidate_tokens", "score_candidate", "score_document",
]
