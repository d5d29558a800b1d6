"""End-to-end extraction: tag, chunk, score with the model, rank.

Per-token candidate log-probabilities are kept in :class:`DocumentScores` so
that changing ``alpha`` or ``gamma`` only redoes the arithmetic, not the
model passes.
"""
from __future__ import annotations

import json
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .backends import Seq2SeqBackend, load_backend
from .candidates import Candidate, extract_candidates
from .corpus import CorpusRecord
from .evaluation import DEFAULT_KS, EvalReport, evaluate, prepare_gold, prepare_predictions
from .preprocess import DEFAULT_POSITION_CAP, DEFAULT_TAGGER_PATH, PerceptronTagger, TaggedDocument, preprocess
from .ranker import RankerConfig, ScoredCandidate, rank
from .scorer import CandidateLogProbs, ScorerConfig, candidate_logprobs, score_candidate
from .templates import DEFAULT_TEMPLATE_ID, PromptTemplate, get_template, load_templates

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    scorer: ScorerConfig = ScorerConfig()
    ranker: RankerConfig = RankerConfig()
    template_id: str = DEFAULT_TEMPLATE_ID
    templates_file: str | None = None
    tagger_weights_path: str = DEFAULT_TAGGER_PATH
    backend: str = "stub"
    weights: str | None = None
    workers: int = 1
    position_cap: int = DEFAULT_POSITION_CAP
    present_only: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.position_cap < 1:
            raise ValueError("position_cap must be >= 1")

    def template(self) -> PromptTemplate:
        extra = load_templates(self.templates_file) if self.templates_file else None
        return get_template(self.template_id, extra)

    def to_flat(self) -> dict:
        flat = {k: v for k, v in asdict(self).items() if k not in ("scorer", "ranker")}
        flat.update(asdict(self.scorer))
        flat.update(asdict(self.ranker))
        return flat

    @classmethod
    def from_flat(cls, flat: dict) -> "PipelineConfig":
        scorer_keys = ScorerConfig.__dataclass_fields__.keys()
        ranker_keys = RankerConfig.__dataclass_fields__.keys()
        own_keys = set(cls.__dataclass_fields__) - {"scorer", "ranker"}
        unknown = set(flat) - set(scorer_keys) - set(ranker_keys) - own_keys
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(
            scorer=ScorerConfig(**{k: flat[k] for k in scorer_keys if k in flat}),
            ranker=RankerConfig(**{k: flat[k] for k in ranker_keys if k in flat}),
            **{k: flat[k] for k in own_keys if k in flat},
        )


@dataclass
class DocumentScores:
    """Everything about one document that does not depend on alpha or gamma."""

    id: str
    doc: TaggedDocument
    candidates: list[Candidate]
    logprobs: dict[Candidate, CandidateLogProbs]

    def ranked(self, scorer: ScorerConfig, ranker: RankerConfig) -> list[ScoredCandidate]:
        pairs = [(c, score_candidate(self.logprobs[c], scorer)) for c in self.candidates if c in self.logprobs]
        return rank(pairs, self.doc, ranker)


class KeyphraseExtractor:
    def __init__(self, cfg: PipelineConfig = PipelineConfig(), backend: Seq2SeqBackend | None = None,
                 tagger: PerceptronTagger | None = None):
        self.cfg = cfg
        self.template = cfg.template()
        self.tagger = tagger or PerceptronTagger(cfg.tagger_weights_path)
        self.backend = backend if backend is not None else load_backend(cfg.backend, cfg.weights)

    def prepare(self, text: str) -> tuple[TaggedDocument, list[Candidate]]:
        doc = preprocess(text, self.tagger, self.cfg.position_cap)
        return doc, extract_candidates(doc)

    def score(self, text: str, doc_id: str = "<doc>", template: PromptTemplate | None = None,
              prepared: tuple[TaggedDocument, list[Candidate]] | None = None) -> DocumentScores:
        doc, cands = prepared or self.prepare(text)
        lps = candidate_logprobs(text, cands, template or self.template, self.backend, self.cfg.scorer, doc_id)
        return DocumentScores(doc_id, doc, cands, lps)

    def extract(self, text: str, doc_id: str = "<doc>") -> list[ScoredCandidate]:
        scores = self.score(text, doc_id)
        if not scores.candidates:
            log.info("document %s: no noun-phrase candidates", doc_id)
        return scores.ranked(self.cfg.scorer, self.cfg.ranker)


def extract_keyphrases(text: str, cfg: PipelineConfig = PipelineConfig(),
                       backend: Seq2SeqBackend | None = None) -> list[ScoredCandidate]:
    return KeyphraseExtractor(cfg, backend).extract(text)


# --------------------------------------------------------------------------
# corpus runs
# --------------------------------------------------------------------------


@dataclass
class CorpusRun:
    report: EvalReport
    predictions: dict[str, list[ScoredCandidate]]
    failures: dict[str, str] = field(default_factory=dict)
    scores: dict[str, DocumentScores] = field(default_factory=dict)


BackendFactory = Callable[[], Seq2SeqBackend]


def score_corpus(corpus: Sequence[CorpusRecord], cfg: PipelineConfig,
                 backend_factory: BackendFactory | None = None,
                 template: PromptTemplate | None = None) -> tuple[dict[str, DocumentScores], dict[str, str]]:
    """Score every document with ``cfg.workers`` threads, one backend per thread."""
    if not corpus:
        raise ValueError("empty corpus")
    factory = backend_factory or (lambda: load_backend(cfg.backend, cfg.weights))
    tagger = PerceptronTagger(cfg.tagger_weights_path)
    template = template or cfg.template()
    local = threading.local()

    def work(rec: CorpusRecord):
        ext = getattr(local, "extractor", None)
        if ext is None:
            ext = local.extractor = KeyphraseExtractor(cfg, factory(), tagger)
        try:
            return rec.id, ext.score(rec.text, rec.id, template), None
        except Exception as exc:  # one bad document must not sink the run
            log.error("document %s failed: %s", rec.id, exc)
            return rec.id, None, f"{type(exc).__name__}: {exc}"

    if cfg.workers == 1:
        results = [work(rec) for rec in corpus]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(work, corpus))
    scores = {i: s for i, s, err in results if err is None}
    failures = {i: err for i, _, err in results if err is not None}
    return scores, failures


def evaluate_scores(corpus: Sequence[CorpusRecord], scores: dict[str, DocumentScores],
                    cfg: PipelineConfig, ks: Sequence[int] = DEFAULT_KS, macro: bool = False,
                    failures: dict[str, str] | None = None) -> CorpusRun:
    predictions = {i: s.ranked(cfg.scorer, cfg.ranker) for i, s in scores.items()}
    report = evaluate_predictions(corpus, {i: [c.phrase for c in r] for i, r in predictions.items()},
                                  ks, macro, cfg.present_only, failures)
    return CorpusRun(report, predictions, dict(failures or {}), scores)


def evaluate_predictions(corpus: Sequence[CorpusRecord], ranked: dict[str, Sequence[str]],
                         ks: Sequence[int] = DEFAULT_KS, macro: bool = False, present_only: bool = False,
                         failures: dict[str, str] | None = None) -> EvalReport:
    """Evaluate ranked surface phrases per document; failed documents are left out."""
    failed = set(failures or ())
    kept = [rec for rec in corpus if rec.id not in failed]
    gold = {rec.id: prepare_gold(rec.gold, rec.text, present_only) for rec in kept}
    preds = {rec.id: prepare_predictions(ranked.get(rec.id, ())) for rec in kept}
    report = evaluate(preds, gold, ks, macro)
    report.failed = sorted(failed)
    return report


def run_corpus(corpus: Sequence[CorpusRecord], cfg: PipelineConfig, ks: Sequence[int] = DEFAULT_KS,
               backend_factory: BackendFactory | None = None, macro: bool = False) -> CorpusRun:
    scores, failures = score_corpus(corpus, cfg, backend_factory)
    return evaluate_scores(corpus, scores, cfg, ks, macro, failures)


# --------------------------------------------------------------------------
# predictions file
# --------------------------------------------------------------------------


def write_predictions(predictions: dict[str, list[ScoredCandidate]], path: str | os.PathLike,
                      order: Sequence[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id in order or sorted(predictions):
            if doc_id not in predictions:
                continue
            ranked = [{"phrase": c.phrase, "p": c.p_c, "r": c.r_c, "s": c.s_c} for c in predictions[doc_id]]
            fh.write(json.dumps({"id": doc_id, "ranked": ranked}, ensure_ascii=False) + "\n")


def read_predictions(path: str | os.PathLike) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[obj["id"]] = [entry["phrase"] for entry in obj["ranked"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: line {lineno}: malformed prediction record ({exc})") from None
    return out


def with_overrides(cfg: PipelineConfig, **kw) -> PipelineConfig:
    """Copy of ``cfg`` with flat keys replaced, e.g. ``alpha=0.4`` or ``template_id="len2-1"``."""
    flat = cfg.to_flat()
    flat.update(kw)
    return PipelineConfig.from_flat(flat)


__all__ = [
    "CorpusRun", "DocumentScores", "KeyphraseExtractor", "PipelineConfig", "evaluate_predictions",
    "evaluate_scores", "extract_keyphrases", "read_predictions", "run_corpus", "score_corpus",
    "with_overrides", "write_predictions",
]
