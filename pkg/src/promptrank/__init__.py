"""Unsupervised keyphrase extraction by prompting an encoder-decoder language model."""
from .candidates import Candidate, extract_candidates
from .evaluation import EvalReport, evaluate, normalize_phrase
from .pipeline import KeyphraseExtractor, PipelineConfig, extract_keyphrases, run_corpus
from .ranker import RankerConfig, ScoredCandidate, beta, rank
from .scorer import ScorerConfig, score_candidate

__version__ = "0.1.0"

__all__ = [
    "Candidate", "EvalReport", "KeyphraseExtractor", "PipelineConfig", "RankerConfig", "ScoredCandidate",
    "ScorerConfig", "beta", "evaluate", "extract_candidates", "extract_keyphrases", "normalize_phrase",
    "rank", "run_corpus", "score_candidate",
]
