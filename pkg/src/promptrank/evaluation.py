"""F1@K against gold keyphrases.

Predictions and gold phrases are compared after lowercasing and Porter
stemming every word; stemmed duplicates among the predictions are dropped
before the top-K cut. Counts are micro-aggregated over the corpus by default.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .stemmer import porter_stem

DEFAULT_KS = (5, 10, 15)


def normalize_phrase(phrase: str) -> str:
    return " ".join(porter_stem(w) for w in phrase.lower().split())


def dedup(phrases: Iterable[str]) -> list[str]:
    seen = set()
    out = []
    for p in phrases:
        if p and p not in seen:
            seen.add(p)
            out.append(p)
    return out


def prepare_predictions(phrases: Iterable[str]) -> list[str]:
    """Normalize ranked phrases and drop stemmed duplicates, keeping rank order."""
    return dedup(normalize_phrase(p) for p in phrases)


def prepare_gold(phrases: Iterable[str], text: str | None = None, present_only: bool = False) -> set[str]:
    gold = {normalize_phrase(p) for p in phrases}
    gold.discard("")
    if present_only:
        if text is None:
            raise ValueError("present_only needs the document text")
        gold = {g for g in gold if occurs_in(g, text)}
    return gold


def occurs_in(normalized: str, text: str) -> bool:
    from .preprocess import tokenize

    doc = [porter_stem(t.lower()) for t in tokenize(text)]
    target = normalized.split()
    n = len(target)
    return any(doc[i: i + n] == target for i in range(len(doc) - n + 1))


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class Counts:
    correct: int
    predicted: int
    gold: int


def f1_score(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass
class EvalReport:
    per_k: dict[int, Metrics]
    counts: dict[int, Counts]
    averaging: str = "micro"
    n_docs: int = 0
    failed: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": {str(k): {"p": m.precision, "r": m.recall, "f1": m.f1} for k, m in sorted(self.per_k.items())},
            "counts": {str(k): {"correct": c.correct, "predicted": c.predicted, "gold": c.gold}
                       for k, c in sorted(self.counts.items())},
            "averaging": self.averaging,
            "n_docs": self.n_docs,
            "failed": sorted(self.failed),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _doc_counts(preds: Sequence[str], gold: set[str], k: int) -> Counts:
    top = preds[:k]
    return Counts(sum(1 for p in top if p in gold), len(top), len(gold))


def evaluate(predictions: Mapping[str, Sequence[str]], gold: Mapping[str, Iterable[str]],
             ks: Sequence[int] = DEFAULT_KS, macro: bool = False) -> EvalReport:
    """Precision, recall and F1 at each cutoff.

    ``predictions`` maps document ids to ranked, normalized phrases and
    ``gold`` maps the same ids to normalized gold phrases. A document missing
    from ``predictions`` contributes no predictions; its gold still counts.
    """
    if not ks:
        raise ValueError("need at least one cutoff")
    if any(k < 1 for k in ks):
        raise ValueError("cutoffs must be >= 1")
    ids = sorted(set(gold) | set(predictions))
    preds = {i: dedup(predictions.get(i, ())) for i in ids}
    golds = {i: set(gold.get(i, ())) for i in ids}

    per_k, counts = {}, {}
    for k in sorted(set(ks)):
        docs = [_doc_counts(preds[i], golds[i], k) for i in ids]
        total = Counts(sum(c.correct for c in docs), sum(c.predicted for c in docs), sum(c.gold for c in docs))
        counts[k] = total
        if macro:
            ps = [c.correct / c.predicted if c.predicted else 0.0 for c in docs]
            rs = [c.correct / c.gold if c.gold else 0.0 for c in docs]
            n = len(docs) or 1
            per_k[k] = Metrics(sum(ps) / n, sum(rs) / n, sum(f1_score(p, r) for p, r in zip(ps, rs)) / n)
        else:
            p = total.correct / total.predicted if total.predicted else 0.0
            r = total.correct / total.gold if total.gold else 0.0
            per_k[k] = Metrics(p, r, f1_score(p, r))
    return EvalReport(per_k, counts, "macro" if macro else "micro", len(ids))
