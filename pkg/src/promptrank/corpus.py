"""Benchmark corpora in the canonical JSON-Lines layout.

One object per line: ``{"id": str, "text": str, "gold": [str, ...]}``.
Conversion from the upstream benchmark distributions lives in
``scripts/convert_corpus.py``.
"""
from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, asdict
from typing import Iterable, Sequence


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    text: str
    gold: tuple[str, ...] = ()

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise CorpusFormatError("record id must be a non-empty string")
        if not isinstance(self.text, str) or not self.text:
            raise CorpusFormatError(f"record {self.id!r}: text must be a non-empty string")
        object.__setattr__(self, "gold", tuple(self.gold))

    def to_json(self) -> str:
        d = asdict(self)
        d["gold"] = list(self.gold)
        return json.dumps(d, ensure_ascii=False)


@dataclass
class CorpusStats:
    n_doc: int
    avg_len_words: float
    total_candidates: int | None
    total_gold: int
    gold_length_histogram: dict[str, float]


def parse_corpus(lines: Iterable[str], source: str = "<corpus>") -> list[CorpusRecord]:
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{source}: line {lineno}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or not {"id", "text", "gold"} <= obj.keys():
            raise CorpusFormatError(f"{source}: line {lineno}: expected keys id, text, gold")
        gold = obj["gold"]
        if not isinstance(gold, list) or not all(isinstance(g, str) for g in gold):
            raise CorpusFormatError(f"{source}: line {lineno}: gold must be a list of strings")
        try:
            rec = CorpusRecord(obj["id"], obj["text"], tuple(gold))
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"{source}: line {lineno}: {exc}") from None
        if rec.id in seen:
            raise CorpusFormatError(f"{source}: line {lineno}: duplicate id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return records


def load_corpus(path: str | os.PathLike) -> list[CorpusRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh, os.fspath(path))


def save_corpus(records: Sequence[CorpusRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


LENGTH_BUCKETS = ("1", "2", "3", "4", ">=5")


def _bucket(n_words: int) -> str:
    return ">=5" if n_words >= 5 else str(n_words)


def compute_stats(corpus: Sequence[CorpusRecord],
                  candidates_per_doc: Sequence[int] | None = None) -> CorpusStats:
    """Aggregate statistics in the shape of the usual benchmark summary table.

    Document length counts whitespace-separated words of the raw text. Gold
    phrases are bucketed by word count into 1, 2, 3, 4 and ``>=5``; the
    histogram holds percentages of all gold phrases.
    """
    if not corpus:
        raise ValueError("cannot compute statistics of an empty corpus")
    lengths = [len(rec.text.split()) for rec in corpus]
    buckets = Counter(_bucket(len(g.split())) for rec in corpus for g in rec.gold if g.split())
    total_gold = sum(buckets.values())
    hist = {b: (100.0 * buckets[b] / total_gold if total_gold else 0.0) for b in LENGTH_BUCKETS}
    return CorpusStats(
        n_doc=len(corpus),
        avg_len_words=sum(lengths) / len(lengths),
        total_candidates=None if candidates_per_doc is None else int(sum(candidates_per_doc)),
        total_gold=total_gold,
        gold_length_histogram=hist,
    )
