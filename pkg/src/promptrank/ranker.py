"""Position penalty and final ranking.

``beta = gamma / len**3`` damps the position term for short documents;
``r = pos / len + beta`` multiplies the (negative) prompt score, so the
final score ``s = r * p`` drops faster for candidates that first appear late.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .candidates import Candidate, clamp_position
from .preprocess import TaggedDocument

DEFAULT_GAMMA = 1.2e8


@dataclass(frozen=True)
class RankerConfig:
    gamma: float = DEFAULT_GAMMA
    use_position: bool = True
    top_k: int = 15

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass(frozen=True)
class ScoredCandidate:
    candidate: Candidate
    p_c: float
    r_c: float
    s_c: float
    rank: int
    predicted: bool

    @property
    def phrase(self) -> str:
        return self.candidate.normalized


def beta(len_effective: int, gamma: float = DEFAULT_GAMMA) -> float:
    if len_effective < 1:
        raise ValueError("document length must be >= 1")
    return gamma / float(len_effective) ** 3


def position_penalty(pos: int, len_effective: int, beta_value: float) -> float:
    if not 0 <= pos <= len_effective:
        raise ValueError(f"position {pos} outside [0, {len_effective}]")
    if not beta_value > 0:
        raise ValueError("beta must be > 0")
    return pos / len_effective + beta_value


def final_score(p_c: float, r_c: float) -> float:
    return r_c * p_c


def rank(scored: Iterable[tuple[Candidate, float]], doc: TaggedDocument,
         cfg: RankerConfig = RankerConfig()) -> list[ScoredCandidate]:
    """Sort candidates by final score, best (closest to zero) first.

    Ties go to the earlier first occurrence, then to the lexicographically
    smaller normalized form, so the order is total.
    """
    scored = list(scored)
    if not scored:
        return []
    length = doc.len_effective
    b = beta(length, cfg.gamma) if cfg.use_position else None
    rows = []
    for cand, p in scored:
        if p > 0:
            raise ValueError(f"{cand.surface!r}: prompt score {p} is positive")
        r = position_penalty(clamp_position(cand, doc), length, b) if cfg.use_position else 1.0
        rows.append((cand, p, r, final_score(p, r)))
    rows.sort(key=lambda row: (-row[3], row[0].first_pos, row[0].normalized))
    return [
        ScoredCandidate(cand, p, r, s, i, i <= cfg.top_k)
        for i, (cand, p, r, s) in enumerate(rows, 1)
    ]
