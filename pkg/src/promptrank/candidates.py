"""Noun-phrase candidate extraction over POS tag sequences.

A candidate is a maximal run of tokens tagged ``JJ`` or ``NN*`` trimmed back
to its last noun, i.e. the greedy match of ``(<NN.*|JJ>)*<NN.*>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .preprocess import TaggedDocument

_NOUN = re.compile(r"NN.*")


def is_noun(tag: str) -> bool:
    return _NOUN.fullmatch(tag) is not None


def is_modifier(tag: str) -> bool:
    return tag == "JJ" or is_noun(tag)


@dataclass(frozen=True)
class Candidate:
    surface: str
    normalized: str
    first_pos: int
    word_len: int

    def __post_init__(self):
        if self.word_len < 1:
            raise ValueError("candidate must span at least one word")
        if self.first_pos < 0:
            raise ValueError("first_pos must be >= 0")


def match_spans(tags: list[str]) -> list[tuple[int, int]]:
    """Half-open ``(start, end)`` spans of every maximal pattern match."""
    spans = []
    i, n = 0, len(tags)
    while i < n:
        if not is_modifier(tags[i]):
            i += 1
            continue
        start = i
        last_noun = -1
        while i < n and is_modifier(tags[i]):
            if is_noun(tags[i]):
                last_noun = i
            i += 1
        if last_noun >= 0:
            spans.append((start, last_noun + 1))
    return spans


def extract_candidates(doc: TaggedDocument, max_words: int | None = None) -> list[Candidate]:
    """Deduplicated candidates ordered by first occurrence.

    Duplicates are detected on the lowercased surface form; the earliest
    occurrence wins. ``max_words`` drops longer phrases when given.
    """
    seen: dict[str, Candidate] = {}
    for start, end in match_spans(doc.tags):
        if max_words is not None and end - start > max_words:
            continue
        surface = " ".join(doc.tokens[start:end])
        key = surface.lower()
        if key not in seen:
            seen[key] = Candidate(surface, key, start, end - start)
    return list(seen.values())


def clamp_position(candidate: Candidate, doc: TaggedDocument) -> int:
    return min(candidate.first_pos, max(doc.len_effective - 1, 0))
