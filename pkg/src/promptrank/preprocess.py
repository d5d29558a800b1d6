"""Word tokenization and part-of-speech tagging.

The tagger is a greedy averaged perceptron over Penn Treebank tags. Its
weights live in a gzip-compressed JSON file::

    {"format": "promptrank-perceptron-tagger", "version": 1,
     "classes": [...], "tagdict": {word: tag}, "weights": {feature: {tag: w}}}

``tagdict`` short-circuits unambiguous frequent words; every other token is
scored with the feature template in :meth:`PerceptronTagger._features`, which
must stay in sync with the weights it was trained with.
"""
from __future__ import annotations

import gzip
import json
import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Protocol

TAGGER_FORMAT = "promptrank-perceptron-tagger"
TAGGER_VERSION = 1
DEFAULT_TAGGER_PATH = os.path.join(os.path.dirname(__file__), "data", "tagger-en.json.gz")
DEFAULT_POSITION_CAP = 512


class TaggerLoadError(RuntimeError):
    pass


@dataclass(frozen=True)
class TaggedDocument:
    tokens: list[str]
    tags: list[str]
    position_cap: int = DEFAULT_POSITION_CAP
    text: str = field(default="", compare=False)

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError(f"{len(self.tokens)} tokens but {len(self.tags)} tags")
        if self.position_cap < 1:
            raise ValueError("position_cap must be >= 1")
        for tag in self.tags:
            if not tag or (tag[0].isalpha() and not tag[0].isupper()):
                raise ValueError(f"malformed tag {tag!r}")

    @property
    def len_effective(self) -> int:
        return min(len(self.tokens), self.position_cap)

    @classmethod
    def from_pairs(cls, pairs, position_cap=DEFAULT_POSITION_CAP, text=None) -> "TaggedDocument":
        tokens = [tok for tok, _ in pairs]
        tags = [tag for _, tag in pairs]
        return cls(tokens, tags, position_cap, text if text is not None else " ".join(tokens))


# --------------------------------------------------------------------------
# tokenizer
# --------------------------------------------------------------------------

# Words whose trailing period belongs to the word.
_ABBREVIATIONS = frozenset(
    "mr mrs ms dr prof sr jr st vs etc al fig figs eq eqs no vol pp inc ltd co corp dept univ approx".split()
)

_RULES: list[tuple[re.Pattern, str]] = [
    # opening quotes
    (re.compile(r'^"'), "``"),
    (re.compile(r"(``)"), r" \1 "),
    (re.compile(r'([ (\[{<])(")'), r"\1 `` "),
    # punctuation
    (re.compile(r"([:,])([^\d])"), r" \1 \2"),
    (re.compile(r"([:,])$"), r" \1 "),
    (re.compile(r"\.\.\."), " ... "),
    (re.compile(r"[;@#$%&]"), r" \g<0> "),
    (re.compile(r"[?!]"), r" \g<0> "),
    (re.compile(r"([^'])' "), r"\1 ' "),
    (re.compile(r"[\]\[(){}<>]"), r" \g<0> "),
    (re.compile(r"--"), " -- "),
    # closing quotes and clitics
    (re.compile(r'"'), " '' "),
    (re.compile(r"(\S)('')"), r"\1 \2 "),
    (re.compile(r"([^' ])('[sS]|'[mM]|'[dD]|') "), r"\1 \2 "),
    (re.compile(r"([^' ])('ll|'LL|'re|'RE|'ve|'VE|n't|N'T) "), r"\1 \2 "),
]


def _split_period(word: str) -> list[str]:
    if len(word) < 2 or not word.endswith(".") or word.endswith(".."):
        return [word]
    stem = word[:-1]
    if "." in stem or stem.lower() in _ABBREVIATIONS:
        return [word]
    if len(stem) == 1 and stem.isalpha() and stem.isupper():  # initials
        return [word]
    return [stem, "."]


def tokenize(text: str) -> list[str]:
    """Split raw text into Penn-Treebank-style word tokens.

    Punctuation is separated from words, hyphenated compounds stay whole and
    a period is split off a word unless it looks like an abbreviation.

    >>> tokenize("Deep learning works.")
    ['Deep', 'learning', 'works', '.']
    """
    text = " " + text.strip() + " "
    if not text.strip():
        return []
    for pattern, repl in _RULES:
        text = pattern.sub(repl, text)
    words = []
    for word in text.split():
        words.extend(_split_period(word))
    # clitics exposed by period splitting, e.g. "John's."
    text = " " + " ".join(words) + " "
    for pattern, repl in _RULES[-2:]:
        text = pattern.sub(repl, text)
    return text.split()


# --------------------------------------------------------------------------
# taggers
# --------------------------------------------------------------------------


class Tagger(Protocol):
    def tag(self, tokens: list[str]) -> list[str]: ...


# Treebank spellings of brackets, which is what the weights were trained on.
_PTB_ESCAPES = {"(": "-LRB-", "[": "-LRB-", "{": "-LRB-", "<": "-LRB-",
                ")": "-RRB-", "]": "-RRB-", "}": "-RRB-", ">": "-RRB-"}


class PerceptronTagger:
    """Greedy averaged-perceptron POS tagger backed by a weights file."""

    START = ("-START-", "-START2-")
    END = ("-END-", "-END2-")

    def __init__(self, path: str | os.PathLike = DEFAULT_TAGGER_PATH):
        self.path = os.fspath(path)
        self.weights, self.tagdict, self.classes = self._load(self.path)

    @staticmethod
    def _load(path):
        try:
            with gzip.open(path, "rt", encoding="utf-8") as fh:
                payload = json.load(fh)
        except FileNotFoundError as exc:
            raise TaggerLoadError(f"tagger weights not found: {path}") from exc
        except (OSError, EOFError, ValueError) as exc:
            raise TaggerLoadError(f"corrupt tagger weights file {path}: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("format") != TAGGER_FORMAT:
            raise TaggerLoadError(f"{path} is not a {TAGGER_FORMAT} file")
        if payload.get("version") != TAGGER_VERSION:
            raise TaggerLoadError(f"unsupported tagger weights version {payload.get('version')!r}")
        try:
            classes = tuple(sorted(payload["classes"]))
            tagdict = dict(payload["tagdict"])
            weights = {k: dict(v) for k, v in payload["weights"].items()}
        except (KeyError, TypeError, AttributeError) as exc:
            raise TaggerLoadError(f"corrupt tagger weights file {path}: {exc}") from exc
        if not classes:
            raise TaggerLoadError(f"{path} declares no tag classes")
        return weights, tagdict, classes

    @staticmethod
    def _normalize(word: str) -> str:
        if "-" in word and word[0] != "-":
            return "!HYPHEN"
        if word.isdigit() and len(word) == 4:
            return "!YEAR"
        if word[0].isdigit():
            return "!DIGITS"
        return word.lower()

    @staticmethod
    def _features(i, word, context, prev, prev2) -> Iterator[str]:
        i += 2
        yield "bias"
        yield "i suffix " + word[-3:]
        yield "i pref1 " + word[0]
        yield "i-1 tag " + prev
        yield "i-2 tag " + prev2
        yield f"i tag+i-2 tag {prev} {prev2}"
        yield "i word " + context[i]
        yield f"i-1 tag+i word {prev} {context[i]}"
        yield "i-1 word " + context[i - 1]
        yield "i-1 suffix " + context[i - 1][-3:]
        yield "i-2 word " + context[i - 2]
        yield "i+1 word " + context[i + 1]
        yield "i+1 suffix " + context[i + 1][-3:]
        yield "i+2 word " + context[i + 2]

    def _predict(self, features: Iterable[str]) -> str:
        scores = dict.fromkeys(self.classes, 0.0)
        for feat in features:
            for label, weight in self.weights.get(feat, {}).items():
                if label in scores:
                    scores[label] += weight
        # ties resolved towards the lexicographically greatest label
        return max(self.classes, key=lambda label: (scores[label], label))

    def tag(self, tokens: list[str]) -> list[str]:
        if not tokens:
            raise ValueError("cannot tag an empty token list")
        tokens = [_PTB_ESCAPES.get(w, w) for w in tokens]
        prev, prev2 = self.START
        context = list(self.START) + [self._normalize(w) for w in tokens] + list(self.END)
        tags = []
        for i, word in enumerate(tokens):
            tag = self.tagdict.get(word)
            if not tag:
                tag = self._predict(self._features(i, word, context, prev, prev2))
            tags.append(tag)
            prev2, prev = prev, tag
        return tags


def pos_tag(tokens: list[str], tagger: Tagger | None = None) -> list[str]:
    return (tagger or default_tagger()).tag(tokens)


_DEFAULT_TAGGER: PerceptronTagger | None = None


def default_tagger() -> PerceptronTagger:
    global _DEFAULT_TAGGER
    if _DEFAULT_TAGGER is None:
        _DEFAULT_TAGGER = PerceptronTagger()
    return _DEFAULT_TAGGER


def preprocess(text: str, tagger: Tagger | None = None,
               position_cap: int = DEFAULT_POSITION_CAP) -> TaggedDocument:
    tokens = tokenize(text)
    tags = pos_tag(tokens, tagger) if tokens else []
    return TaggedDocument(tokens, tags, position_cap, text)


def read_pretagged(lines: Iterable[str]) -> list[list[tuple[str, str]]]:
    """Parse ``token<TAB>tag`` lines; blank lines separate documents."""
    docs: list[list[tuple[str, str]]] = []
    current: list[tuple[str, str]] = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip():
            if current:
                docs.append(current)
                current = []
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ValueError(f"line {lineno}: expected 'token<TAB>tag', got {line!r}")
        current.append((parts[0], parts[1]))
    if current:
        docs.append(current)
    return docs
