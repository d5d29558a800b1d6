"""Encoder/decoder prompt templates.

``[D]`` marks where the document goes in the encoder template and ``[C]``
where the candidate goes in the decoder template. The candidate must come
last so that every candidate of a document shares the same decoder prefix.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass

DOC_SLOT = "[D]"
CAND_SLOT = "[C]"


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    encoder_template: str
    decoder_template: str

    def __post_init__(self):
        if not self.id:
            raise TemplateError("template id must be non-empty")
        if self.encoder_template.count(DOC_SLOT) != 1:
            raise TemplateError(f"{self.id}: encoder template needs exactly one {DOC_SLOT}")
        if self.decoder_template.count(CAND_SLOT) != 1:
            raise TemplateError(f"{self.id}: decoder template needs exactly one {CAND_SLOT}")
        if not self.decoder_template.endswith(CAND_SLOT):
            raise TemplateError(f"{self.id}: {CAND_SLOT} must end the decoder template")
        if DOC_SLOT in self.decoder_template or CAND_SLOT in self.encoder_template:
            raise TemplateError(f"{self.id}: placeholder on the wrong side")

    @property
    def decoder_prefix_len_words(self) -> int:
        return len(render_decoder_prefix(self).split())

    def to_dict(self) -> dict:
        return {"id": self.id, "encoder": self.encoder_template, "decoder": self.decoder_template}


def render_encoder(template: PromptTemplate, doc_text: str) -> str:
    return template.encoder_template.replace(DOC_SLOT, doc_text)


def render_decoder_prefix(template: PromptTemplate) -> str:
    return template.decoder_template[: -len(CAND_SLOT)]


def render_decoder(template: PromptTemplate, candidate: str) -> str:
    return render_decoder_prefix(template) + candidate


_BOOK = 'Book:"[D]"'

# (id, encoder, decoder) in registry order
_BUILTIN = [
    # template length study, grouped by decoder prefix length
    ("len0-1", _BOOK, "[C]"),
    ("len2-1", _BOOK, "Book about [C]"),
    ("len2-2", _BOOK, "It is [C]"),
    ("len2-3", _BOOK, "Keywords are [C]"),
    ("len2-4", _BOOK, "Talk about [C]"),
    ("len5-1", _BOOK, "This book are mainly about [C]"),
    ("len5-2", _BOOK, "This book mainly focuses on [C]"),
    ("len5-3", _BOOK, "This book mainly talks about [C]"),
    ("len5-4", _BOOK, "This book pays attention to [C]"),
    ("len10-1", _BOOK, "All in all, the core of this book is [C]"),
    ("len10-2", _BOOK, "Read this book and tell me that it is about [C]"),
    ("len10-3", _BOOK, "Take a look at the full book, it involves [C]"),
    # the misspelling is part of the evaluated prompt
    ("len10-4", _BOOK, "Think carefully, this book has somthing to do with [C]"),
    ("len20-1", _BOOK, "Please read this book carefully from beginning to end and just give your "
                       "conclusion, this book mainly focuses on [C]"),
    ("len20-2", _BOOK, "The book describes something so interesting, please read it carefully and "
                       "tell us that this book is about [C]"),
    ("len20-3", _BOOK, "The book is interesting, please read it carefully and summarize its main "
                       "points with a few keywords like [C]"),
    ("len20-4", _BOOK, "Through careful reading and adequate analysis, we have come to the "
                       "conclusion that this book mainly talks about [C]"),
    # template content study
    ("len5-keywords", _BOOK, "Keywords of this book are [C]"),
    # noun word study
    ("noun-passage", 'Passage:"[D]"', "This passage mainly talks about [C]"),
    ("noun-news", 'News:"[D]"', "This news mainly talks about [C]"),
    ("noun-text", 'Text:"[D]"', "This text mainly talks about [C]"),
    ("noun-paper", 'Paper:"[D]"', "This paper mainly talks about [C]"),
]

ALIASES = {
    "default": "len5-3",
    "len5-default": "len5-3",
    "noun-book": "len5-3",
    "empty": "len0-1",
}

DEFAULT_TEMPLATE_ID = "len5-3"

# Numbered templates of the content comparison, in table order.
CONTENT_STUDY = ("len0-1", "len5-keywords", "len5-2", "len5-3", "noun-passage")
LENGTH_GROUPS = {
    0: ("len0-1",),
    2: ("len2-1", "len2-2", "len2-3", "len2-4"),
    5: ("len5-1", "len5-2", "len5-3", "len5-4"),
    10: ("len10-1", "len10-2", "len10-3", "len10-4"),
    20: ("len20-1", "len20-2", "len20-3", "len20-4"),
}

_REGISTRY = {tid: PromptTemplate(tid, enc, dec) for tid, enc, dec in _BUILTIN}


def builtin_registry() -> list[PromptTemplate]:
    return list(_REGISTRY.values())


def load_templates(path: str | os.PathLike) -> list[PromptTemplate]:
    """Read user templates from a JSON list of ``{"id", "encoder", "decoder"}`` objects."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = [data]
    out = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or not {"id", "encoder", "decoder"} <= entry.keys():
            raise TemplateError(f"{path}: entry {i} needs keys id, encoder, decoder")
        out.append(PromptTemplate(entry["id"], entry["encoder"], entry["decoder"]))
    return out


def get_template(template_id: str, extra: list[PromptTemplate] | None = None) -> PromptTemplate:
    for t in extra or ():
        if t.id == template_id:
            return t
    key = ALIASES.get(template_id, template_id)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise TemplateError(f"unknown template id {template_id!r}") from None
