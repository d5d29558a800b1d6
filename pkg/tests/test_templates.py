import json

import pytest

from promptrank.templates import (CONTENT_STUDY, DEFAULT_TEMPLATE_ID, LENGTH_GROUPS, PromptTemplate, TemplateError,
                                  builtin_registry, get_template, load_templates, render_decoder,
                                  render_decoder_prefix, render_encoder)


def test_render_encoder():
    book = PromptTemplate("t", 'Book:"[D]"', "[C]")
    assert render_encoder(book, "AI.") == 'Book:"AI."'
    assert render_encoder(PromptTemplate("i", "[D]", "[C]"), "x") == "x"
    assert render_encoder(book, 'say "hi"') == 'Book:"say "hi""'


@pytest.mark.parametrize("decoder, prefix", [
    ("This book mainly talks about [C]", "This book mainly talks about "),
    ("[C]", ""),
    ("Keywords of this book are [C]", "Keywords of this book are "),
])
def test_decoder_prefix(decoder, prefix):
    t = PromptTemplate("t", "[D]", decoder)
    assert render_decoder_prefix(t) == prefix
    assert render_decoder(t, "deep learning") == prefix + "deep learning"


def test_default_lookup():
    t = get_template("default")
    assert t.encoder_template == 'Book:"[D]"'
    assert t.decoder_template == "This book mainly talks about [C]"
    assert get_template("len5-default") == t == get_template(DEFAULT_TEMPLATE_ID)


def test_registry_wellformed():
    reg = builtin_registry()
    ids = [t.id for t in reg]
    assert len(ids) == len(set(ids))
    for t in reg:
        assert t.encoder_template.count("[D]") == 1
        assert t.decoder_template.endswith("[C]")
    for group, members in LENGTH_GROUPS.items():
        for tid in members:
            # group labels are nominal; several templates are a word or two short
            assert abs(get_template(tid).decoder_prefix_len_words - group) <= 2
    for tid in CONTENT_STUDY:
        get_template(tid)


@pytest.mark.parametrize("enc, dec", [
    ("no slot", "[C]"),
    ("[D][D]", "[C]"),
    ("[D]", "[C] trailing"),
    ("[D]", "no slot"),
])
def test_invalid_templates(enc, dec):
    with pytest.raises(TemplateError):
        PromptTemplate("bad", enc, dec)


def test_unknown_id():
    with pytest.raises(TemplateError):
        get_template("len99-9")


def test_load_templates_file(tmp_path):
    p = tmp_path / "t.json"
    p.write_text(json.dumps([{"id": "mine", "encoder": "Paper: [D]", "decoder": "It is about [C]"}]))
    extra = load_templates(p)
    assert get_template("mine", extra).decoder_template == "It is about [C]"
    p.write_text(json.dumps([{"id": "mine", "encoder": "Paper", "decoder": "[C]"}]))
    with pytest.raises(TemplateError):
        load_templates(p)
