import random
import re

from hypothesis import given, strategies as st

from promptrank.candidates import Candidate, clamp_position, extract_candidates, match_spans
from promptrank.preprocess import TaggedDocument

TAGSET = ["NN", "NNS", "NNP", "NNPS", "JJ", "JJR", "JJS", "DT", "VB", "VBZ", "IN", "CC", ",", "RB"]


def oracle_spans(tags):
    """Greedy maximal matches of (<NN.*|JJ>)*<NN.*> found by a regex over the tag string."""
    text = "".join(f"<{t}>" for t in tags)
    pattern = re.compile(r"(?:<NN[^>]*>|<JJ>)*<NN[^>]*>")
    starts = [0]
    for t in tags:
        starts.append(starts[-1] + len(t) + 2)
    index = {off: i for i, off in enumerate(starts)}
    return [(index[m.start()], index[m.end()]) for m in pattern.finditer(text)]


def doc_of(tokens, tags, cap=512):
    return TaggedDocument(list(tokens), list(tags), cap)


def test_single_phrase():
    cands = extract_candidates(doc_of(["efficient", "keyphrase", "extraction"], ["JJ", "NN", "NN"]))
    assert [(c.surface, c.first_pos) for c in cands] == [("efficient keyphrase extraction", 0)]


def test_needs_final_noun():
    assert extract_candidates(doc_of(["the", "big"], ["DT", "JJ"])) == []


def test_dedup_keeps_earliest():
    cands = extract_candidates(doc_of(["cats", "chase", "Cats"], ["NNS", "VBP", "NNS"]))
    assert [(c.normalized, c.first_pos) for c in cands] == [("cats", 0)]


def test_trailing_adjective_trimmed():
    cands = extract_candidates(doc_of(["neural", "networks", "good", "."], ["JJ", "NNS", "JJ", "."]))
    assert [c.surface for c in cands] == ["neural networks"]


def test_comparative_adjective_breaks_phrase():
    cands = extract_candidates(doc_of(["larger", "model", "size"], ["JJR", "NN", "NN"]))
    assert [c.surface for c in cands] == ["model size"]


def test_max_words():
    doc = doc_of(["a", "b", "c", "d"], ["NN", "NN", "VB", "NN"])
    assert [c.surface for c in extract_candidates(doc, max_words=1)] == ["d"]


def test_clamp_position():
    doc = doc_of(["x"] * 1000, ["NN"] * 1000)
    assert clamp_position(Candidate("a", "a", 10, 1), doc) == 10
    assert clamp_position(Candidate("a", "a", 900, 1), doc) == 511
    assert clamp_position(Candidate("a", "a", 0, 1), doc) == 0


def test_oracle_random_sequences():
    rng = random.Random(7)
    for _ in range(1000):
        tags = [rng.choice(TAGSET) for _ in range(rng.randint(0, 20))]
        assert match_spans(tags) == oracle_spans(tags), tags


@given(st.lists(st.sampled_from(TAGSET), max_size=30))
def test_oracle_property(tags):
    assert match_spans(tags) == oracle_spans(tags)
    tokens = [f"w{i % 5}" for i in range(len(tags))]
    cands = extract_candidates(doc_of(tokens, tags))
    keys = [c.normalized for c in cands]
    assert len(keys) == len(set(keys))
    assert [c.first_pos for c in cands] == sorted(c.first_pos for c in cands)
