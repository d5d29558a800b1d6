import json

import pytest

from promptrank.backends.stub import StubBackend
from promptrank.corpus import CorpusRecord
from promptrank.preprocess import default_tagger

DOCS = [
    ("d1", "Deep learning models improve keyphrase extraction. Keyphrase extraction needs good candidates.",
     ["keyphrase extraction", "deep learning"]),
    ("d2", "The encoder reads the whole document while the decoder scores each candidate phrase.",
     ["candidate phrase", "decoder"]),
    ("d3", "Position information matters for long news articles and scientific papers.",
     ["position information", "news articles"]),
    ("d4", "Graph-based ranking methods such as TextRank build a word graph from co-occurrence.",
     ["word graph", "textrank"]),
]


@pytest.fixture(scope="session")
def tagger():
    return default_tagger()


@pytest.fixture
def stub():
    return StubBackend(seed=0)


@pytest.fixture
def toy_corpus():
    return [CorpusRecord(i, t, tuple(g)) for i, t, g in DOCS]


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "toy.jsonl"
    with open(path, "w") as fh:
        for i, t, g in DOCS:
            fh.write(json.dumps({"id": i, "text": t, "gold": g}) + "\n")
    return path


@pytest.fixture(scope="session")
def tiny_t5(tmp_path_factory):
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    pytest.importorskip("tokenizers")
    from tiny_models import build_t5

    path = tmp_path_factory.mktemp("models") / "tt5"
    build_t5(path)
    return path


@pytest.fixture(scope="session")
def tiny_bart(tmp_path_factory):
    pytest.importorskip("torch")
    pytest.importorskip("transformers")
    pytest.importorskip("tokenizers")
    from tiny_models import build_bart

    path = tmp_path_factory.mktemp("models") / "tbart"
    build_bart(path)
    return path



_CRITERIA = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = (m.args[0], m.args[1], item.name)


def pytest_runtest_logreport(report):
    info = getattr(report, "criterion", None)
    if info is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.append((info, report.outcome, report))


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion test."""
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title, name), outcome, rep in sorted(_CRITERIA, key=lambda x: (x[0][0], x[0][2])):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[outcome]
        line = f"criterion {n}: {status}  {title} [{name}]"
        if outcome == "skipped" and isinstance(rep.longrepr, tuple):
            line += f" - {rep.longrepr[2]}"
        terminalreporter.write_line(line)
