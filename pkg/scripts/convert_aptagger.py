"""Convert the pickled ``textblob-aptagger`` model into the JSON weights layout.

Usage::

    pip download textblob-aptagger==0.2.0 --no-deps -d /tmp/ap
    python scripts/convert_aptagger.py /tmp/ap/textblob_aptagger-0.2.0-py2.py3-none-any.whl \
        src/promptrank/data/tagger-en.json.gz

The source model is an averaged perceptron trained on WSJ sections of the Penn
Treebank (MIT licensed). Weights are rounded to 3 decimals, which is the
precision they were pickled with.
"""
import gzip
import json
import pickle
import sys
import zipfile

from promptrank.preprocess import TAGGER_FORMAT, TAGGER_VERSION


def main(wheel_path, out_path):
    with zipfile.ZipFile(wheel_path) as zf:
        raw = zf.read("textblob_aptagger/trontagger-0.1.0.pickle")
    weights, tagdict, classes = pickle.loads(raw, encoding="latin1")
    payload = {
        "format": TAGGER_FORMAT,
        "version": TAGGER_VERSION,
        "source": "textblob-aptagger 0.2.0 (trontagger-0.1.0)",
        "classes": sorted(classes),
        "tagdict": dict(sorted(tagdict.items())),
        "weights": {
            feat: {tag: round(w, 3) for tag, w in sorted(ws.items()) if w != 0}
            for feat, ws in sorted(weights.items())
        },
    }
    with gzip.GzipFile(out_path, "wb", mtime=0) as fh:
        fh.write(json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode("utf-8"))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
