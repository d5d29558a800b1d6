"""Convert a benchmark in the docsutf8/keys layout to the JSONL corpus format.

The layout has one ``<id>.txt`` per document under ``docsutf8/`` and one
``<id>.key`` per document under ``keys/`` with a gold phrase per line.

    python scripts/convert_corpus.py Inspec/ inspec.jsonl
"""
from __future__ import annotations

import argparse
import os
import sys

from promptrank.corpus import CorpusRecord, save_corpus


def convert(root: str) -> list[CorpusRecord]:
    docs_dir, keys_dir = os.path.join(root, "docsutf8"), os.path.join(root, "keys")
    records = []
    for name in sorted(os.listdir(docs_dir)):
        doc_id, ext = os.path.splitext(name)
        if ext != ".txt":
            continue
        with open(os.path.join(docs_dir, name), encoding="utf-8") as fh:
            text = " ".join(fh.read().split())
        key_path = os.path.join(keys_dir, doc_id + ".key")
        if not os.path.exists(key_path):
            print(f"warning: no keys for {doc_id}, skipped", file=sys.stderr)
            continue
        with open(key_path, encoding="utf-8") as fh:
            gold = [" ".join(line.split()) for line in fh if line.strip()]
        records.append(CorpusRecord(doc_id, text, tuple(gold)))
    return records


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root", help="directory containing docsutf8/ and keys/")
    ap.add_argument("output", help="JSONL file to write")
    args = ap.parse_args(argv)
    records = convert(args.root)
    save_corpus(records, args.output)
    print(f"wrote {len(records)} documents to {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
