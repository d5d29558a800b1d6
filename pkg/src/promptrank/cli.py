"""Command line interface.

Exit codes: 0 success, 2 usage or input error, 3 backend or scoring error.
Configuration precedence: command-line flags, then ``--config`` file (a flat
JSON object of the keys ``--print-config`` emits), then built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from typing import Sequence

from .backends import BACKEND_FAMILIES, BackendError
from .corpus import CorpusFormatError, compute_stats, load_corpus
from .evaluation import DEFAULT_KS
from .pipeline import (KeyphraseExtractor, PipelineConfig, evaluate_predictions, evaluate_scores,
                       read_predictions, score_corpus, with_overrides, write_predictions)
from .preprocess import TaggerLoadError
from .scorer import ScoringError
from .templates import LENGTH_GROUPS, TemplateError, get_template, load_templates

EXIT_USAGE = 2
EXIT_BACKEND = 3

log = logging.getLogger("promptrank")


class UsageError(Exception):
    pass


# flag dest -> PipelineConfig flat key
CONFIG_FLAGS = {
    "alpha": "alpha",
    "gamma": "gamma",
    "template": "template_id",
    "templates_file": "templates_file",
    "use_position": "use_position",
    "top_k": "top_k",
    "encoder_max_tokens": "encoder_max_tokens",
    "batch_size": "batch_size",
    "workers": "workers",
    "backend": "backend",
    "weights": "weights",
    "tagger_weights": "tagger_weights_path",
    "position_cap": "position_cap",
    "include_eos": "include_eos",
    "present_only": "present_only",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model and ranking")
    g.add_argument("--config", help="flat JSON config file")
    g.add_argument("--print-config", action="store_true", help="print the effective config and exit")
    g.add_argument("--alpha", type=float, help="length normalization exponent (default 0.6)")
    g.add_argument("--gamma", type=float, help="position damping constant (default 1.2e8)")
    g.add_argument("--template", help="template id (default len5-3)")
    g.add_argument("--templates-file", help="JSON file with extra templates")
    g.add_argument("--no-position", dest="use_position", action="store_const", const=False,
                   help="rank by prompt probability only")
    g.add_argument("--top-k", type=int, help="number of phrases flagged as predictions")
    g.add_argument("--encoder-max-tokens", type=int)
    g.add_argument("--batch-size", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--backend", choices=BACKEND_FAMILIES)
    g.add_argument("--weights", help="model directory (stub: seed=N)")
    g.add_argument("--tagger-weights", help="POS tagger weights file")
    g.add_argument("--position-cap", type=int)
    g.add_argument("--include-eos", action="store_const", const=True,
                   help="count the end-of-sequence token as part of the candidate")
    g.add_argument("--present-only", action="store_const", const=True,
                   help="ignore gold phrases that do not occur in the document")


def build_config(args: argparse.Namespace) -> PipelineConfig:
    flat = PipelineConfig().to_flat()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(from_file, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
        flat.update(from_file)
    for dest, key in CONFIG_FLAGS.items():
        value = getattr(args, dest, None)
        if value is not None:
            flat[key] = value
    try:
        return PipelineConfig.from_flat(flat)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _parse_ks(text: str) -> list[int]:
    try:
        ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad K list {text!r}") from None
    if not ks or any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("K values must be positive integers")
    return ks


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _extractor(cfg: PipelineConfig) -> KeyphraseExtractor:
    return KeyphraseExtractor(cfg)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_extract(args, cfg: PipelineConfig) -> int:
    text = _read_text(args.input)
    ranked = _extractor(cfg).extract(text, doc_id=args.input)
    if args.json:
        out = [{"rank": c.rank, "phrase": c.phrase, "surface": c.candidate.surface,
                "position": c.candidate.first_pos, "p": c.p_c, "r": c.r_c, "s": c.s_c,
                "predicted": c.predicted} for c in ranked]
        print(json.dumps(out, indent=2, ensure_ascii=False))
    else:
        for c in ranked:
            if c.predicted:
                print(c.phrase)
    return 0


def _load_corpora(paths: Sequence[str]):
    out = []
    for path in paths:
        try:
            out.append((os.path.splitext(os.path.basename(path))[0], load_corpus(path)))
        except OSError as exc:
            raise UsageError(f"cannot read corpus {path}: {exc}") from None
        except CorpusFormatError as exc:
            raise UsageError(str(exc)) from None
    return out


def cmd_eval(args, cfg: PipelineConfig) -> int:
    (name, corpus), = _load_corpora([args.corpus])
    if not corpus:
        raise UsageError(f"{args.corpus}: corpus is empty")
    if args.cached:
        try:
            ranked = read_predictions(args.cached)
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        report = evaluate_predictions(corpus, ranked, args.ks, args.macro, cfg.present_only)
        failures = {}
    else:
        scores, failures = score_corpus(corpus, cfg)
        run = evaluate_scores(corpus, scores, cfg, args.ks, args.macro, failures)
        report = run.report
        if args.predictions_out:
            write_predictions(run.predictions, args.predictions_out, [r.id for r in corpus])
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    if failures:
        print(f"{len(failures)} of {len(corpus)} documents failed:", file=sys.stderr)
        for doc_id, err in sorted(failures.items()):
            print(f"  {doc_id}: {err}", file=sys.stderr)
        return EXIT_BACKEND
    return 0


def expand_sweep_values(param: str, values: Sequence[str]) -> list:
    if param in ("alpha", "gamma"):
        out = []
        for v in values:
            if ":" in v:
                start, stop, step = (float(x) for x in v.split(":"))
                n = int(round((stop - start) / step)) + 1
                out.extend(round(start + i * step, 10) for i in range(n))
            else:
                out.append(float(v))
        return out
    out = []
    for v in values:
        if v.startswith("len") and v[3:].isdigit() and int(v[3:]) in LENGTH_GROUPS:
            out.extend(LENGTH_GROUPS[int(v[3:])])
        else:
            out.append(v)
    return out


SWEEP_HEADER = ["value", "dataset", "k", "precision", "recall", "f1"]


def run_sweep(param: str, values: Sequence, corpora, cfg: PipelineConfig, ks: Sequence[int],
              macro: bool = False) -> list[list]:
    """One evaluation per (value, dataset). alpha and gamma reuse the model scores."""
    rows: list[list] = []
    for name, corpus in corpora:
        cached = None
        if param in ("alpha", "gamma"):
            cached = score_corpus(corpus, cfg)
        for value in values:
            try:
                if param == "alpha":
                    vcfg = with_overrides(cfg, alpha=value)
                    scores, failures = cached
                elif param == "gamma":
                    vcfg = with_overrides(cfg, gamma=value)
                    scores, failures = cached
                else:
                    vcfg = with_overrides(cfg, template_id=value)
                    vcfg.template()
                    scores, failures = score_corpus(corpus, vcfg)
                if failures and not scores:
                    raise RuntimeError(f"all {len(failures)} documents failed")
                report = evaluate_scores(corpus, scores, vcfg, ks, macro, failures).report
                for k in sorted(report.per_k):
                    m = report.per_k[k]
                    rows.append([value, name, k, m.precision, m.recall, m.f1])
            except Exception as exc:
                log.error("sweep cell %s=%s on %s failed: %s", param, value, name, exc)
                for k in sorted(set(ks)):
                    rows.append([value, name, k, "failed", "failed", "failed"])
    return rows


def ratio_rows(rows: list[list], reference: str) -> list[list]:
    """F1 of each dataset relative to ``reference`` for the same value and K."""
    ref = {(r[0], r[2]): r[5] for r in rows if r[1] == reference and not isinstance(r[5], str)}
    out = []
    for value, dataset, k, _, _, f1 in rows:
        base = ref.get((value, k))
        if isinstance(f1, str) or not base:
            out.append([value, dataset, k, "failed"])
        else:
            out.append([value, dataset, k, f1 / base])
    return out


def cmd_sweep(args, cfg: PipelineConfig) -> int:
    try:
        values = expand_sweep_values(args.param, args.values)
    except ValueError as exc:
        raise UsageError(f"bad sweep values: {exc}") from None
    if not values:
        raise UsageError("no sweep values")
    if args.param == "template":
        extra = load_templates(cfg.templates_file) if cfg.templates_file else None
        try:
            for v in values:
                get_template(v, extra)
        except TemplateError as exc:
            raise UsageError(str(exc)) from None
    corpora = _load_corpora(args.corpora)
    rows = run_sweep(args.param, values, corpora, cfg, args.ks, args.macro)
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.ratios_out:
        with open(args.ratios_out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["value", "dataset", "k", "ratio"])
            w.writerows(ratio_rows(rows, args.ratio_reference or corpora[0][0]))
    return 0


def minmax_normalize(scores: dict[str, float]) -> dict[str, float]:
    if not scores:
        return {}
    lo, hi = min(scores.values()), max(scores.values())
    if hi == lo:
        return {k: 1.0 for k in scores}
    return {k: (v - lo) / (hi - lo) for k, v in scores.items()}


def cmd_score_dump(args, cfg: PipelineConfig) -> int:
    text = _read_text(args.input)
    ranked = _extractor(cfg).extract(text, doc_id=args.input)
    raw = {c.phrase: c.s_c for c in ranked}
    print(json.dumps(raw if args.raw else minmax_normalize(raw), indent=2, ensure_ascii=False))
    return 0


def cmd_stats(args, cfg: PipelineConfig) -> int:
    (name, corpus), = _load_corpora([args.corpus])
    if not corpus:
        raise UsageError(f"{args.corpus}: corpus is empty")
    counts = None
    if args.candidates:
        from .candidates import extract_candidates
        from .preprocess import PerceptronTagger, preprocess

        tagger = PerceptronTagger(cfg.tagger_weights_path)
        counts = [len(extract_candidates(preprocess(r.text, tagger, cfg.position_cap))) for r in corpus]
    stats = compute_stats(corpus, counts)
    print(json.dumps({"dataset": name, **stats.__dict__}, indent=2))
    return 0


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="promptrank", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract keyphrases from one document")
    p.add_argument("input", nargs="?", default="-", help="text file, or - for stdin")
    p.add_argument("--json", action="store_true", help="emit every candidate with its scores")
    _add_config_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", help="F1@K on a JSONL corpus")
    p.add_argument("corpus")
    p.add_argument("--ks", type=_parse_ks, default=list(DEFAULT_KS))
    p.add_argument("--macro", action="store_true", help="average per document instead of pooling counts")
    p.add_argument("--predictions-out", help="write ranked predictions as JSONL")
    p.add_argument("--cached", help="evaluate a predictions JSONL instead of scoring")
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="ablation sweep over alpha, gamma or template")
    p.add_argument("param", choices=("alpha", "gamma", "template"))
    p.add_argument("--values", nargs="+", required=True,
                   help="numbers, start:stop:step ranges, template ids or length groups (len0, len2, ...)")
    p.add_argument("--corpora", nargs="+", required=True)
    p.add_argument("--ks", type=_parse_ks, default=list(DEFAULT_KS))
    p.add_argument("--macro", action="store_true")
    p.add_argument("--output", "-o", help="CSV path (default stdout)")
    p.add_argument("--ratios-out", help="also write F1 ratios against a reference dataset")
    p.add_argument("--ratio-reference", help="reference dataset name (default: first corpus)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("score-dump", help="per-candidate scores of one document")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--raw", action="store_true", help="emit unnormalized final scores")
    _add_config_flags(p)
    p.set_defaults(func=cmd_score_dump)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("corpus")
    p.add_argument("--candidates", action="store_true", help="also count extracted candidates")
    _add_config_flags(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        if args.print_config:
            print(json.dumps(cfg.to_flat(), indent=2, sort_keys=True))
            return 0
        cfg.template()
        return args.func(args, cfg)
    except (UsageError, TemplateError, TaggerLoadError) as exc:
        print(f"promptrank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BackendError, ScoringError) as exc:
        print(f"promptrank: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND


if __name__ == "__main__":
    sys.exit(main())
