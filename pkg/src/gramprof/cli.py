"""Command-line entry points for the full train/evaluate/profile/index/serve lifecycle.

Exit codes: 0 success, 1 usage error, 2 data or validation error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .corpus import load_corpus, namespace_tags
from .index import DocumentIndex, index_document
from .profiler import Profiler
from .service import DEFAULT_MAX_BODY, DEFAULT_PORT, run_service
from .trainer import (
    TrainConfig,
    cross_validate,
    evaluate,
    load_checkpoint,
    save_checkpoint,
    train,
)


def load_train_config(path: str | None, seed: int | None = None) -> TrainConfig:
    """Read a flat key=value config file; every key mirrors a TrainConfig field.

    Blank lines and ``#`` comments are skipped. Tuple-valued fields take
    comma-separated values. Any missing key keeps its default.
    """
    values: dict[str, str] = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                s = line.strip()
                if not s or s.startswith("#"):
                    continue
                if "=" not in s:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {s!r}")
                key, _, val = s.partition("=")
                values[key.strip()] = val.strip()
    defaults = TrainConfig()
    kwargs = {}
    for key, raw in values.items():
        if not hasattr(defaults, key):
            raise ValueError(f"{path}: unknown config key {key!r}")
        current = getattr(defaults, key)
        try:
            if isinstance(current, bool):
                lowered = raw.lower()
                if lowered not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"not a boolean: {raw!r}")
                kwargs[key] = lowered in ("true", "1", "yes")
            elif isinstance(current, int):
                kwargs[key] = int(raw)
            elif isinstance(current, float):
                kwargs[key] = float(raw)
            elif isinstance(current, tuple):
                parts = [p.strip() for p in raw.split(",") if p.strip()]
                elem = type(current[0])
                kwargs[key] = tuple(elem(p) for p in parts)
            else:
                kwargs[key] = raw
        except ValueError as e:
            raise ValueError(f"{path}: bad value for {key!r}: {e}") from e
    if seed is not None:
        kwargs["seed"] = seed
    return TrainConfig(**kwargs)


def _load_eval_corpus(path: str, ckpt) -> list:
    sentences = load_corpus(path, max_len=ckpt.config.max_len)
    if len(ckpt.languages) > 1:
        sentences = namespace_tags(sentences)
    return sentences


def _resolve_lang(args_lang: str | None, profiler: Profiler) -> str:
    if args_lang is not None:
        return args_lang
    if len(profiler.languages) == 1:
        return profiler.languages[0]
    raise ValueError(f"--lang is required for this model (handles: {', '.join(profiler.languages)})")


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_train(args) -> int:
    config = load_train_config(args.config, seed=args.seed)
    train_sents = load_corpus(args.data, max_len=config.max_len)
    val_sents = load_corpus(args.val, max_len=config.max_len)
    ckpt = train(config, train_sents, val_sents)
    save_checkpoint(ckpt, args.out)
    print(f"checkpoint written to {args.out}")
    print(f"best epoch {ckpt.provenance['best_epoch']}, "
          f"validation labeled F1 {ckpt.provenance['val_labeled_f1']:.4f}")
    return 0


def cmd_cv(args) -> int:
    config = load_train_config(args.config, seed=args.seed)
    sentences = load_corpus(args.data, max_len=config.max_len)
    mean, folds, assignment = cross_validate(config, sentences, folds=args.folds)
    payload = {
        "folds": [r.as_dict() for r in folds],
        "mean": mean.as_dict(),
        "assignment": assignment,
    }
    _write_json(args.report, payload)
    print(f"{args.folds}-fold mean labeled F1 {mean.labeled.f1:.4f} (report: {args.report})")
    return 0


def cmd_eval(args) -> int:
    ckpt = load_checkpoint(args.model)
    sentences = _load_eval_corpus(args.data, ckpt)
    report = evaluate(ckpt.build_model(), ckpt.vocab, sentences, threshold=args.threshold)
    _write_json(args.report, report.as_dict())
    print(f"labeled F1 {report.labeled.f1:.4f} on {len(sentences)} sentences (report: {args.report})")
    return 0


def cmd_profile(args) -> int:
    profiler = Profiler.from_dir(args.model)
    text = args.text if args.text is not None else Path(args.input).read_text(encoding="utf-8")
    lang = _resolve_lang(args.lang, profiler)
    predictions = profiler.profile_text(text, lang, threshold=args.threshold)
    if args.json:
        print(json.dumps({"sentences": [p.as_dict() for p in predictions]}, ensure_ascii=False, indent=2))
        return 0
    for p in predictions:
        level = f"  [{p.level[0]} {p.level[1]:.2f}]" if p.level is not None else ""
        print(f"{p.id}{level}  {p.text}")
        for s in p.spans:
            surface = text[s.char_start : s.char_end]
            print(f"    ({s.start},{s.end}) {s.tag:<12} {s.prob:.3f}  {surface!r}")
    return 0


def cmd_index(args) -> int:
    profiler = Profiler.from_dir(args.model)
    idx = DocumentIndex(profiler.levels) if profiler.levels is not None else DocumentIndex()
    with open(args.docs, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                doc_id, text, lang = str(raw["id"]), str(raw["text"]), str(raw["lang"])
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise ValueError(f"{args.docs}:{lineno}: malformed document record: {e}") from e
            idx.add(index_document(profiler, doc_id, text, lang))
    idx.save(args.out)
    print(f"indexed {len(idx)} documents to {args.out}")
    return 0


def cmd_search(args) -> int:
    idx = DocumentIndex.load(args.index)
    hits = idx.search(gi=args.gi or None, level=args.level, lang=args.lang)
    if args.json:
        print(json.dumps({"documents": [r.summary() for r in hits]}, ensure_ascii=False, indent=2))
        return 0
    for r in hits:
        print(f"{r.id}\t{r.difficulty}\t{r.lang}\t{r.snippet(80)}")
    return 0


def cmd_serve(args) -> int:
    profiler = Profiler.from_dir(args.model)
    if args.index is not None and os.path.exists(args.index):
        idx = DocumentIndex.load(args.index)
    else:
        idx = DocumentIndex(profiler.levels) if profiler.levels is not None else DocumentIndex()
    run_service(profiler, idx, host=args.host, port=args.port, max_body=args.max_body)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gramprof", description="Grammatical profiling toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="epoch-level progress logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model and write a checkpoint directory")
    p.add_argument("--data", required=True, help="training corpus (JSONL)")
    p.add_argument("--val", required=True, help="validation corpus (JSONL)")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", required=True, help="checkpoint output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="k-fold cross-validation")
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--report", required=True, help="output metrics JSON")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a corpus")
    p.add_argument("--model", required=True, help="checkpoint directory")
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True, help="output metrics JSON")
    p.add_argument("--threshold", type=float, default=0.0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("profile", help="profile text from the command line")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="text to profile")
    src.add_argument("--input", help="read text from a file")
    p.add_argument("--lang", help="language code (optional for single-language models)")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--json", action="store_true", help="emit prediction JSON instead of a listing")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("index", help="profile documents and build a search index")
    p.add_argument("--model", required=True)
    p.add_argument("--docs", required=True, help="JSONL of {id, text, lang} records")
    p.add_argument("--out", required=True, help="index output file")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="query a saved index")
    p.add_argument("--index", required=True)
    p.add_argument("--gi", action="append", help="grammatical item tag (repeatable; conjunction)")
    p.add_argument("--level", help="difficulty level name")
    p.add_argument("--lang")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model", default=os.environ.get("GRAMPROF_MODEL"))
    p.add_argument("--index", default=os.environ.get("GRAMPROF_INDEX"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("GRAMPROF_PORT", DEFAULT_PORT)))
    p.add_argument("--max-body", type=int, default=int(os.environ.get("GRAMPROF_MAX_BODY", DEFAULT_MAX_BODY)))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage problems and 0 for --help
        return 0 if e.code in (0, None) else 1
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "serve" and args.model is None:
        print("error: serve needs --model or GRAMPROF_MODEL", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001 - boundary between library and process
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
