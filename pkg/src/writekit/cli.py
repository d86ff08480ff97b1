"""Command-line driver.

Every subcommand prints one JSON document to stdout (machine-readable,
schema files under writekit/schemas/) and a short human summary to
stderr. Exit codes: 0 success, 1 usage error, 2 unreadable or invalid
data. Randomized subcommands require an explicit --seed so runs are
repeatable by construction.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as corpus_mod
from .errors import WritekitError
from .langid import LanguageIdentifier, evaluate_langid
from .lexicon import load_lexicon
from .metrics import (
    contamination_scan,
    load_ratings,
    memorization_diagnostic,
    score_corpus,
    usefulness_histogram,
)
from .predict import WordPredictor
from .spell import TypoModel, gen_typo_pairs, save_typo_pairs
from .service import ServiceConfig, load_config, serve


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for bad data
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _emit(payload: dict, summary: str, out_path: str | None = None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    print(json.dumps(payload, ensure_ascii=False))
    print(summary, file=sys.stderr)


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def _load_corpus_sentences(path, fmt: str, fld: str) -> list[str]:
    if fmt == "text":
        return [line for line in _read_lines(path) if line.strip()]
    corp = corpus_mod.ingest(path, fmt=fmt)
    return corp.src_sentences() if fld == "src" else corp.tgt_sentences()


def _load_labeled(path) -> list[tuple[str, str]]:
    labeled = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise WritekitError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if "text" not in obj or "lang" not in obj:
                raise WritekitError(f"{path}: line {lineno}: need 'text' and 'lang' keys")
            labeled.append((obj["text"], obj["lang"]))
    return labeled


# ---- subcommand handlers ---------------------------------------------------


def _cmd_ingest(args) -> None:
    corp = corpus_mod.ingest(args.infile, fmt=args.format, name=args.name)
    corpus_mod.save(corp, args.out, fmt=args.out_format)
    _emit(
        {
            "command": "ingest",
            "name": corp.name,
            "pairs": len(corp),
            "format": args.format,
            "output": args.out,
        },
        f"ingested {len(corp)} pairs from {args.infile} -> {args.out}",
    )


def _cmd_clean(args) -> None:
    corp = corpus_mod.ingest(args.infile, fmt=args.format)
    cleaned, report = corpus_mod.clean(corp, max_len_ratio=args.max_len_ratio)
    corpus_mod.save(cleaned, args.out, fmt=args.out_format)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    payload = {"command": "clean", "output": args.out, **report.to_dict()}
    _emit(payload, f"kept {report.kept} of {len(corp)} pairs -> {args.out}")


def _cmd_split(args) -> None:
    if args.mode == "random_fraction" and args.seed is None:
        raise _UsageError("--seed is required for random_fraction splits")
    if args.mode == "held_out_doc" and not args.held_docs:
        raise _UsageError("--held-docs is required for held_out_doc splits")
    corp = corpus_mod.ingest(args.infile, fmt=args.format)
    spec = corpus_mod.SplitSpec(
        mode=args.mode,
        fraction=args.fraction,
        seed=args.seed if args.seed is not None else 0,
        held_doc_ids=tuple((args.held_docs or "").split(",")) if args.held_docs else (),
    )
    train, test = corpus_mod.split(corp, spec)
    corpus_mod.save(train, args.train_out, fmt=args.out_format)
    corpus_mod.save(test, args.test_out, fmt=args.out_format)
    _emit(
        {
            "command": "split",
            "mode": args.mode,
            "seed": args.seed,
            "train": args.train_out,
            "test": args.test_out,
            "train_size": len(train),
            "test_size": len(test),
        },
        f"split {len(corp)} pairs into {len(train)} train / {len(test)} test",
    )


def _cmd_train_ngram(args) -> None:
    sentences = _load_corpus_sentences(args.infile, args.format, args.field)
    model = WordPredictor(max_context=args.max_context).fit(sentences)
    model.save(args.out)
    _emit(
        {
            "command": "train-ngram",
            "model": args.out,
            "max_context": model.max_context,
            "vocab_size": len(model.vocab_),
            "total_tokens": model.total_tokens_,
            "contexts": len(model.counts_),
        },
        f"trained ngram model on {len(sentences)} sentences -> {args.out}",
    )


def _cmd_train_langid(args) -> None:
    labeled = _load_labeled(args.infile)
    texts = [t for t, _ in labeled]
    labels = [l for _, l in labeled]
    model = LanguageIdentifier(
        rejection_threshold=args.threshold, char_n=args.char_n
    ).fit(texts, labels)
    model.save(args.out)
    payload = {
        "command": "train-langid",
        "model": args.out,
        "classes": model.classes_,
        "samples": len(labeled),
    }
    if args.eval_in:
        payload["evaluation"] = evaluate_langid(model, _load_labeled(args.eval_in)).to_dict()
    _emit(payload, f"trained langid on {len(labeled)} samples -> {args.out}")


def _cmd_gen_typos(args) -> None:
    if args.seed is None:
        raise _UsageError("--seed is required for gen-typos")
    sentences = _load_corpus_sentences(args.infile, args.format, args.field)
    ops = tuple(args.ops.split(","))
    if args.lexicon:
        model = TypoModel.from_lexicon(load_lexicon(args.lexicon), ops=ops)
    else:
        from .tokenize import is_word_token, tokenize

        chars = sorted(
            {ch for s in sentences for t in tokenize(s) if is_word_token(t) for ch in t}
        )
        if not chars:
            raise WritekitError("cannot derive an alphabet: no word tokens in input")
        model = TypoModel(ops=ops, alphabet="".join(chars))
    pairs = gen_typo_pairs(sentences, model, seed=args.seed)
    save_typo_pairs(pairs, args.out)
    skipped = sum(1 for p in pairs if p.skipped)
    _emit(
        {
            "command": "gen-typos",
            "output": args.out,
            "pairs": len(pairs),
            "skipped": skipped,
            "seed": args.seed,
        },
        f"wrote {len(pairs)} typo pairs ({skipped} skipped) -> {args.out}",
    )


def _cmd_eval(args) -> None:
    candidates = _read_lines(args.cand)
    references = _read_lines(args.ref)
    if args.metric == "bleu":
        report = score_corpus("bleu", candidates, references, max_n=args.max_n)
    else:
        report = score_corpus(
            "chrf", candidates, references, char_n=args.char_n, beta=args.beta
        )
    payload = {"command": "eval", **report.to_dict()}
    _emit(
        payload,
        f"{args.metric}: mean {report.mean:.2f} +- {report.std:.2f} over {len(report.scores)} segments",
        out_path=args.out,
    )


def _cmd_diag_memorization(args) -> None:
    with open(args.scores, encoding="utf-8") as fh:
        obj = json.load(fh)
    if isinstance(obj, dict):
        scores = obj.get("scores")
        if not isinstance(scores, list):
            raise WritekitError(f"{args.scores}: object form needs a 'scores' list")
    else:
        scores = obj
    diag = memorization_diagnostic(
        [float(s) for s in scores],
        perfect_threshold=args.perfect_threshold,
        high_tail_threshold=args.high_tail_threshold,
        bimodality_threshold=args.bimodality_threshold,
    )
    payload = {"command": "diag-memorization", **diag.to_dict()}
    flag = "FLAGGED" if diag.memorization_flag else "ok"
    _emit(payload, f"memorization: {flag} (perfect {diag.perfect_fraction:.1%})", out_path=args.out)


def _cmd_scan_contamination(args) -> None:
    report = contamination_scan(
        outputs=[l for l in _read_lines(args.outputs) if l.strip()],
        toxic_corpus=[l for l in _read_lines(args.toxic) if l.strip()],
        clean_corpus=[l for l in _read_lines(args.clean) if l.strip()],
        keywords=args.keyword or [],
        ngram_len=args.ngram_len,
    )
    payload = {"command": "scan-contamination", **report.to_dict()}
    _emit(
        payload,
        f"flagged {len(report.flagged_indices())} of {len(report.records)} outputs",
        out_path=args.out,
    )


def _cmd_usefulness_report(args) -> None:
    ratings = load_ratings(args.ratings)
    report = usefulness_histogram([r.label for r in ratings])
    payload = {"command": "usefulness-report", **report.to_dict()}
    _emit(payload, f"histogram over {report.n} ratings", out_path=args.out)


def _cmd_serve(args) -> None:
    config = load_config(args.config) if args.config else ServiceConfig()
    if args.host:
        config.host = args.host
    if args.port is not None:
        config.port = args.port
    print(f"serving on http://{config.host}:{config.port}", file=sys.stderr)
    serve(config)


class _UsageError(Exception):
    pass


# ---- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="writekit", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add_corpus_in(p):
        p.add_argument("--in", dest="infile", required=True, help="input corpus file")
        p.add_argument("--format", choices=("tsv", "jsonl"), default="tsv")

    p = sub.add_parser("ingest", help="load a raw corpus and write it in canonical form")
    add_corpus_in(p)
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=("tsv", "jsonl"), default="jsonl")
    p.add_argument("--name", default=None)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("clean", help="strip markup and drop bad pairs")
    add_corpus_in(p)
    p.add_argument("--out", required=True)
    p.add_argument("--out-format", choices=("tsv", "jsonl"), default="jsonl")
    p.add_argument("--report", default=None, help="also write the report JSON here")
    p.add_argument("--max-len-ratio", type=float, default=5.0)
    p.set_defaults(func=_cmd_clean)

    p = sub.add_parser("split", help="train/test split, seeded or by held-out doc")
    add_corpus_in(p)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.add_argument("--out-format", choices=("tsv", "jsonl"), default="jsonl")
    p.add_argument("--mode", choices=("random_fraction", "held_out_doc"), default="random_fraction")
    p.add_argument("--fraction", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--held-docs", default=None, help="comma-separated doc ids")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("train-ngram", help="train the next-word model")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=("tsv", "jsonl", "text"), default="jsonl")
    p.add_argument("--field", choices=("src", "tgt"), default="src")
    p.add_argument("--max-context", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_ngram)

    p = sub.add_parser("train-langid", help="train the language identifier")
    p.add_argument("--in", dest="infile", required=True, help="JSONL with text/lang keys")
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--char-n", type=int, default=3)
    p.add_argument("--eval-in", default=None, help="labeled JSONL to evaluate after training")
    p.set_defaults(func=_cmd_train_langid)

    p = sub.add_parser("gen-typos", help="generate synthetic misspelling pairs")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--format", choices=("tsv", "jsonl", "text"), default="jsonl")
    p.add_argument("--field", choices=("src", "tgt"), default="src")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--lexicon", default=None, help="derive the edit alphabet from this lexicon")
    p.add_argument("--ops", default="substitute,delete,insert")
    p.set_defaults(func=_cmd_gen_typos)

    p = sub.add_parser("eval", help="segment-level translation metrics")
    ev = p.add_subparsers(dest="metric", required=True, parser_class=_Parser)
    pb = ev.add_parser("bleu")
    pb.add_argument("--cand", required=True, help="candidate file, one segment per line")
    pb.add_argument("--ref", required=True, help="reference file, one segment per line")
    pb.add_argument("--max-n", type=int, default=4)
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=_cmd_eval)
    pc = ev.add_parser("chrf")
    pc.add_argument("--cand", required=True)
    pc.add_argument("--ref", required=True)
    pc.add_argument("--char-n", type=int, default=6)
    pc.add_argument("--beta", type=float, default=2.0)
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=_cmd_eval)

    p = sub.add_parser("diag-memorization", help="score-distribution memorization check")
    p.add_argument("--scores", required=True, help="JSON list of scores or an eval report")
    p.add_argument("--perfect-threshold", type=float, default=0.15)
    p.add_argument("--high-tail-threshold", type=float, default=0.10)
    p.add_argument("--bimodality-threshold", type=float, default=5.0 / 9.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_diag_memorization)

    p = sub.add_parser("scan-contamination", help="flag outputs echoing out-of-domain text")
    p.add_argument("--outputs", required=True, help="text file, one output per line")
    p.add_argument("--toxic", required=True, help="out-of-domain corpus, one line per sentence")
    p.add_argument("--clean", required=True, help="in-domain corpus, one line per sentence")
    p.add_argument("--keyword", action="append", default=None)
    p.add_argument("--ngram-len", type=int, default=4)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_scan_contamination)

    p = sub.add_parser("usefulness-report", help="seven-point rating histogram")
    p.add_argument("--ratings", required=True, help="JSONL ratings file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_usefulness_report)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", default=None, help="service config JSON")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        args.func(args)
    except _UsageError as exc:
        print(f"writekit: error: {exc}", file=sys.stderr)
        return 1
    except (WritekitError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130
    return 0


if __name__ == "__main__":
    sys.exit(main())
