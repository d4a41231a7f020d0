"""Command-line entry point for the whole pipeline.

Subcommands: convert, lexicon, augment, train-toy, gradcheck, normalize,
evaluate.  Exit codes: 0 success, 2 data errors (unreadable or malformed
inputs), 3 backend errors, 64 usage errors.  All file outputs are written
atomically (temp file in the same directory, then rename), and every
subcommand is byte-reproducible given the same inputs, flags, and seeds.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys

import numpy as np

from . import align, augment, backend, baselines, corpus, metrics, seq2seq

REMOTE_URL_ENV = "LEXNORM_REMOTE_URL"

EXIT_OK = 0
EXIT_DATA = 2
EXIT_BACKEND = 3
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 by default; we reserve 2 for data
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@contextlib.contextmanager
def atomic_out(path: str | None):
    """Text sink that becomes visible only on success; stdout when no path."""
    if path is None:
        yield sys.stdout
        return
    tmp = f"{path}.tmp.{os.getpid()}"
    f = open(tmp, "w", encoding="utf-8", newline="\n")
    try:
        yield f
        f.close()
        os.replace(tmp, path)
    except BaseException:
        f.close()
        with contextlib.suppress(OSError):
            os.remove(tmp)
        raise


def parse_corpus_args(entries: list[str], langs: list[str] | None) -> list[tuple[str, str]]:
    """LANG=PATH arguments, optionally filtered by --lang flags."""
    out = []
    for entry in entries:
        lang, sep, path = entry.partition("=")
        if not sep or not lang or not path:
            raise _UsageError(f"expected LANG=PATH, got {entry!r}")
        out.append((lang, path))
    if langs:
        out = [(lang, path) for lang, path in out if lang in langs]
        if not out:
            raise _UsageError(f"no corpora left after --lang filter {langs}")
    return out


def _load_corpora(entries: list[str], langs: list[str] | None) -> list[corpus.Corpus]:
    return [corpus.load_corpus(path, lang) for lang, path in parse_corpus_args(entries, langs)]


def _resolve_backend(selector: str | None) -> str:
    if selector:
        return selector
    url = os.environ.get(REMOTE_URL_ENV)
    if url:
        return f"remote:{url}"
    raise _UsageError(
        f"no --backend given and {REMOTE_URL_ENV} is not set"
    )


# ------------------------------------------------------------- subcommands


def cmd_convert(args) -> int:
    pairs = []
    for c in _load_corpora(args.corpora, args.lang):
        pairs.extend(corpus.to_sentence_pairs(c))
    with atomic_out(args.out) as f:
        corpus.write_sentence_pairs(pairs, f)
    return EXIT_OK


def cmd_lexicon(args) -> int:
    lexica = [
        baselines.build_lexicon(c, fold_case=args.fold_case)
        for c in _load_corpora(args.corpora, args.lang)
    ]
    merged = baselines.merge_lexicons(lexica)
    with atomic_out(args.out) as f:
        baselines.dump_lexicon(merged, f)
    return EXIT_OK


def cmd_augment(args) -> int:
    spec = augment.NoiseSpec(
        channels=augment.parse_channel_spec(args.channels), seed=args.seed
    )
    clean: list[tuple[str, str]] = []
    for lang, path in parse_corpus_args(args.texts, args.lang):
        with open(path, encoding="utf-8") as f:
            clean.extend((lang, line.strip()) for line in f if line.strip())
    pairs = augment.corrupt_corpus(clean, spec)
    with atomic_out(args.out) as f:
        corpus.write_sentence_pairs(pairs, f)
    return EXIT_OK


def cmd_train_toy(args) -> int:
    with open(args.train, encoding="utf-8") as f:
        train_pairs = corpus.read_sentence_pairs(f)
    with open(args.dev, encoding="utf-8") as f:
        dev_pairs = corpus.read_sentence_pairs(f)
    cfg = seq2seq.TrainConfig(
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        max_epochs=args.epochs,
        patience=args.patience,
        clip_norm=args.clip_norm,
        seed=args.seed,
        d_embed=args.d_embed,
        d_hidden=args.d_hidden,
    )
    result = seq2seq.train(train_pairs, dev_pairs, cfg)
    tmp = f"{args.out}.tmp.{os.getpid()}"
    try:
        seq2seq.save_model(tmp, result.params, result.vocab)
        os.replace(tmp, args.out)
    except BaseException:
        with contextlib.suppress(OSError):
            os.remove(tmp)
        raise
    if args.history:
        payload = {
            "history": result.history,
            "best_epoch": result.best_epoch,
            "best_dev_accuracy": result.best_dev_accuracy,
        }
        with atomic_out(args.history) as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    print(
        f"trained {result.params.n_parameters()} parameters; "
        f"best dev accuracy {result.best_dev_accuracy:.4f} "
        f"at epoch {result.best_epoch}"
    )
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    vocab = seq2seq.Vocab(("xx",), ("a", "b", "c"))
    params = seq2seq.ModelParams.init(len(vocab), 3, 4, rng)
    pairs = [
        corpus.SentencePair("xx", "ab", "ba", 0),
        corpus.SentencePair("xx", "c", "cc", 1),
        corpus.SentencePair("xx", "abc", "a", 2),
    ]
    batch = seq2seq.make_batch(vocab, pairs)
    worst = seq2seq.gradient_check(params, batch)
    print(
        f"gradcheck: {params.n_parameters()} parameters, "
        f"max relative error {worst:.3e}"
    )
    return EXIT_OK if worst < 1e-4 else 1


def cmd_normalize(args) -> int:
    n = backend.make_normalizer(_resolve_backend(args.backend), args.fold_case)
    if args.infile:
        with open(args.infile, encoding="utf-8") as f:
            sentences = [line.rstrip("\n") for line in f]
    else:
        sentences = [line.rstrip("\n") for line in sys.stdin]
    if sentences and sentences[-1] == "":
        sentences.pop()  # trailing newline artifact
    if not sentences:
        raise _UsageError("no input sentences")
    out = backend.normalize_batch(n, args.lang, sentences)
    with atomic_out(args.out) as f:
        for s in out:
            f.write(s + "\n")
    return EXIT_OK


def _format_cell(value) -> str:
    return "-" if value is None else f"{value:.4f}"


def format_report(report: metrics.EvalReport) -> str:
    header = f"{'lang':<8}{'tokens':>8}{'accuracy':>10}{'acc_lai':>10}{'err':>10}{'precision':>11}{'recall':>9}"
    lines = [header]
    for lang, c in sorted(report.per_lang.items()):
        acc_lai = c.n_lai_correct / c.n_tokens if c.n_tokens else None
        lines.append(
            f"{lang:<8}{c.n_tokens:>8}{_format_cell(c.accuracy):>10}"
            f"{_format_cell(acc_lai):>10}{_format_cell(c.err):>10}"
            f"{_format_cell(c.precision):>11}{_format_cell(c.recall):>9}"
        )
    lines.append(f"macro err: {_format_cell(report.macro_err)}")
    return "\n".join(lines) + "\n"


def run_evaluation(
    corpora: list[corpus.Corpus], n: backend.Normalizer, fold_case: bool
) -> metrics.EvalReport:
    """Normalize each sentence, align back to tokens, score.

    This is the whole pipeline in one place: the backend sees sentence
    strings; word-level credit comes from monotone alignment.
    """
    cfg = align.AlignConfig(fold_case=fold_case)
    items = []
    for c in corpora:
        if not c.sentences:
            items.append((c, []))
            continue
        sentences = [" ".join(s.raw_tokens()) for s in c]
        outputs = backend.normalize_batch(n, c.lang, sentences)
        alignments = [
            align.align_output(s.raw_tokens(), out, cfg)
            for s, out in zip(c, outputs)
        ]
        items.append((c, alignments))
    return metrics.evaluate_corpora(items, fold_case)


def cmd_evaluate(args) -> int:
    corpora = _load_corpora(args.corpora, args.lang)
    n = backend.make_normalizer(_resolve_backend(args.backend), args.fold_case)
    report = run_evaluation(corpora, n, args.fold_case)
    sys.stdout.write(format_report(report))
    if args.report:
        with atomic_out(args.report) as f:
            json.dump(report.to_dict(), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> _Parser:
    parser = _Parser(prog="lexnorm", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, corpora_help, corpora_dest="corpora"):
        p.add_argument(corpora_dest, nargs="+", metavar="LANG=PATH", help=corpora_help)
        p.add_argument("--lang", action="append", help="process only these languages")

    p = sub.add_parser("convert", help="word-aligned corpora to sentence-pair JSONL")
    add_common(p, "gold corpus files")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("lexicon", help="build a replacement lexicon from gold corpora")
    add_common(p, "gold corpus files")
    p.add_argument("--out", help="output TSV path (default stdout)")
    _add_fold_case(p)
    p.set_defaults(func=cmd_lexicon)

    p = sub.add_parser("augment", help="corrupt clean text into training pairs")
    add_common(p, "clean text files, one sentence per line", corpora_dest="texts")
    p.add_argument("--channels", required=True, metavar="NAME=RATE,...",
                   help=f"noise channels; names: {', '.join(augment.CHANNEL_NAMES)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output JSONL path (default stdout)")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train-toy", help="train the small seq2seq denoiser")
    p.add_argument("--train", required=True, help="training pairs (JSONL)")
    p.add_argument("--dev", required=True, help="dev pairs (JSONL)")
    p.add_argument("--out", required=True, help="checkpoint path (.npz)")
    p.add_argument("--history", help="write per-epoch history JSON here")
    p.add_argument("--learning-rate", type=float, default=1e-2)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--clip-norm", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d-embed", type=int, default=32)
    p.add_argument("--d-hidden", type=int, default=64)
    p.set_defaults(func=cmd_train_toy)

    p = sub.add_parser("gradcheck", help="finite-difference check of the model gradients")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("normalize", help="normalize plain sentences with a backend")
    p.add_argument("--backend", help="lai | mfr:<lexicon> | toy:<ckpt> | remote:<url>")
    p.add_argument("--lang", required=True)
    p.add_argument("--in", dest="infile", help="input file (default stdin)")
    p.add_argument("--out", help="output file (default stdout)")
    _add_fold_case(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("evaluate", help="score a backend against gold corpora")
    add_common(p, "gold corpus files")
    p.add_argument("--backend", help="lai | mfr:<lexicon> | toy:<ckpt> | remote:<url>")
    p.add_argument("--report", help="write the JSON report here")
    _add_fold_case(p)
    p.set_defaults(func=cmd_evaluate)

    return parser


def _add_fold_case(p):
    p.add_argument("--fold-case", dest="fold_case", action="store_true", default=True)
    p.add_argument("--no-fold-case", dest="fold_case", action="store_false")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    data_errors = (
        corpus.CorpusError,
        baselines.LexiconError,
        seq2seq.EmptyData,
        seq2seq.ShapeError,
        seq2seq.NonFiniteLoss,
        metrics.ShapeMismatch,
        backend.EmptyBatch,
        OSError,
        json.JSONDecodeError,
    )
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"lexnorm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except data_errors as exc:
        print(f"lexnorm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except backend.BackendFailure as exc:
        print(f"lexnorm: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except ValueError as exc:
        # malformed selectors, channel specs, train configs
        print(f"lexnorm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
