"""Command line: `modelshim serve` and `modelshim finetune`.

Exit codes: 0 success, 2 data errors (missing files, bad pairs, missing
language mappings), 64 usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, ShimConfig, parse_lang_map

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_model_flags(sub):
    sub.add_argument("--model", default="", help="checkpoint path or hub identifier")
    sub.add_argument("--device", default="cpu")
    sub.add_argument("--lang-map", default="",
                     help="corpus->model language codes, e.g. en=en_XX,da=da_DK")


def build_parser():
    parser = _Parser(prog="modelshim", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    serve = sub.add_parser("serve", help="serve the wire protocol")
    _add_model_flags(serve)
    serve.add_argument("--echo", action="store_true",
                       help="echo inputs verbatim; loads no weights")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8640)
    serve.add_argument("--max-batch", type=int, default=16)
    serve.add_argument("--beam-size", type=int, default=1)
    serve.add_argument("--max-new-tokens", type=int, default=128)
    serve.add_argument("--warmup-seconds", type=float, default=0.0,
                       help="hold /v1/normalize at 503 this long after startup")

    tune = sub.add_parser("finetune", help="fine-tune on sentence pairs")
    _add_model_flags(tune)
    tune.add_argument("--pairs", required=True, help="sentence-pair JSONL")
    tune.add_argument("--out", required=True, help="checkpoint output directory")
    tune.add_argument("--epochs", type=int, default=1)
    tune.add_argument("--batch-size", type=int, default=8)
    tune.add_argument("--learning-rate", type=float, default=5e-5)
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--max-steps", type=int, default=None)
    tune.add_argument("--max-length", type=int, default=64)
    return parser


def _shim_config(args, echo: bool) -> ShimConfig:
    return ShimConfig(
        model=args.model,
        device=args.device,
        max_batch=getattr(args, "max_batch", 16),
        lang_map=parse_lang_map(args.lang_map),
        echo_mode=echo,
        beam_size=getattr(args, "beam_size", 1),
        max_new_tokens=getattr(args, "max_new_tokens", 128),
    )


def cmd_serve(args) -> int:
    from .service import serve

    cfg = _shim_config(args, args.echo)
    server = serve(cfg, host=args.host, port=args.port,
                   warmup_seconds=args.warmup_seconds)
    print(f"serving on {server.base_url} "
          f"({'echo' if cfg.echo_mode else cfg.model})", flush=True)
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.close()
    return EXIT_OK


def cmd_finetune(args) -> int:
    from .finetune import finetune

    cfg = _shim_config(args, echo=False)
    summary = finetune(
        args.pairs, cfg, args.out,
        epochs=args.epochs, batch_size=args.batch_size,
        learning_rate=args.learning_rate, seed=args.seed,
        max_steps=args.max_steps, max_length=args.max_length,
    )
    print(f"fine-tuned on {summary['pairs']} pairs "
          f"({','.join(summary['langs'])}) for {summary['steps']} steps; "
          f"final loss {summary['final_loss']:.4f}; "
          f"checkpoint at {summary['checkpoint']}")
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(asctime)s %(name)s %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "serve":
            return cmd_serve(args)
        return cmd_finetune(args)
    except ConfigError as exc:
        print(f"modelshim: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        # bad pairs files and missing language mappings land here
        print(f"modelshim: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
