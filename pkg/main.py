import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.cli.commands import EXIT_USAGE, execute
from app.models.schemas import RunConfig
from app.utils.logger import get_logger, set_log_level
from config.settings import settings

logger = get_logger(__name__)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _denominator(value: str):
    if value in ("auto", "pair-sum", "triplet-union"):
        return value, None
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected auto, pair-sum, triplet-union or an explicit integer N, got {value!r}"
        )
    if n < 1:
        raise argparse.ArgumentTypeError(f"explicit denominator must be >= 1, got {n}")
    return "explicit", n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", choices=["kl", "js"], default=settings.DEFAULT_BASE)
    common.add_argument("--mode", choices=["paper-literal", "token", "strict"], default=settings.DEFAULT_MODE)
    common.add_argument("--denom", type=_denominator, default=("auto", None),
                        help="auto | pair-sum | triplet-union | N (explicit |T|)")
    common.add_argument("--qr-normalizer", choices=["union", "sum"], default=settings.QR_NORMALIZER,
                        help="compound JS normalizer: |q u r| or |q|+|r|")
    common.add_argument("--input-kind", choices=["text", "tsv"], default="text")
    common.add_argument("--ngram", type=int, default=1, help="n-gram size for text inputs")
    common.add_argument("--no-lowercase", action="store_true", help="keep the case of text inputs")
    common.add_argument("--output", choices=["json", "csv"], default="json")
    common.add_argument("--precision", type=int, default=None,
                        help="significant digits of printed numbers (default: TRIVERGE_PRECISION)")
    common.add_argument("--verbose", "-v", action="count", default=0)

    parser = _Parser(prog="triverge", description=f"{settings.APP_NAME}: divergences and trivergences of count distributions")
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    div = commands.add_parser("div", parents=[common], help="divergence of two inputs")
    div.add_argument("inputs", nargs="*")

    triv = commands.add_parser("triv", parents=[common], help="trivergence of three inputs")
    triv.add_argument("--form", choices=["product", "compound"], default=settings.DEFAULT_FORM)
    triv.add_argument("inputs", nargs="*")

    matrix = commands.add_parser("matrix", parents=[common], help="pairwise divergence matrix")
    matrix.add_argument("--workers", type=int, default=settings.MATRIX_WORKERS)
    matrix.add_argument("inputs", nargs="*")

    variants = commands.add_parser("variants", parents=[common], help="list (and evaluate) every variant")
    variants.add_argument("--form", choices=["product", "compound"], default=settings.DEFAULT_FORM)
    variants.add_argument("--evaluate", action="store_true", help="evaluate on three inputs")
    variants.add_argument("inputs", nargs="*")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if args.verbose:
        set_log_level("DEBUG" if args.verbose > 1 else "INFO")

    policy, denominator = args.denom
    try:
        cfg = RunConfig(
            command=args.command,
            base=args.base,
            form=getattr(args, "form", settings.DEFAULT_FORM),
            mode=args.mode,
            denom_policy=policy,
            denominator=denominator,
            qr_normalizer=args.qr_normalizer,
            ngram_n=args.ngram,
            lowercase=settings.TOKEN_LOWERCASE and not args.no_lowercase,
            input_kind=args.input_kind,
            output=args.output,
            evaluate=getattr(args, "evaluate", False),
            precision=settings.TRIVERGE_PRECISION if args.precision is None else args.precision,
            workers=getattr(args, "workers", 1),
            inputs=args.inputs,
        )
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        logger.error(f"Invalid arguments: {messages}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    logger.info(f"Running {cfg.command} on {len(cfg.inputs)} input(s)")
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
