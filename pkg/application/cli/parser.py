import argparse
from typing import List, NoReturn, Optional

from application.cli.oracles import CHECKS
from framework.error_code.errors import DetailedError, ErrorCode
from services.graph.generators import FAMILIES

ESTIMATORS = ("sse", "sse-bfs", "tse", "geo-tse", "nsse", "msep", "msep-bfs")


class CliArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting so usage errors map to exit code 1"""

    def error(self, message: str) -> NoReturn:
        raise DetailedError(
            ErrorCode.VALIDATION_ERROR,
            message,
            context={'help': self.format_help()}
        )


def seed_value(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed {text} is not an unsigned 64-bit integer")
    return value


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be at least 1")
    return value


def source_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sources must be comma-separated integers, got {text!r}")


def _output_flags(parser: argparse.ArgumentParser, formats: Optional[List[str]] = None, default: str = "json") -> None:
    parser.add_argument("--out", metavar="FILE", help="write the result here instead of stdout")
    parser.add_argument("--format", choices=formats or ["json"], default=default, help="output format")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(
        prog="sourceinf",
        description="Multiple infection source estimation on SI-spread infection graphs",
    )
    sub = parser.add_subparsers(dest="command", metavar="{gen,simulate,estimate,benchmark,oracle}",
                                parser_class=CliArgumentParser)
    sub.required = True

    gen = sub.add_parser("gen", help="generate a synthetic network as an edge list")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--degree", type=int, default=3, help="regular tree degree")
    gen.add_argument("--depth", type=int, default=3, help="tree depth (regular / geometric)")
    gen.add_argument("--d-min", type=int, default=3, help="geometric tree minimum root degree")
    gen.add_argument("--d-max", type=int, default=3, help="geometric tree maximum root degree")
    gen.add_argument("--max-degree", type=int, default=None, help="geometric tree degree cap")
    gen.add_argument("--alpha", type=float, default=1.0)
    gen.add_argument("--b", type=float, default=1.0)
    gen.add_argument("--c", type=float, default=1.0)
    gen.add_argument("--n", type=int, default=0, help="node count (small-world / random-tree)")
    gen.add_argument("--k", type=int, default=4, help="small-world lattice degree")
    gen.add_argument("--p", type=float, default=0.0, help="small-world rewiring probability")
    gen.add_argument("--seed", type=seed_value, default=0)
    gen.add_argument("--out", metavar="FILE", help="write the edge list here instead of stdout")

    simulate = sub.add_parser("simulate", help="run SI spreading from given or random sources")
    simulate.add_argument("--graph", metavar="FILE", required=True)
    simulate.add_argument("--sources", type=source_list, help="comma-separated source ids")
    simulate.add_argument("--k", type=positive_int, default=1, help="random source count when --sources is absent")
    simulate.add_argument("--tau", type=int, default=None, help="minimum hop separation of random sources")
    simulate.add_argument("--stop-n", type=positive_int, required=True, help="stop after this many infected nodes")
    simulate.add_argument("--stop-time", type=float, default=None, help="also stop at this virtual time")
    simulate.add_argument("--seed", type=seed_value, default=0)
    _output_flags(simulate)

    estimate = sub.add_parser("estimate", help="estimate infection sources")
    estimate.add_argument("--graph", metavar="FILE", required=True)
    estimate.add_argument("--infected", metavar="FILE", help="infected node ids, one per line (default: whole graph)")
    estimate.add_argument("--algo", choices=ESTIMATORS, required=True)
    estimate.add_argument("--k", type=positive_int, default=None, help="source count for nsse (default: --k-max)")
    estimate.add_argument("--k-max", type=positive_int, default=None)
    estimate.add_argument("--tau", type=int, default=None)
    estimate.add_argument("--delta", type=float, default=None)
    estimate.add_argument("--seed", type=seed_value, default=0)
    _output_flags(estimate)

    benchmark = sub.add_parser("benchmark", help="run a Monte Carlo experiment")
    benchmark.add_argument("--config", metavar="FILE", required=True, help="YAML or JSON experiment config")
    benchmark.add_argument("--seed", type=seed_value, default=None, help="override the config's master seed")
    benchmark.add_argument("--runs", type=positive_int, default=None, help="override the config's run count")
    benchmark.add_argument("--jobs", type=positive_int, default=None)
    benchmark.add_argument("--timing", action="store_true", help="fill the ms_elapsed column")
    _output_flags(benchmark, ["csv", "json"], default="csv")

    oracle = sub.add_parser("oracle", help="check closed-form counts against enumeration")
    oracle.add_argument("--check", choices=CHECKS, required=True)
    oracle.add_argument("--trials", type=positive_int, default=None)
    oracle.add_argument("--seed", type=seed_value, default=0)
    oracle.add_argument("--out", metavar="FILE", help="write the JSON report here as well")

    return parser
