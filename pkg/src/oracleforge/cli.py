"""``oracleforge`` command line: bench, demo, report.

Exit codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench.harness import BenchmarkError, run_benchmark
from .bench.report import FORMATS, ReportError, render
from .config import CONFIG_ENV, ConfigError, RunConfig, load_config, with_overrides
from .oracles import PatternKind
from .usecases import World, run_credit_check, run_qr_trace

logger = logging.getLogger("oracleforge")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("count must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help=f"JSON run config (default: ${CONFIG_ENV})")
    common.add_argument("--seed", type=_u64, metavar="U64", help="chain seed")
    common.add_argument("--realtime", action="store_true", help="sleep in wall-clock time instead of virtual time")
    common.add_argument("--transport", choices=("http", "inprocess"), help="how oracles reach off-chain services")

    parser = argparse.ArgumentParser(prog="oracleforge", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", parents=[common], help="benchmark one oracle pattern")
    bench.add_argument("--pattern", choices=[k.value for k in PatternKind])
    bench.add_argument("--n", type=_count, metavar="COUNT", help="number of invocations")
    bench.add_argument("--out", metavar="PATH", help="CSV path (default: <pattern>.csv)")
    bench.add_argument("--summary", metavar="PATH", help="summary JSON path (default: next to the CSV)")
    bench.add_argument("--pipeline", action="store_true", default=None, help="keep all invocations in flight")

    demo = sub.add_parser("demo", parents=[common], help="run a supply-chain scenario")
    demo.add_argument("scenario", choices=("credit-check", "qr-trace"))
    demo.add_argument("--scans", type=_count, default=10, help="qr-trace: number of scans")
    demo.add_argument("--restart-listener", action="store_true", help="qr-trace: restart the ERP listener mid-run")
    demo.add_argument("--tax-id", default="AT-123", help="credit-check: buyer tax id")
    demo.add_argument("--buyer", default="Bulk Buyer", help="credit-check: buyer name")
    demo.add_argument("--order-id", type=_count, default=1, help="credit-check: order id")
    demo.add_argument("--out", metavar="PATH", help="also write the result JSON here")

    report = sub.add_parser("report", help="summarize a benchmark CSV")
    report.add_argument("csv", metavar="CSV")
    report.add_argument("--format", choices=FORMATS, default="table")
    return parser


def _config(args) -> RunConfig:
    config = load_config(args.config)
    return with_overrides(
        config,
        chain={"seed": args.seed, "clock_mode": "realtime" if args.realtime else None},
        offchain={"transport": args.transport},
    )


def cmd_bench(args) -> int:
    config = _config(args)
    config = with_overrides(config, benchmark={"pattern": args.pattern, "n": args.n, "pipeline": args.pipeline})
    bench_cfg = config.benchmark
    csv_path = Path(args.out or config.output.csv or f"{bench_cfg.pattern}.csv")
    summary_path = Path(args.summary or config.output.summary or csv_path.with_suffix(".summary.json"))
    try:
        result = run_benchmark(bench_cfg.pattern, bench_cfg.n, config, bench_cfg.pipeline)
    except BenchmarkError as exc:
        exc.partial.write(csv_path, summary_path)
        print(f"error: {exc} (partial results in {csv_path})", file=sys.stderr)
        return EXIT_FAILURE
    result.write(csv_path, summary_path)
    if result.measurements:
        print(result.table())
    print(f"{len(result.measurements)} measured, {result.failures} failed; wrote {csv_path} and {summary_path}",
          file=sys.stderr)
    return EXIT_OK if result.measurements else EXIT_FAILURE


def cmd_demo(args) -> int:
    config = _config(args)
    with World(config) as world:
        if args.scenario == "credit-check":
            result = run_credit_check(world, order_id=args.order_id, buyer_name=args.buyer, tax_id=args.tax_id)
        else:
            result = run_qr_trace(world, args.scans, seed=config.chain.seed, restart_listener=args.restart_listener)
            if config.offchain.erp_dump:
                world.erp.save(config.offchain.erp_dump)
    text = json.dumps(result.to_json(), indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    if not result.succeeded:
        print(f"error: {result.scenario} ended {result.status} at step {result.failed_step}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        print(render(args.csv, args.format))
    except ReportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS = {"bench": cmd_bench, "demo": cmd_demo, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TimeoutError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
