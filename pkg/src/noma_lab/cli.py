"""``noma-lab`` command line: run, oracle, bench, figures.

Exit codes: 0 success, 1 configuration error, 2 oracle deviation,
3 runtime failure. ``NOMA_LAB_THREADS`` caps the number of worker processes.
"""

import argparse
import logging
import sys
from pathlib import Path

from .harness.bench import bench_to_csv, run_bench
from .harness.config import ConfigError, load_config
from .harness.figures import DEFAULT_TRIALS, run_figures
from .harness.oracle import run_oracle
from .harness.sweep import THREADS_ENV, summary_to_csv, timing_to_csv, worker_count, run_sweep, write_text

EXIT_OK, EXIT_CONFIG, EXIT_ORACLE, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("noma_lab")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _overrides(extra):
    """``--key value`` / ``--key=value`` pairs left over by argparse."""
    items, i = [], 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ConfigError(tok, "expected --key value")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise ConfigError(key, "missing value")
            value = extra[i + 1]
            i += 2
        items.append((key, value))
    return items


def _sibling(path, suffix):
    p = Path(path)
    return p.with_name(f"{p.stem}_{suffix}{p.suffix or '.csv'}")


def cmd_run(args, extra):
    config = load_config(args.config, _overrides(extra))
    result = run_sweep(config)
    raw = result.raw_csv()
    if args.out:
        write_text(args.out, raw)
        write_text(_sibling(args.out, "summary"), summary_to_csv(result.summary()))
        write_text(_sibling(args.out, "timing"), timing_to_csv(result.rows, result.runtimes_ms))
        log.info("wrote %d rows to %s", len(result.rows), args.out)
    else:
        sys.stdout.write(raw)
    return EXIT_OK


def cmd_oracle(args, extra):
    if extra:
        raise ConfigError(extra[0], "oracle takes only --instances and --seed")
    report = run_oracle(args.instances, args.seed)
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed else EXIT_ORACLE


def cmd_bench(args, extra):
    config = load_config(args.config, _overrides(extra))
    text = bench_to_csv(run_bench(config, args.reps))
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_figures(args, extra):
    if extra:
        raise ConfigError(extra[0], "figures takes only --out-dir, --trials and --seed")
    if args.trials < 1:
        raise ConfigError("trials", "must be >= 1")

    def progress(sweep, i, n):
        log.info("%s: %d/%d trials", sweep, i, n)

    run_figures(args.out_dir, trials=args.trials, seed=args.seed, progress=progress)
    print(f"figures written to {args.out_dir}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="noma-lab", description="MIMO-NOMA clustering experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="Monte-Carlo sweep from a config file; extra --key value pairs override it")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="raw CSV path (summary and timing files are written next to it)")
    run.set_defaults(func=cmd_run)

    oracle = sub.add_parser("oracle", help="check the closed-form power against the fixed-point iteration")
    oracle.add_argument("--instances", type=int, default=1000)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="median fit time per algorithm and sweep point")
    bench.add_argument("--config", required=True)
    bench.add_argument("--reps", type=int, default=None)
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench)

    figures = sub.add_parser("figures", help="run the six preset figure scenarios")
    figures.add_argument("--out-dir", required=True)
    figures.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    figures.add_argument("--seed", type=int, default=0)
    figures.set_defaults(func=cmd_figures)
    return parser


def main(argv=None):
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        worker_count(1)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if extra and args.command in ("oracle", "figures"):
        parser.error(f"unrecognized arguments: {' '.join(extra)}")
    try:
        return args.func(args, extra)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure past config maps to exit 3
        log.debug("runtime failure", exc_info=True)
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
