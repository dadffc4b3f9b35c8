"""Command-line interface.

Thin dispatch over the library: parse arguments, run one pipeline, write
one deterministic report. Exit codes: 0 success, 1 usage error, 2 data
or validation error. Set ``GCA_LOG`` (DEBUG/INFO/WARNING/ERROR) for
diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import report
from .bench import run_bench
from .dcpf import compute_lodf
from .matpower import load_case, network_to_json
from .model import GcaError, parse_branch_label
from .oracle import bruteforce_nx
from .screening import ScreeningConfig, screen
from .verify import lodf_stability_report, verify_candidate

log = logging.getLogger(__name__)

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("case", help="MATPOWER case file")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def _add_jobs(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="parallel worker processes (output is identical at any degree)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="gca", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dump", help="canonical JSON dump of the network")
    _add_common(p)

    p = sub.add_parser("lodf", help="line outage distribution factor matrix")
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("screen", help="rank candidate contingency groups")
    _add_common(p)
    p.add_argument("--x", type=int, required=True, help="contingency order")
    p.add_argument("--search-level", type=int, default=3, help="neighborhood hop radius")
    p.add_argument("--top-percent", type=float, default=10.0, help="seed branch slice")
    p.add_argument("--nlodf-cap", type=float, default=1.0, help="score saturation value")
    p.add_argument(
        "--legacy-path-count",
        action="store_true",
        help="score groups by the representative-path count instead of GBC",
    )
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_jobs(p)

    p = sub.add_parser("verify", help="apply one contingency and classify the outcome")
    _add_common(p)
    p.add_argument(
        "--contingency",
        required=True,
        help="comma-separated from-to-circuit triples, e.g. 136-133-1,135-133-1",
    )
    p.add_argument("--overflow-threshold", type=float, default=100.0)

    p = sub.add_parser("bruteforce", help="enumerate and verify every N-x subset")
    _add_common(p)
    p.add_argument("--x", type=int, choices=(1, 2), required=True)
    p.add_argument("--overflow-threshold", type=float, default=100.0)
    _add_jobs(p)

    p = sub.add_parser("stability", help="sensitivity drift across an outage sequence")
    _add_common(p)
    p.add_argument(
        "--sequence",
        required=True,
        help="file with one from-to-circuit triple per line (or comma separated)",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("bench", help="time screening over an (x, level) grid")
    _add_common(p)
    p.add_argument("--x-range", default="1:8", help="inclusive range, e.g. 1:8")
    p.add_argument("--level-range", default="1:8", help="inclusive range, e.g. 1:8")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--top-percent", type=float, default=10.0)
    p.add_argument(
        "--pause",
        type=float,
        default=0.0,
        help="seconds of cooldown before each repetition (dodges CPU-quota throttling)",
    )
    _add_jobs(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _parse_range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise GcaError(f"bad range {text!r}: expected N or LO:HI") from None
    if not values:
        raise GcaError(f"empty range {text!r}")
    return values


def _parse_sequence_file(path: str) -> list:
    p = Path(path)
    if not p.is_file():
        raise GcaError(f"sequence file not found: {p}")
    keys = []
    for chunk in p.read_text().replace(",", "\n").splitlines():
        chunk = chunk.strip()
        if chunk and not chunk.startswith("#"):
            keys.append(parse_branch_label(chunk))
    if not keys:
        raise GcaError(f"sequence file {p} lists no branches")
    return keys


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: list[str]) -> int:
    """Execute one subcommand; returns the process exit code."""
    level = os.environ.get("GCA_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr)

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "serve":
            import uvicorn

            from .service.app import create_app

            uvicorn.run(create_app(), host=args.host, port=args.port)
            return 0

        net = load_case(args.case)

        if args.command == "dump":
            _emit(network_to_json(net), args.output)
        elif args.command == "lodf":
            lodf = compute_lodf(net)
            if args.format == "csv":
                _emit(report.lodf_to_csv(lodf), args.output)
            else:
                _emit(report.to_json(report.lodf_to_dict(lodf)), args.output)
        elif args.command == "screen":
            cfg = ScreeningConfig(
                x=args.x,
                search_level=args.search_level,
                top_percent=args.top_percent,
                nlodf_cap=args.nlodf_cap,
                legacy_path_count=args.legacy_path_count,
            )
            candidates = screen(net, cfg, jobs=args.jobs)
            if args.format == "json":
                _emit(report.candidates_to_json(candidates), args.output)
            else:
                _emit(report.candidates_to_csv(candidates), args.output)
        elif args.command == "verify":
            keys = [parse_branch_label(part) for part in args.contingency.split(",")]
            result = verify_candidate(net, keys, overflow_threshold=args.overflow_threshold)
            _emit(report.violation_to_json(result), args.output)
        elif args.command == "bruteforce":
            results = bruteforce_nx(
                net, args.x, overflow_threshold=args.overflow_threshold, jobs=args.jobs
            )
            _emit(report.violations_to_json(results), args.output)
        elif args.command == "stability":
            sequence = _parse_sequence_file(args.sequence)
            result = lodf_stability_report(net, sequence)
            if args.format == "csv":
                _emit(report.stability_to_csv(result), args.output)
            else:
                _emit(report.to_json(report.stability_to_dict(result)), args.output)
        elif args.command == "bench":
            rows = run_bench(
                net,
                xs=_parse_range(args.x_range),
                levels=_parse_range(args.level_range),
                reps=args.reps,
                top_percent=args.top_percent,
                jobs=args.jobs,
                pause_s=args.pause,
            )
            _emit(report.bench_to_csv(rows), args.output)
        else:  # pragma: no cover - argparse enforces the choices
            parser.error(f"unknown command {args.command}")
    except GcaError as exc:
        print(f"gca: error: {exc}", file=sys.stderr)
        return DATA_ERROR
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
