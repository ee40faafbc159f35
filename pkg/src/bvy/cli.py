"""Command-line entry point.

Usage::

    bvy run --config suite.toml --out reports/ [--format json-lines|csv]
            [--seed N] [--threads K] [--emit-curves]

Exit codes: 0 when every theorem-labeled check passes, 1 when any fails,
2 on configuration or invocation errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from bvy.harness import (
    ConfigError,
    emit_csv,
    emit_curves,
    emit_json_lines,
    exit_code,
    load_config,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvy",
        description=(
            "Evaluate level-set gradient-norm functionals on ball Banach "
            "function spaces and report theorem-backed checks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute an experiment suite")
    runp.add_argument("--config", required=True, help="TOML suite file")
    runp.add_argument("--out", required=True, help="output directory for reports")
    runp.add_argument(
        "--format",
        choices=("json-lines", "csv"),
        default="json-lines",
        help="report format (default: json-lines)",
    )
    runp.add_argument("--seed", type=int, default=None, help="override the suite seed")
    runp.add_argument("--threads", type=int, default=1, help="concurrent experiments")
    runp.add_argument(
        "--emit-curves",
        action="store_true",
        help="also write per-check (lambda, value) series as CSV",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command != "run":  # pragma: no cover - argparse enforces this
        return 2

    if args.seed is not None and not (0 <= args.seed < 2**64):
        print("error: --seed must fit an unsigned 64-bit integer", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2

    try:
        suite = load_config(args.config, seed_override=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: output path not writable: {exc}", file=sys.stderr)
        return 2

    records = run(suite, threads=args.threads)

    if args.format == "json-lines":
        report = emit_json_lines(records, out_dir / "report.jsonl")
    else:
        report = emit_csv(records, out_dir / "report.csv")
    if args.emit_curves:
        emit_curves(records, out_dir / "curves")

    counts: dict[str, int] = {}
    for rec in records:
        counts[rec.status] = counts.get(rec.status, 0) + 1
    summary = ", ".join(f"{k}={v}" for k, v in sorted(counts.items())) or "no checks"
    print(f"suite '{suite.name}' ({suite.config_hash}): {summary}")
    print(f"report: {report}")
    return exit_code(records)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
