"""Command-line front end for running and inspecting scenarios.

Exit codes: 0 on success, 2 for configuration problems (bad TOML, invalid
values, unknown scenarios, wrap-budget violations, unwritable outputs),
3 for numeric failures discovered while computing.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfqmError, DataError, NormalizationError, NumericError
from .scenarios import BUILTIN_SCENARIOS, check_scenario, load_config, run_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confqm",
        description="Evolve wave functions on position-velocity configuration space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and write its outputs")
    check_p = sub.add_parser(
        "check", help="validate a scenario and its wrap budget without evolving"
    )
    for p in (run_p, check_p):
        p.add_argument(
            "config",
            help="path to a scenario TOML file, or a builtin scenario name",
        )
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override a config entry by dotted key, e.g. evolve.dt=5e-4 "
            "or packets.0.x0=2.0 (repeatable)",
        )
        p.add_argument("--quiet", action="store_true", help="suppress the summary")
    run_p.add_argument(
        "--out-dir", default=".", help="directory for CSV/snapshot/report outputs"
    )
    run_p.add_argument(
        "--workers", type=int, default=1, help="FFT worker threads (results are identical)"
    )

    list_p = sub.add_parser("list-scenarios", help="list the builtin scenarios")
    list_p.add_argument(
        "--emit", action="store_true", help="also write each builtin as a TOML file"
    )
    list_p.add_argument(
        "--out-dir", default=".", help="directory for --emit (default: current)"
    )
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config, overrides=args.override)
    report = run_scenario(config, out_dir=args.out_dir, workers=args.workers)
    if not args.quiet:
        s = report.summary
        final = s["final"]
        print(f"scenario {config.name} ({config.kind}): {s['records']} records "
              f"to t = {s['t_final']:g}")
        print(f"  grid {s['grid']}")
        print(f"  final <x> = {final['mean_x']:.6g}, <v> = {final['mean_v']:.6g}, "
              f"norm drift {s['norm_drift']:.3g}")
        for name, result in s.get("comparisons", {}).items():
            shown = ", ".join(
                f"{k} = {v:.6g}" if isinstance(v, float) else f"{k} = {v}"
                for k, v in result.items()
            )
            print(f"  {name}: {shown}")
        for path in report.paths:
            print(f"  wrote {path}")
    return 0


def _cmd_check(args) -> int:
    config = load_config(args.config, overrides=args.override)
    summary = check_scenario(config)
    if not args.quiet:
        print(f"scenario {summary['scenario']} ({summary['kind']}): ok")
        print(f"  grid {summary['grid']}")
        print(f"  {summary['packets']} packet(s), t_final = {summary['t_final']:g}")
        if "note" in summary:
            print(f"  {summary['note']}")
    return 0


def _cmd_list(args) -> int:
    for name in BUILTIN_SCENARIOS:
        print(name)
    if args.emit:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in BUILTIN_SCENARIOS.items():
            path = out / f"{name}.toml"
            path.write_text(text)
            print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "check":
            return _cmd_check(args)
        return _cmd_list(args)
    except (NumericError, DataError, NormalizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfqmError, tomllib.TOMLDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
