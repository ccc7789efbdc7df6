"""Command line front end.

Exit codes: 0 success, 2 validation error, 3 numerical invariant violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import NumericalInvariantError, ValidationError
from .config import RunConfig, load_json
from .plotscript import emit_plotscript
from .presets import PRESET_NAMES, preset
from .runner import configs_from_document, run_configs, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValidationError(f"--values must be comma-separated numbers ({exc})") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qbattery", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run-preset", help="reproduce a figure: one CSV per curve plus manifest.json")
    p.add_argument("name", help=f"one of {', '.join(PRESET_NAMES)}")
    p.add_argument("--out", default="results", help="parent directory (default: results)")

    p = sub.add_parser("run", help="run a config or replay a manifest")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("sweep", help="sweep one config parameter into a single CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, help="dotted path, e.g. parameters.ratio")
    p.add_argument("--values", required=True, help="comma-separated numbers")
    p.add_argument("--out", required=True, help="CSV path")

    p = sub.add_parser("plot-script", help="write a matplotlib script for a CSV")
    p.add_argument("csv")
    p.add_argument("preset")
    p.add_argument("--out", default=None)

    p = sub.add_parser("validate", help="check a config without running it")
    p.add_argument("--config", required=True)

    p = sub.add_parser("show-preset", help="print the RunConfig JSON of one preset curve")
    p.add_argument("name")
    p.add_argument("--curve", type=int, default=0, help="curve index (default 0)")
    return ap


def _dispatch(args) -> None:
    if args.cmd == "run-preset":
        configs = preset(args.name)
        outdir = Path(args.out) / args.name
        man = run_configs(args.name, configs, outdir)
        for c in man["curves"]:
            print(outdir / c["csv"])
        print(outdir / "manifest.json")
    elif args.cmd == "run":
        name, configs = configs_from_document(load_json(args.config))
        man = run_configs(name, configs, args.out)
        for c in man["curves"]:
            print(c["csv"])
    elif args.cmd == "sweep":
        base = load_json(args.config)
        RunConfig.from_dict(base)
        table = run_sweep(base, args.param, _parse_values(args.values), args.out)
        print(f"{args.out}: {table.rows.shape[0]} rows")
    elif args.cmd == "plot-script":
        print(emit_plotscript(args.csv, args.preset, args.out))
    elif args.cmd == "validate":
        _, configs = configs_from_document(load_json(args.config))
        print(f"ok: {len(configs)} curve(s)")
    elif args.cmd == "show-preset":
        configs = preset(args.name)
        if not 0 <= args.curve < len(configs):
            raise ValidationError(f"{args.name} has curves 0..{len(configs) - 1}")
        print(json.dumps(configs[args.curve].to_dict(), indent=2))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _dispatch(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
