"""Command-line driver for the verification suites.

    polycauchy-verify involution --m 3 --k 1 --levels 4,8,16 --seed 42 --out report.json

A ``--config`` file holds flat ``key=value`` lines (``#`` starts a comment);
command-line flags override it.  Tolerances are set with ``tol.<name>=value``
in the file or ``--tol name=value`` on the command line.  When
``POLYCAUCHY_OUTPUT_DIR`` is set, relative report paths resolve inside it and
a report is written even without ``--out``.

Exit codes: 0 all records pass, 1 some record failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .suites import SUITES, ConfigError, ExperimentConfig, run

OUTPUT_DIR_ENV = "POLYCAUCHY_OUTPUT_DIR"

_INT = {"m", "k", "degree", "kernel_order", "nodes", "seed"}
_FLOAT = {"alpha", "radius"}
_STR = {"surface", "data", "data_file", "out"}


def parse_config_file(path: str | Path) -> dict:
    """Flat ``key=value`` pairs; values stay strings until :func:`make_config`."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def make_config(raw: dict) -> ExperimentConfig:
    kwargs: dict = {}
    tols: dict = {}
    for key, value in raw.items():
        try:
            if key.startswith("tol."):
                tols[key[4:]] = float(value)
            elif key == "levels":
                kwargs["levels"] = tuple(int(v) for v in str(value).split(",") if v.strip())
            elif key in _INT:
                kwargs[key] = int(value)
            elif key in _FLOAT:
                kwargs[key] = float(value)
            elif key in _STR:
                kwargs[key] = str(value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return ExperimentConfig(tolerances=tols, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polycauchy-verify", description="Run verification suites.")
    p.add_argument("command", choices=[*SUITES, "all"])
    p.add_argument("--config", help="key=value configuration file")
    for name in ("m", "k", "degree", "kernel-order", "nodes", "seed"):
        p.add_argument(f"--{name}", type=int)
    for name in ("alpha", "radius"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--levels", help="comma-separated refinement levels, e.g. 4,8,16")
    p.add_argument("--data", choices=["polynomial", "trig", "zero", "file"])
    p.add_argument("--data-file")
    p.add_argument("--surface")
    p.add_argument("--out", help="report path (JSON)")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    return p


def format_table(report: dict) -> str:
    rows = [("name", "level", "metric", "value", "tolerance", "pass")]
    for r in report["records"]:
        rows.append(
            (
                r["name"],
                "-" if r["level"] is None else str(r["level"]),
                r["metric"],
                f"{r['value']:.3e}",
                f"{r['tolerance']:.1e}",
                "PASS" if r["pass"] else "FAIL",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in rows]
    lines.append(f"overall: {'PASS' if report['pass'] else 'FAIL'}")
    return "\n".join(lines)


def report_path(command: str, out: str | None) -> Path | None:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if out is None:
        return Path(base) / f"{command}-report.json" if base else None
    path = Path(out)
    return Path(base) / path if base and not path.is_absolute() else path


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        raw = parse_config_file(args.config) if args.config else {}
        for key in ("m", "k", "degree", "kernel_order", "nodes", "seed", "alpha", "radius", "levels", "data", "data_file", "surface", "out"):
            value = getattr(args, key)
            if value is not None:
                raw[key] = value
        for item in args.tol:
            if "=" not in item:
                raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}")
            name, value = item.split("=", 1)
            raw[f"tol.{name.strip()}"] = value
        cfg = make_config(raw)
    except (ConfigError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(args.command, cfg)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    print(format_table(report))
    path = report_path(args.command, cfg.out)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0 if report["pass"] else 1


if __name__ == "__main__":
    sys.exit(main())
