"""Command-line scenario runner.

    pathmeasure run <config.json> [--seed N] [--out DIR] [--figures]
    pathmeasure validate <config.json>
    pathmeasure version

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .config import ConfigError, ScenarioConfig, load, validate, validate_dict
from .errors import PathMeasureError
from .report import write_csv, write_manifest
from .rng import default_workers
from .scenarios import RUNNERS

OUT_ENV = "PATHMEASURE_OUT"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass
class RunManifest:
    config: dict
    version: str
    duration_s: float
    outputs: list[str]
    checks: list[dict]

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "version": self.version,
            "wall_clock_seconds": self.duration_s,
            "outputs": self.outputs,
            "invariant_checks": {
                "passed": sum(c["passed"] for c in self.checks),
                "failed": sum(not c["passed"] for c in self.checks),
                "results": self.checks,
            },
        }


def run(config: ScenarioConfig, *, workers: int | None = None, figures: bool = False) -> RunManifest:
    """Execute a scenario and write its CSV tables (and optionally figures) plus a manifest."""
    problems = validate_dict(config.to_dict())
    if problems:
        raise ConfigError(problems)
    start = time.perf_counter()
    outcome = RUNNERS[config.scenario](config, workers)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for table in outcome.tables:
        write_csv(out_dir / table.filename, table)
        outputs.append(table.filename)
    if figures and outcome.figures:
        from .plotting import render_all

        for path in render_all(outcome, out_dir / "figures"):
            outputs.append(str(path.relative_to(out_dir)))
    manifest = RunManifest(
        config=config.to_dict(),
        version=__version__,
        duration_s=time.perf_counter() - start,
        outputs=outputs,
        checks=[{"name": c.name, "passed": bool(c.passed), "detail": c.detail} for c in outcome.checks],
    )
    write_manifest(out_dir / "manifest.json", manifest.to_dict())
    return manifest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathmeasure", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", type=Path, default=None, help="output directory")
    p_run.add_argument("--figures", action="store_true", help="also render PNG figures")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config", type=Path)
    sub.add_parser("version", help="print the tool version")
    return parser


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise ConfigError([f"$: cannot read {path} ({exc.strerror})"]) from exc


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "version":
        print(__version__)
        return EXIT_OK

    if args.command == "validate":
        try:
            diagnostics = validate(_read(args.config))
        except ConfigError as exc:
            diagnostics = exc.diagnostics
        for d in diagnostics:
            print(d)
        if diagnostics:
            return EXIT_CONFIG
        print(f"{args.config}: ok")
        return EXIT_OK

    try:
        config = load(_read(args.config))
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.output_dir = str(args.out)
        elif os.environ.get(OUT_ENV):
            config.output_dir = os.environ[OUT_ENV]
        manifest = run(config, workers=default_workers(), figures=args.figures)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_CONFIG
    except PathMeasureError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # parameter combinations that pass field checks but violate a type invariant
        print(f"$.parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for check in manifest.checks:
        mark = "PASS" if check["passed"] else "FAIL"
        print(f"[{mark}] {check['name']}: {check['detail']}")
    print(f"wrote {len(manifest.outputs)} files to {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
