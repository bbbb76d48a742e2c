"""Command line entry point: ``fermionic-epi <subcommand> [options]``.

Options may also come from a ``key=value`` file passed with ``--config``;
explicit flags win. Output files go to ``--out`` or, failing that, to the
directory named by ``FERMIONIC_EPI_OUT`` (default ``./results``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from dataclasses import fields
from pathlib import Path

from .experiments import RUNNERS, ExperimentConfig, parse_grid
from .reports import write_report

OUT_ENV = "FERMIONIC_EPI_OUT"

log = logging.getLogger("fermionic_epi")


def _modes(text: str) -> tuple[int, ...]:
    out = tuple(int(x) for x in str(text).split(",") if x.strip())
    if not out or any(m < 1 or m > 6 for m in out):
        raise argparse.ArgumentTypeError(f"modes must be integers in [1, 6], got {text!r}")
    return out


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _grid(text: str) -> tuple[float, ...]:
    try:
        grid = parse_grid(str(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not grid or any(not 0.0 <= x <= 1.0 for x in grid):
        raise argparse.ArgumentTypeError("lambda values must lie in [0, 1]")
    return grid


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return value


def _step(text: str) -> float:
    value = float(text)
    if not 1e-5 <= value <= 1e-2:
        raise argparse.ArgumentTypeError("step must lie in [1e-5, 1e-2]")
    return value


PARSERS = {
    "modes": _modes,
    "trials": _positive_int,
    "lambda_grid": _grid,
    "seed": int,
    "t": _nonneg_float,
    "h": _step,
    "workers": _positive_int,
}


def read_config_file(path: str | Path) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment, dashes in keys are allowed."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARSERS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = PARSERS[key](value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise ValueError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermionic-epi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--modes", type=_modes, help="comma separated mode counts, e.g. 1,2")
        p.add_argument("--trials", type=_positive_int)
        p.add_argument("--lambda-grid", dest="lambda_grid", type=_grid, help="a:b:step or a comma list")
        p.add_argument("--seed", type=int)
        p.add_argument("--t", type=_nonneg_float, help="diffusion time")
        p.add_argument("--h", type=_step, help="finite-difference step")
        p.add_argument("--workers", type=_positive_int)
        p.add_argument("--config", type=Path, help="key=value file; flags override it")
        p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./results)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config is not None:
        values.update(read_config_file(args.config))
    for f in fields(ExperimentConfig):
        given = getattr(args, f.name, None)
        if given is not None:
            values[f.name] = given
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    out_dir = args.out or Path(os.environ.get(OUT_ENV, "results"))
    start = time.perf_counter()
    report = RUNNERS[args.command](cfg)
    elapsed = time.perf_counter() - start
    paths = write_report(report, out_dir)
    print(report.summary())
    print(f"wall time {elapsed:.2f}s; wrote " + ", ".join(str(p) for p in paths.values()))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
