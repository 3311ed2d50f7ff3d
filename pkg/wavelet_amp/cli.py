# cli.py

import argparse
import json
import os
import sys
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from wavelet_amp.config import ConfigError, SimConfig, resolve_config
from wavelet_amp.dictionary import build_dictionary
from wavelet_amp.matching_pursuit import SampledDictionary, decompose
from wavelet_amp.run_archive import (
    AtomArchive,
    DecomposeArchive,
    GoldenStatus,
    RunArchive,
    read_signal_csv,
    verify_golden,
    write_trace_csv,
)
from wavelet_amp.simulation import SimulationHalted, simulate
from wavelet_amp.utils.logger import logger
from wavelet_amp.utils.svg_plot import render_lines, render_svg

log = logger(__name__)

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_HALTED = 2
EXIT_IO = 3
EXIT_GOLDEN_MISMATCH = 4

DEFAULT_MAX_ITERS = 50

# file name -> plotted trace columns
RUN_PLOTS = (
    ("output.svg", ("y", "ym"), "plant output and reference"),
    ("input.svg", ("u",), "control input"),
    ("identification.svg", ("f_true", "f_hat"), "true and estimated nonlinearity"),
)


class GoldenMismatch(Exception):
    """A run trace differs from its recorded golden hash."""


class Subcommand(str, Enum):
    EXAMPLE1 = "example1"
    EXAMPLE2 = "example2"
    CUSTOM = "custom"
    DECOMPOSE = "decompose"
    EXPORT_ATOMS = "export-atoms"


@dataclass(frozen=True)
class RunCommand:
    subcommand: Subcommand
    config_path: Optional[str] = None
    output_dir: Optional[str] = None
    overrides: Tuple[str, ...] = ()
    svg: bool = False
    signal_path: Optional[str] = None
    max_iters: int = DEFAULT_MAX_ITERS
    tol: float = 0.0
    golden_dir: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "subcommand", Subcommand(self.subcommand))
        object.__setattr__(self, "overrides", tuple(self.overrides))
        if self.subcommand is Subcommand.CUSTOM and not self.config_path:
            raise ConfigError("custom runs need a config file")
        if self.subcommand is Subcommand.DECOMPOSE and not self.signal_path:
            raise ValueError("decompose needs a signal CSV file")
        if self.output_dir is None:
            object.__setattr__(self, "output_dir", os.path.join("runs", self.subcommand.value))

    @property
    def preset(self) -> Optional[str]:
        if self.subcommand in (Subcommand.EXAMPLE1, Subcommand.EXAMPLE2):
            return self.subcommand.value
        return None


def resolve(cmd: RunCommand) -> SimConfig:
    return resolve_config(preset=cmd.preset, config_path=cmd.config_path, overrides=cmd.overrides)


def _run(cmd: RunCommand) -> dict:
    config = resolve(cmd)
    try:
        result = simulate(config)
    except SimulationHalted as e:
        # keep what ran for inspection
        os.makedirs(cmd.output_dir, exist_ok=True)
        write_trace_csv(e.trace, os.path.join(cmd.output_dir, "trace.csv"))
        raise

    archive = RunArchive(cmd.output_dir, result, config.to_dict())
    if cmd.svg:
        for file_name, columns, title in RUN_PLOTS:
            render_svg(result.trace, columns, archive.path(file_name), title=title)

    summary = result.metrics.as_dict()
    if cmd.golden_dir is not None:
        status = verify_golden(archive.location(), cmd.golden_dir)
        if status is GoldenStatus.MISMATCH:
            raise GoldenMismatch(f"trace {archive.location()} differs from the golden record in {cmd.golden_dir}")
        summary["golden"] = status.value
    return summary


def _export_atoms(cmd: RunCommand) -> dict:
    config = resolve(cmd)
    dictionary = build_dictionary(config.dictionary, regressor_dim=config.regressor.dimension)
    archive = AtomArchive(cmd.output_dir, dictionary)
    if cmd.svg:
        series = {f"atom_{i}": archive.values[:, i] for i in range(dictionary.n)}
        render_lines(archive.grid, series, archive.path("atoms.svg"), title="dictionary atoms", x_label="x")
    return {"atoms": dictionary.n, "points": int(archive.grid.size), "sha256": archive.hash()}


def _decompose(cmd: RunCommand) -> dict:
    config = resolve(cmd)
    if not os.path.isfile(cmd.signal_path):
        raise ValueError(f"signal not found: {cmd.signal_path}")
    signal = read_signal_csv(cmd.signal_path)
    if signal.size == 0:
        raise ValueError(f"signal file {cmd.signal_path} has no samples")

    dictionary = build_dictionary(config.dictionary, regressor_dim=config.regressor.dimension)
    grid = np.arange(signal.size) * (dictionary.period / signal.size)
    sampled = SampledDictionary.normalized(np.array([dictionary.evaluate_at(x) for x in grid]))
    result = decompose(signal, sampled, cmd.max_iters, cmd.tol)
    DecomposeArchive(cmd.output_dir, result)

    final = result.residual_norms[-1] if result.residual_norms else float(np.linalg.norm(signal))
    return {"picks": len(result.picks), "residual_norm": final}


HANDLERS = {
    Subcommand.EXAMPLE1: _run,
    Subcommand.EXAMPLE2: _run,
    Subcommand.CUSTOM: _run,
    Subcommand.DECOMPOSE: _decompose,
    Subcommand.EXPORT_ATOMS: _export_atoms,
}


def run_command(cmd: RunCommand) -> int:
    """Execute one command; print its summary as JSON and return the exit status."""
    try:
        summary = HANDLERS[cmd.subcommand](cmd)
    except SimulationHalted as e:
        print(f"wavelet-amp: {e}", file=sys.stderr)
        return EXIT_HALTED
    except GoldenMismatch as e:
        print(f"wavelet-amp: {e}", file=sys.stderr)
        return EXIT_GOLDEN_MISMATCH
    except ValueError as e:
        print(f"wavelet-amp: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as e:
        print(f"wavelet-amp: cannot write to {cmd.output_dir}: {e}", file=sys.stderr)
        return EXIT_IO

    print(json.dumps(summary, indent=2, sort_keys=True))
    log.info(f"{cmd.subcommand.value} finished, artifacts in {cmd.output_dir}")
    return EXIT_OK


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", dest="config_path", help="JSON or YAML config layered over the defaults")
    parser.add_argument("--out", dest="output_dir", help="output directory (default runs/<subcommand>)")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key, e.g. noise.std=0 (repeatable)",
    )
    parser.add_argument("--svg", action="store_true", help="also render SVG plots")


def _golden(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--golden", dest="golden_dir", metavar="DIR",
        help="compare trace.csv with the hash recorded in DIR, recording it when DIR has none",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavelet-amp",
        description="Adaptive matching pursuit identification and control of the benchmark plants.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    for name, text in (
        (Subcommand.EXAMPLE1, "run the first benchmark plant (ramped parameter)"),
        (Subcommand.EXAMPLE2, "run the second benchmark plant (parameter step)"),
    ):
        example = subparsers.add_parser(name.value, help=text)
        _common(example)
        _golden(example)

    custom = subparsers.add_parser(Subcommand.CUSTOM.value, help="run a config file")
    custom.add_argument("path", nargs="?", help="config file (same as --config)")
    _common(custom)
    _golden(custom)

    atoms = subparsers.add_parser(Subcommand.EXPORT_ATOMS.value, help="tabulate the configured dictionary")
    _common(atoms)

    pursuit = subparsers.add_parser(Subcommand.DECOMPOSE.value, help="matching pursuit of a CSV signal")
    pursuit.add_argument("signal", help="one-column CSV signal sampled uniformly over one period")
    pursuit.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    pursuit.add_argument("--tol", type=float, default=0.0)
    _common(pursuit)
    return parser


def parse_command(argv: Optional[Sequence[str]] = None) -> RunCommand:
    args = build_parser().parse_args(argv)
    config_path = args.config_path or getattr(args, "path", None)
    return RunCommand(
        subcommand=Subcommand(args.subcommand),
        config_path=config_path,
        output_dir=args.output_dir,
        overrides=tuple(args.overrides),
        svg=args.svg,
        signal_path=getattr(args, "signal", None),
        max_iters=getattr(args, "max_iters", DEFAULT_MAX_ITERS),
        tol=getattr(args, "tol", 0.0),
        golden_dir=getattr(args, "golden_dir", None),
    )


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cmd = parse_command(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, which would read as a halted run
        return EXIT_OK if e.code in (0, None) else EXIT_BAD_INPUT
    except ValueError as e:
        print(f"wavelet-amp: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    return run_command(cmd)


if __name__ == "__main__":
    sys.exit(main())
