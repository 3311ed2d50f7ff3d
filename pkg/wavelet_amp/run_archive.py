# run_archive.py

import csv
import json
import os
from enum import Enum
from typing import Iterable

import numpy as np

from wavelet_amp.dictionary import Dictionary, tabulate_atoms
from wavelet_amp.matching_pursuit import MpResult
from wavelet_amp.simulation import TRACE_COLUMNS, RunResult, TraceRow
from wavelet_amp.utils.hash_comparator import HashComparator
from wavelet_amp.utils.logger import logger

log = logger(__name__)


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_trace_csv(trace: Iterable[TraceRow], path: str):
    """One row per step; floats in shortest round-trip form."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in trace:
            writer.writerow([_format(getattr(row, name)) for name in TRACE_COLUMNS])


def write_json(path: str, content: dict):
    with open(path, "w") as f:
        json.dump(content, f, indent=2, sort_keys=True)
        f.write("\n")


class ArtifactBuilder:
    """Writes a set of output files into a directory and reports their hash."""

    _hash: str = ""
    _location: str = ""

    def __init__(self, output_dir: str):
        self._output_dir = output_dir
        self.prepare()

    def hash(self) -> str:
        """Return the hash of the primary artifact."""
        return self._hash

    def location(self) -> str:
        """Return the path of the primary artifact."""
        return self._location

    def prepare(self):
        """Create the output directory if needed. Existing unrelated files are left alone."""
        try:
            os.makedirs(self._output_dir, exist_ok=True)
        except OSError as e:
            log.error(f"Error creating output directory {self._output_dir}: {e}")
            raise

    def path(self, file_name: str) -> str:
        return os.path.join(self._output_dir, file_name)


class RunArchive(ArtifactBuilder):
    """
    The artifacts of one closed-loop run: trace.csv, metrics.json, config.json
    (the resolved, re-runnable config) and run.json (metadata sidecar).
    """

    def __init__(self, output_dir: str, result: RunResult, resolved_config: dict):
        self._result = result
        self._resolved_config = resolved_config
        super().__init__(output_dir)
        self.build()

    def build(self):
        log.info(f"writing run artifacts: {self._output_dir}")
        self._location = self.path("trace.csv")
        try:
            write_trace_csv(self._result.trace, self._location)
            hash_comparator = HashComparator()
            self._hash = hash_comparator.hash_file(self._location)

            write_json(self.path("metrics.json"), self._result.metrics.as_dict())
            write_json(self.path("config.json"), self._resolved_config)
            write_json(
                self.path("run.json"),
                {
                    "config": self._resolved_config,
                    "reference_coefficients": self._result.reference_coefficients,
                    "dictionary": self._result.dictionary.summary(),
                    "identifier": self._result.identifier.snapshot(),
                    "steps": len(self._result.trace),
                    "trace_sha256": self._hash,
                },
            )
        except OSError as e:
            log.error(f"Error writing run artifacts to {self._output_dir}: {e}")
            raise
        log.info(f"trace written: {self._location} sha256={self._hash}")


class AtomArchive(ArtifactBuilder):
    """Tabulated atoms over one period: atoms.csv with columns x, atom_0, ..."""

    def __init__(self, output_dir: str, dictionary: Dictionary, step: float = 0.01):
        self._dictionary = dictionary
        self._step = step
        super().__init__(output_dir)
        self.build()

    def build(self):
        self.grid, self.values = tabulate_atoms(self._dictionary, self._step)
        self._location = self.path("atoms.csv")
        with open(self._location, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["x"] + [f"atom_{i}" for i in range(self._dictionary.n)])
            for x, row in zip(self.grid, self.values):
                writer.writerow([repr(float(x))] + [repr(float(v)) for v in row])
        self._hash = HashComparator().hash_file(self._location)
        log.info(f"atoms written: {self._location} ({self._dictionary.n} atoms, {self.grid.size} points)")


class DecomposeArchive(ArtifactBuilder):
    """Matching pursuit output: picks.csv and residual.csv."""

    def __init__(self, output_dir: str, result: MpResult):
        self._result = result
        super().__init__(output_dir)
        self.build()

    def build(self):
        self._location = self.path("picks.csv")
        with open(self._location, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["iteration", "index", "coefficient", "residual_norm"])
            for iteration, ((index, coefficient), norm) in enumerate(
                zip(self._result.picks, self._result.residual_norms)
            ):
                writer.writerow([iteration, index, repr(coefficient), repr(norm)])
        write_signal_csv(self.path("residual.csv"), self._result.residual)
        self._hash = HashComparator().hash_file(self._location)


def read_signal_csv(path: str) -> np.ndarray:
    """Read a one-column CSV signal; a non-numeric first row is taken as a header."""
    values = []
    with open(path, "r", newline="") as f:
        for i, record in enumerate(csv.reader(f)):
            if not record or not record[0].strip():
                continue
            try:
                values.append(float(record[0]))
            except ValueError:
                if i == 0:
                    continue
                raise ValueError(f"{path}: row {i + 1} is not a number: {record[0]!r}") from None
    return np.array(values)


def write_signal_csv(path: str, values):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["value"])
        for value in values:
            writer.writerow([repr(float(value))])


class GoldenStatus(str, Enum):
    RECORDED = "recorded"
    MATCH = "match"
    MISMATCH = "mismatch"


def verify_golden(trace_path: str, golden_dir: str, record: bool = False) -> GoldenStatus:
    """
    Compare a trace file against the hash recorded in golden_dir.

    With no record yet (or record=True) the current hash is stored; afterwards
    the trace must match bit-exactly.
    """
    hash_comparator = HashComparator()
    if record or hash_comparator.read(golden_dir) is None:
        hash_comparator.write(hash_comparator.hash_file(trace_path), golden_dir)
        log.info(f"golden hash recorded in {golden_dir}")
        return GoldenStatus.RECORDED
    if hash_comparator.check_file(golden_dir, trace_path):
        return GoldenStatus.MATCH
    log.warning(f"{trace_path} does not match the golden hash in {golden_dir}")
    return GoldenStatus.MISMATCH
