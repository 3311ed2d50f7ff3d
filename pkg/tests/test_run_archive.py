# test_run_archive.py

import json
import os

import numpy as np
import pytest

from wavelet_amp.config import example_config
from wavelet_amp.matching_pursuit import SampledDictionary, decompose
from wavelet_amp.run_archive import (
    AtomArchive,
    DecomposeArchive,
    GoldenStatus,
    RunArchive,
    read_signal_csv,
    verify_golden,
    write_signal_csv,
    write_trace_csv,
)
from wavelet_amp.simulation import simulate
from wavelet_amp.utils.hash_comparator import HashComparator

TRACE_HEADER = "k,t,r,ym,y,u,f_true,f_hat,eta,e,selected_index,a,applied"


@pytest.fixture(scope="module")
def short_run():
    config = example_config("example1", ["duration=2"])
    return config, simulate(config)


@pytest.mark.unit
def test_trace_csv_header_and_values(tmp_path, short_run):
    _, result = short_run
    path = tmp_path / "trace.csv"
    write_trace_csv(result.trace, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == TRACE_HEADER
    assert len(lines) == len(result.trace) + 1
    assert lines[1].endswith(",true") or lines[1].endswith(",false")
    first = dict(zip(TRACE_HEADER.split(","), lines[1].split(",")))
    assert float(first["y"]) == result.trace[0].y
    assert float(first["f_hat"]) == result.trace[0].f_hat
    assert int(first["selected_index"]) == result.trace[0].selected_index


@pytest.mark.unit
def test_run_archive_writes_all_artifacts(tmp_path, short_run):
    config, result = short_run
    (tmp_path / "notes.txt").write_text("keep me")
    archive = RunArchive(str(tmp_path), result, config.to_dict())

    assert archive.location() == str(tmp_path / "trace.csv")
    assert archive.hash() == HashComparator().hash_file(archive.location())
    assert (tmp_path / "notes.txt").read_text() == "keep me"

    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["tracking_rmse"] == result.metrics.tracking_rmse
    assert json.loads((tmp_path / "config.json").read_text()) == config.to_dict()

    sidecar = json.loads((tmp_path / "run.json").read_text())
    assert sidecar["trace_sha256"] == archive.hash()
    assert sidecar["steps"] == 40
    assert len(sidecar["dictionary"]) == 30
    assert sidecar["identifier"]["updates"] == 40
    assert sidecar["reference_coefficients"] == pytest.approx([1.3, -0.72, 0.16], abs=1e-12)


@pytest.mark.unit
def test_atom_archive(tmp_path, example1_dictionary):
    archive = AtomArchive(str(tmp_path), example1_dictionary)
    lines = (tmp_path / "atoms.csv").read_text().splitlines()
    assert lines[0].split(",") == ["x"] + [f"atom_{i}" for i in range(30)]
    assert len(lines) == 1001
    assert archive.values.shape == (1000, 30)


@pytest.mark.unit
def test_decompose_archive(tmp_path):
    dictionary = SampledDictionary(np.eye(2))
    DecomposeArchive(str(tmp_path), decompose([3.0, 4.0], dictionary, max_iters=5))
    picks = (tmp_path / "picks.csv").read_text().splitlines()
    assert picks == ["iteration,index,coefficient,residual_norm", "0,1,4.0,3.0", "1,0,3.0,0.0"]
    assert read_signal_csv(str(tmp_path / "residual.csv")).tolist() == [0.0, 0.0]


@pytest.mark.unit
def test_signal_csv(tmp_path):
    path = tmp_path / "signal.csv"
    write_signal_csv(str(path), [1.5, -2.0])
    assert read_signal_csv(str(path)).tolist() == [1.5, -2.0]
    path.write_text("0.5\nabc\n")
    with pytest.raises(ValueError, match="row 2"):
        read_signal_csv(str(path))


@pytest.mark.unit
def test_verify_golden(tmp_path, short_run):
    _, result = short_run
    trace_path = str(tmp_path / "trace.csv")
    golden_dir = str(tmp_path / "golden")
    write_trace_csv(result.trace, trace_path)

    assert verify_golden(trace_path, golden_dir) is GoldenStatus.RECORDED
    assert os.path.isfile(os.path.join(golden_dir, ".hash"))
    assert verify_golden(trace_path, golden_dir) is GoldenStatus.MATCH

    write_trace_csv(result.trace[:-1], trace_path)
    assert verify_golden(trace_path, golden_dir) is GoldenStatus.MISMATCH
    assert verify_golden(trace_path, golden_dir, record=True) is GoldenStatus.RECORDED
    assert verify_golden(trace_path, golden_dir) is GoldenStatus.MATCH
