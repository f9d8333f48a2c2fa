"""End-to-end tests of the command-line interface via subprocesses."""

import json
import subprocess
import sys

import numpy as np
import pytest

from tmfield.binning import assign_states
from tmfield.dataio import read_matrix_csv, write_matrix_csv, write_series_csv
from tmfield.field import global_mtf, multi_resolution, pool
from tmfield.synth import GeneratorSpec, generate
from tmfield.transition import count_transitions, normalize

WORKED_SERIES = [12.0, 85.0, 45.0, 18.0, 78.0, 42.0, 15.0, 22.0, 55.0, 48.0, 82.0, 91.0]


def run_cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "tmfield", *map(str, argv)],
        capture_output=True,
        text=True,
    )


def error_line(proc):
    """The diagnostic line; warnings may precede it on stderr."""
    lines = [ln for ln in proc.stderr.splitlines() if ln.startswith("error[")]
    assert len(lines) == 1, proc.stderr
    return lines[0]


@pytest.fixture
def worked_csv(tmp_path):
    path = tmp_path / "series.csv"
    write_series_csv(WORKED_SERIES, path)
    return path


def test_encode_writes_expected_field(worked_csv, tmp_path):
    out = tmp_path / "field.npy"
    proc = run_cli(
        "encode", "--input", worked_csv, "--bins", 3, "--chunks", 2,
        "--fallback", "error", "--output", out,
    )
    assert proc.returncode == 0, proc.stderr
    stack = multi_resolution(WORKED_SERIES, [3], 2, fallback="error")
    assert np.array_equal(np.load(out), stack.channels[0].entries)
    record = json.loads(proc.stdout)
    assert record["command"] == "encode"
    assert record["shape"] == [12, 12]
    assert record["params"]["mode"] == "temporal"
    assert record["params"]["format"] == "npy"
    assert record["params"]["bins"] == [3]


def test_encode_global_mode(worked_csv, tmp_path):
    out = tmp_path / "global.npy"
    proc = run_cli(
        "encode", "--input", worked_csv, "--bins", 3, "--mode", "global",
        "--output", out,
    )
    assert proc.returncode == 0, proc.stderr
    seq = assign_states(WORKED_SERIES, 3)
    img = global_mtf(seq, normalize(count_transitions(seq), fallback="uniform"))
    assert np.array_equal(np.load(out), img.entries)


def test_encode_multi_channel_stack(worked_csv, tmp_path):
    out = tmp_path / "stack.npy"
    proc = run_cli(
        "encode", "--input", worked_csv, "--bins", 3, "--bins", 4,
        "--chunks", 2, "--output", out,
    )
    assert proc.returncode == 0, proc.stderr
    payload = np.load(out)
    assert payload.shape == (2, 12, 12)
    stack = multi_resolution(WORKED_SERIES, [3, 4], 2)
    assert np.array_equal(payload, stack.as_array())


def test_encode_pooled_output(worked_csv, tmp_path):
    out = tmp_path / "small.npy"
    proc = run_cli(
        "encode", "--input", worked_csv, "--bins", 3, "--chunks", 2,
        "--pool", 4, "--output", out,
    )
    assert proc.returncode == 0, proc.stderr
    stack = multi_resolution(WORKED_SERIES, [3], 2)
    assert np.array_equal(np.load(out), pool(stack.channels[0], 4))
    assert json.loads(proc.stdout)["shape"] == [4, 4]


def test_encode_from_generator_spec(tmp_path):
    spec_path = tmp_path / "gen.json"
    spec_path.write_text(json.dumps({"kind": "ar1", "length": 40, "seed": 6,
                                     "params": {"phi": 0.5}}))
    out = tmp_path / "gen.npy"
    proc = run_cli("encode", "--input", spec_path, "--bins", 4, "--chunks", 2,
                   "--output", out)
    assert proc.returncode == 0, proc.stderr
    series = generate(GeneratorSpec("ar1", 40, 6, {"phi": 0.5}))
    expected = multi_resolution(series, [4], 2)
    assert np.array_equal(np.load(out), expected.channels[0].entries)
    assert json.loads(proc.stdout)["source"] == {"generator": "ar1", "seed": 6,
                                                 "length": 40}


def test_encode_seed_override_applies_to_spec_input(tmp_path):
    spec_path = tmp_path / "gen.json"
    spec_path.write_text(json.dumps({"kind": "white_noise", "length": 30, "seed": 1}))
    out = tmp_path / "gen.npy"
    proc = run_cli("encode", "--input", spec_path, "--bins", 3, "--chunks", 2,
                   "--seed", 9, "--output", out)
    assert proc.returncode == 0, proc.stderr
    series = generate(GeneratorSpec("white_noise", 30, 9))
    expected = multi_resolution(series, [3], 2)
    assert np.array_equal(np.load(out), expected.channels[0].entries)


def test_encode_divisibility_violation_is_usage_error(worked_csv, tmp_path):
    proc = run_cli("encode", "--input", worked_csv, "--bins", 3, "--chunks", 5,
                   "--output", tmp_path / "x.npy")
    assert proc.returncode == 1
    assert error_line(proc).startswith("error[divisibility]:")
    assert proc.stdout == ""


def test_unknown_flag_is_usage_error(worked_csv, tmp_path):
    proc = run_cli("encode", "--input", worked_csv, "--sharpen", "--output",
                   tmp_path / "x.npy")
    assert proc.returncode == 1
    assert error_line(proc).startswith("error[usage]:")


def test_missing_input_file_is_data_error(tmp_path):
    proc = run_cli("encode", "--input", tmp_path / "absent.csv", "--output",
                   tmp_path / "x.npy")
    assert proc.returncode == 2
    assert error_line(proc).startswith("error[missing-file]:")


def test_non_finite_input_is_data_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1\nnan\n3\n4\n5\n6\n7\n8\n")
    proc = run_cli("encode", "--input", path, "--bins", 2, "--chunks", 2,
                   "--output", tmp_path / "x.npy")
    assert proc.returncode == 2
    assert error_line(proc).startswith("error[invalid-input]:")
    assert "row 2" in proc.stderr


def test_chunk_guideline_warning_goes_to_stderr(worked_csv, tmp_path):
    proc = run_cli("encode", "--input", worked_csv, "--bins", 3, "--chunks", 2,
                   "--output", tmp_path / "x.npy")
    assert proc.returncode == 0
    assert proc.stderr.startswith("warning[chunk-guideline]:")
    record = json.loads(proc.stdout)
    assert record["check_plan"][0]["status"] == "warn"


def test_pgm_export_and_determinism(worked_csv, tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    for out in (a, b):
        proc = run_cli("encode", "--input", worked_csv, "--bins", 3,
                       "--chunks", 2, "--format", "pgm", "--output", out)
        assert proc.returncode == 0, proc.stderr
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(b"P5\n12 12\n255\n")


def test_pgm_with_multiple_channels_is_usage_error(worked_csv, tmp_path):
    proc = run_cli("encode", "--input", worked_csv, "--bins", 3, "--bins", 4,
                   "--chunks", 2, "--format", "pgm", "--output", tmp_path / "x.pgm")
    assert proc.returncode == 1
    assert error_line(proc).startswith("error[format-channels]:")


def test_csv_export_round_trips(worked_csv, tmp_path):
    out = tmp_path / "field.csv"
    proc = run_cli("encode", "--input", worked_csv, "--bins", 3, "--chunks", 2,
                   "--format", "csv", "--output", out)
    assert proc.returncode == 0, proc.stderr
    stack = multi_resolution(WORKED_SERIES, [3], 2)
    assert np.array_equal(read_matrix_csv(out), stack.channels[0].entries)


def test_diagnose_reports_states_and_labels(worked_csv):
    proc = run_cli("diagnose", "--input", worked_csv, "--bins", 3, "--chunks", 2,
                   "--fallback", "error")
    assert proc.returncode == 0, proc.stderr
    record = json.loads(proc.stdout)
    assert record["states"] == [1, 3, 2, 1, 3, 2, 1, 1, 2, 2, 3, 3]
    assert record["bin_boundaries"] == [12.0, 22.0, 55.0, 91.0]
    assert record["global"]["row_provenance"] == ["sampled"] * 3
    assert record["global"]["summary"]["label"] in (
        "persistent", "mean_reverting", "trending_up", "trending_down",
        "uniform_like", "mixed",
    )
    assert len(record["chunks"]) == 2
    assert record["chunks"][0]["summary"]["label"] == "mean_reverting"
    assert record["chunks"][1]["summary"]["label"] == "trending_up"
    assert record["check_plan"]["status"] == "warn"
    assert record["label_thresholds"]["uniform_max_dev"] == 0.5


def test_diagnose_rejects_multiple_bin_values(worked_csv):
    proc = run_cli("diagnose", "--input", worked_csv, "--bins", 3, "--bins", 4,
                   "--chunks", 2)
    assert proc.returncode == 1
    assert error_line(proc).startswith("error[invalid-bin-count]:")


def test_diagnose_marks_fallback_rows(tmp_path):
    path = tmp_path / "monotone.csv"
    write_series_csv([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0], path)
    proc = run_cli("diagnose", "--input", path, "--bins", 4, "--chunks", 2)
    assert proc.returncode == 0, proc.stderr
    record = json.loads(proc.stdout)
    chunk = record["chunks"][0]
    # The first chunk only visits the lower states, so the upper rows of its
    # matrix are substituted from the whole-series estimate.
    assert "fallback_global" in chunk["row_provenance"]
    assert chunk["summary"]["fallback_rows"] != []


def test_synth_round_trips_through_csv(tmp_path):
    out = tmp_path / "series.csv"
    proc = run_cli("synth", "--kind", "ar1", "--length", 50, "--seed", 7,
                   "--phi", 0.8, "--output", out)
    assert proc.returncode == 0, proc.stderr
    expected = generate(GeneratorSpec("ar1", 50, 7, {"phi": 0.8}))
    loaded = np.loadtxt(out)
    assert np.array_equal(loaded, expected.values)
    record = json.loads(proc.stdout)
    assert record["params"]["kind"] == "ar1"
    assert record["params"]["seed"] == 7
    assert record["params"]["params"] == {"phi": 0.8}


def test_synth_from_spec_file_with_seed_override(tmp_path):
    spec_path = tmp_path / "walk.json"
    spec_path.write_text(json.dumps({"kind": "random_walk", "length": 20, "seed": 3}))
    out = tmp_path / "walk.csv"
    proc = run_cli("synth", "--spec", spec_path, "--seed", 0, "--output", out)
    assert proc.returncode == 0, proc.stderr
    expected = generate(GeneratorSpec("random_walk", 20, 0))
    assert np.array_equal(np.loadtxt(out), expected.values)


def test_synth_rejects_conflicting_sources(tmp_path):
    proc = run_cli("synth", "--kind", "ar1", "--spec", "x.json", "--output",
                   tmp_path / "x.csv")
    assert proc.returncode == 1
    proc = run_cli("synth", "--kind", "ar1", "--output", tmp_path / "x.csv")
    assert proc.returncode == 1  # missing --length
    proc = run_cli("synth", "--kind", "ar1", "--length", 10, "--output",
                   tmp_path / "x.csv")
    assert proc.returncode == 1  # ar1 requires --phi
    assert error_line(proc).startswith("error[invalid-params]:")


def test_pool_subcommand_matches_library(tmp_path):
    rng = np.random.default_rng(12)
    entries = rng.random((8, 8))
    src = tmp_path / "img.csv"
    write_matrix_csv(entries, src)
    out = tmp_path / "small.npy"
    proc = run_cli("pool", "--input", src, "--size", 3, "--output", out)
    assert proc.returncode == 0, proc.stderr
    assert np.array_equal(np.load(out), pool(entries, 3))
    record = json.loads(proc.stdout)
    assert record["input_shape"] == [8, 8]
    assert record["shape"] == [3, 3]


def test_pool_subcommand_rejects_non_square(tmp_path):
    src = tmp_path / "rect.csv"
    src.write_text("0.1,0.2,0.3\n0.4,0.5,0.6\n")
    proc = run_cli("pool", "--input", src, "--size", 1, "--output",
                   tmp_path / "x.npy")
    assert proc.returncode == 1
    assert error_line(proc).startswith("error[dimension-mismatch]:")


def test_missing_subcommand_is_usage_error():
    proc = run_cli()
    assert proc.returncode == 1
    assert error_line(proc).startswith("error[usage]:")


def test_run_record_includes_defaults(worked_csv, tmp_path):
    proc = run_cli("encode", "--input", worked_csv, "--bins", 3, "--chunks", 2,
                   "--output", tmp_path / "x.npy")
    record = json.loads(proc.stdout)
    params = record["params"]
    assert params["chunk_policy"] == "strict"
    assert params["fallback"] == "global"
    assert params["mode"] == "temporal"
    assert params["pool"] is None
    assert params["column"] is None
