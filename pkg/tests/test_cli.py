"""
End-to-end tests for the softpairs command line: exit codes, outputs and files.
"""
import json

import numpy as np
import pytest

from src.cli import commands
from src.cli.commands import build_parser, suggest
from src.cli.config import ConfigError
from src.storage import formats

I2 = np.eye(2)
Z2 = np.zeros((2, 2))


def test_verify_valid_pair(cli, write_pair):
    code, out, err = cli("verify", str(write_pair(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))))

    assert code == 0
    assert out == ""
    assert "Relations (pass)" in err
    assert "error:" not in err


def test_verify_failing_pair(cli, write_pair):
    code, out, err = cli("verify", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0]))))

    assert code == 2
    assert "0.025" in err
    assert "error: relations fail" in err


def test_verify_tabular_output(cli, write_pair):
    code, out, _ = cli("verify", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0]))),
                       "--format", "tabular")
    values = dict(line.split("\t") for line in out.splitlines())

    assert code == 2
    assert float(values["r1"]) == pytest.approx(0.025, abs=1e-12)
    assert values["passed"] == "false"


def test_verify_derived(cli, write_pair):
    code, _, err = cli("verify", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.5, 0.0]))), "--derived")

    assert code == 0
    assert "derived.passed" in err
    assert "spectra.interior" in err


@pytest.mark.parametrize("content", ["{", '{"a": {"n": 2, "entries": []}, "b": {"n": 2, "entries": []}}'])
def test_verify_malformed_file(cli, tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    code, _, err = cli("verify", str(path))

    assert code == 1
    assert "FileFormatError" in err


def test_verify_missing_file(cli, tmp_path):
    code, _, _ = cli("verify", str(tmp_path / "absent.json"))
    assert code == 1


def test_verify_non_hermitian(cli, write_pair):
    code, _, err = cli("verify", str(write_pair(np.array([[0.0, 1.0], [0.0, 0.0]]), Z2)))
    assert code == 1
    assert "NotHermitian" in err


def test_class_prints_integer(cli, write_pair):
    code, out, _ = cli("class", str(write_pair(I2, Z2)))
    assert code == 0
    assert out == "2\n"

    code, out, _ = cli("class", str(write_pair(np.diag([0.3, 0.7]), np.diag([0.3, 0.7]))))
    assert out == "0\n"


def test_class_of_invalid_pair(cli, write_pair):
    code, out, _ = cli("class", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0]))))
    assert code == 2
    assert out == ""


def test_gen_is_deterministic(cli, tmp_path):
    first, second = tmp_path / "one.json", tmp_path / "two.json"
    assert cli("gen", "5", "2", "17", "--out", str(first))[0] == 0
    assert cli("gen", "5", "2", "17", "--out", str(second))[0] == 0

    assert first.read_bytes() == second.read_bytes()
    meta = json.loads(first.read_text())["meta"]
    code, out, _ = cli("class", str(first))
    assert code == 0
    assert int(out) == meta["rank_difference"]


def test_gen_to_stdout_uses_configured_seed(cli):
    code, out, _ = cli("gen", "3", "1", "--seed", "4")
    doc = json.loads(out)

    assert code == 0
    assert doc["meta"]["seed"] == 4
    assert doc["a"]["n"] == 3


def test_gen_rejects_bad_sizes(cli):
    assert cli("gen", "3", "4")[0] == 1


@pytest.mark.parametrize("argv", [
    ("gen", "3", "1", "--seed", "-5"),
    ("gen", "3", "1", "-5"),
])
def test_gen_rejects_negative_seeds(cli, argv):
    code, out, err = cli(*argv)

    assert code == 1
    assert out == ""
    assert "seed must be non-negative" in err


def test_reduce_writes_blocks(cli, tmp_path):
    pair_path = tmp_path / "pair.json"
    cli("gen", "4", "2", "3", "--out", str(pair_path))
    out_dir = tmp_path / "blocks"
    code, _, err = cli("reduce", str(pair_path), "--out", str(out_dir))

    assert code == 0
    assert "reassembly" in err
    pair = formats.read_pair(pair_path)
    c = formats.read_matrix(out_dir / "c.json")
    p = formats.read_matrix(out_dir / "p.json")
    q = formats.read_matrix(out_dir / "q.json")
    frame = formats.read_matrix(out_dir / "frame.json")
    a = frame @ np.block([[c, np.zeros((2, 2))], [np.zeros((2, 2)), p]]) @ frame.conj().T
    b = frame @ np.block([[c, np.zeros((2, 2))], [np.zeros((2, 2)), q]]) @ frame.conj().T
    assert np.allclose(a, pair.a, atol=1e-8)
    assert np.allclose(b, pair.b, atol=1e-8)


def test_reduce_notes_empty_part(cli, write_pair):
    code, _, err = cli("reduce", str(write_pair(np.diag([0.3, 0.7]), np.diag([0.3, 0.7]))))
    assert code == 0
    assert "projection part empty" in err


def test_homotopy_flip_trace_file(cli, write_pair, tmp_path):
    trace = tmp_path / "trace.tsv"
    code, out, err = cli("homotopy", "flip", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.5, 0.0]))),
                         "--steps", "11", "--out", str(trace))
    rows = formats.parse_trace_table(trace.read_text())

    assert code == 0
    assert out == ""
    assert len(rows) == 11
    assert {row[3] for row in rows} == {0}
    assert "certified" in err


def test_homotopy_trace_on_stdout(cli, write_pair):
    code, out, _ = cli("homotopy", "pq-scale", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.5, 0.0]))))
    rows = formats.parse_trace_table(out)

    assert code == 0
    assert len(rows) == 101
    assert {row[3] for row in rows} == {1}


@pytest.mark.parametrize("kind", ["scale", "reparam", "common"])
def test_homotopy_kinds(cli, write_pair, kind):
    code, _, _ = cli("homotopy", kind, str(write_pair(np.diag([0.5, 1.0]), np.diag([0.5, 0.0]))), "--steps", "21")
    assert code == 0


def test_homotopy_scale_needs_unit_spectrum(cli, write_pair):
    code, _, err = cli("homotopy", "scale", str(write_pair(np.diag([-0.5, 0.5]), np.diag([-0.5, 0.5]))))
    assert code == 1
    assert "InvalidInput" in err


def test_homotopy_of_invalid_pair(cli, write_pair):
    code, _, err = cli("homotopy", "flip", str(write_pair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0]))))
    assert code == 2
    assert "RelationViolation" in err


def test_homotopy_unknown_names(cli, write_pair):
    path = str(write_pair(I2, Z2))
    code, _, err = cli("homotopy", "flop", path)
    assert code == 1
    assert "did you mean 'flip'" in err

    code, _, err = cli("homotopy", "reparam", path, "--function", "cubed")
    assert code == 1
    assert "did you mean 'cube'" in err


@pytest.mark.parametrize("name, files", [
    ("universal", ["generator_a.json", "generator_b.json"]),
    ("bott", ["bott.json"]),
    ("clutch", ["clutch.json", "clutch.csv"]),
    ("cutoff", ["cutoff.json", "cutoff.csv"]),
])
def test_demos(cli, tmp_path, name, files):
    out_dir = tmp_path / "demo"
    code, _, err = cli("demo", name, "--grid", "8", "--out", str(out_dir))

    assert code == 0, err
    assert "verified" in err
    for file_name in files:
        assert (out_dir / file_name).is_file()


def test_bott_demo_tabular(cli, tmp_path):
    code, out, _ = cli("demo", "bott", "--grid", "8", "--out", str(tmp_path), "--format", "tabular")
    values = dict(line.split("\t") for line in out.splitlines())

    assert code == 0
    assert values["chern"] == "1"
    assert values["chern_complement"] == "-1"


@pytest.mark.parametrize("argv, points", [
    ((), 201),
    (("--grid", "8"), 17),
    (("--grid", "50"), 101),
])
def test_universal_demo_grid(cli, tmp_path, argv, points):
    code, out, _ = cli("demo", "universal", *argv, "--out", str(tmp_path), "--format", "tabular")
    values = dict(line.split("\t") for line in out.splitlines())
    doc = json.loads((tmp_path / "generator_a.json").read_text())

    assert code == 0
    assert values["grid_points"] == str(points)
    assert len(doc["grid"]) == points


def test_unknown_demo(cli, tmp_path):
    code, _, err = cli("demo", "bot", "--out", str(tmp_path))
    assert code == 1
    assert "did you mean 'bott'" in err


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["class"], ["gen", "x", "1"], ["gen", "2", "1", "--format", "xml"],
])
def test_usage_errors(cli, argv):
    code, _, err = cli(*argv)
    assert code == 1
    assert "UsageError" in err


def test_bad_flag_values(cli, write_pair):
    code, _, err = cli("verify", str(write_pair(I2, Z2)), "--tol", "-1")
    assert code == 1
    assert "ConfigError" in err


def test_suggest():
    assert "did you mean 'bott'" in suggest("bot", ["universal", "bott"])
    assert "did you mean" not in suggest("zzz", ["universal", "bott"])


def test_parser_suppresses_unset_flags():
    args = build_parser().parse_args(["class", "pair.json"])
    assert not hasattr(args, "tol")
    assert args.pair == "pair.json"
    assert issubclass(ConfigError, ValueError)


@pytest.mark.parametrize("error, code, message", [
    (ValueError("bad number"), 1, "invalid input: bad number"),
    (TypeError("not a matrix"), 1, "invalid input: not a matrix"),
    (np.linalg.LinAlgError("eigh did not converge"), 2, "LinAlgError"),
    (RuntimeError("broken invariant"), 2, "internal error: RuntimeError"),
])
def test_unexpected_exceptions_map_to_exit_codes(cli, write_pair, monkeypatch, error, code, message):
    def failing(args, run):
        raise error

    monkeypatch.setitem(commands.COMMANDS, "class", failing)
    result, _, err = cli("class", str(write_pair(I2, Z2)))

    assert result == code
    assert message in err
