import json

import numpy as np
import pytest

from ellrc.cli import main
from ellrc.lrc import read_code

CURVE49 = ["--p", "7", "--ext", "2", "--family", "j0"]
CURVE64 = ["--char2", "--ext2q", "64"]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_primes_table(capsys):
    code, out, _ = run(capsys, ["primes", "--family", "eisenstein", "--limit", "50"])
    assert code == 0
    rows = [line.split("\t") for line in out.strip().splitlines()[1:]]
    assert [r[0] for r in rows] == ["7", "19", "37"]
    code, out, _ = run(capsys, ["primes", "--family", "gaussian", "--limit", "1"])
    assert code == 0 and len(out.strip().splitlines()) == 1  # header only


def test_curve_json(capsys):
    code, out, _ = run(capsys, ["curve"] + CURVE49)
    assert code == 0
    doc = json.loads(out)
    assert doc["q"] == 49 and doc["N"] == 63 and doc["maximal"] is False
    code, out, _ = run(capsys, ["curve"] + CURVE64)
    doc = json.loads(out)
    assert code == 0 and doc["N"] == 81 and doc["maximal"] is True
    assert doc["hasse_weil_defect"] == 0


def test_fixed_field_output(capsys):
    code, out, _ = run(
        capsys, ["fixed-field"] + CURVE49 + ["--h", "7", "--A", "neg"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["groupOrder"] == 14 and doc["fiberSize"] == 14
    assert doc["splitFibers"] >= 4 and doc["z"]


def test_build_single_summary(tmp_path, capsys):
    out_file = str(tmp_path / "single.ellrc")
    code, out, _ = run(
        capsys,
        ["build", "--single"]
        + CURVE49
        + ["--h", "7", "--A", "neg", "--m", "4", "--t", "2", "--out", out_file],
    )
    assert code == 0
    doc = json.loads(out)
    assert (doc["n"], doc["k"], doc["dExact"]) == (56, 27, 28)
    assert doc["optimal"] is True and doc["localities"] == [13]


def test_build_hypothesis_errors(capsys):
    code, _, err = run(
        capsys,
        ["build", "--single"]
        + CURVE49
        + ["--h", "4", "--A", "neg", "--m", "2", "--t", "1"],
    )
    assert code == 1
    assert "h must divide N" in err
    code, _, err = run(
        capsys,
        ["build", "--two"]
        + CURVE64
        + ["--h", "3", "--A1", "zeta3", "--A2", "zeta3", "--m", "2", "--d0", "24"],
    )
    assert code == 1 and "hypothesis violation" in err


def test_internal_error_exit_code(capsys):
    code, _, err = run(
        capsys, ["bounds", "--n", "10", "--k", "4", "--d", "5", "--localities", ""]
    )
    assert code == 2 and "internal invariant failure" in err


def test_bounds_defect(capsys):
    code, out, _ = run(
        capsys,
        ["bounds", "--n", "15864", "--k", "1006", "--d", "14004", "--localities", "7,8"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["defectDecimal"] == "0.044945"
    assert doc["floorBound"] == 14717


@pytest.fixture(scope="module")
def two_mode_file(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("cli") / "two.ellrc")
    rc = main(
        ["build", "--two"]
        + CURVE64
        + ["--h", "3", "--A1", "y+1", "--A2", "zeta3", "--m", "3", "--d0", "36",
           "--out", path]
    )
    assert rc == 0
    return path


def test_build_two_then_verify(two_mode_file, capsys):
    capsys.readouterr()
    code, out, _ = run(capsys, ["verify", two_mode_file, "--repair-trials", "3"])
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    names = [c["name"] for c in doc["checks"]]
    assert "repair round-trip" in names


def test_export_and_import_round_trip(two_mode_file, tmp_path, capsys):
    capsys.readouterr()
    code, out, _ = run(capsys, ["export", two_mode_file])
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 54 and doc["mode"] == "two" and doc["localities"] == [5, 6]
    assert len(doc["matrix"]) == doc["k"] and len(doc["points"]) == 54

    code, out, _ = run(capsys, ["import", two_mode_file])
    assert code == 0

    # stored bytes decode to the same matrix after a save/load cycle
    stored = read_code(two_mode_file)
    copy_path = str(tmp_path / "copy.ellrc")
    from ellrc.lrc import write_code

    write_code(stored, copy_path)
    again = read_code(copy_path)
    assert np.array_equal(stored.matrix, again.matrix)
    assert stored.places == again.places


def test_verify_missing_file(capsys):
    code, _, err = run(capsys, ["verify", "/nonexistent/nothing.ellrc"])
    assert code == 1 and "error:" in err


def test_table_single_rows(capsys):
    code, out, _ = run(
        capsys,
        ["table"] + CURVE49 + ["--h", "7", "--A", "neg", "--m-max", "3"],
    )
    assert code == 0
    rows = [json.loads(line) for line in out.strip().splitlines()]
    assert [(r["m"], r["t"]) for r in rows] == [(2, 1), (3, 1), (3, 2)]
    assert all(r["built"] and r["optimal"] for r in rows)
    assert rows[0]["k"] == 14 and rows[0]["d"] == 14
