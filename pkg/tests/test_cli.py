import csv
import io
import json

import pytest

from randsys.cli import EX_DATAERR, EX_FAILED, EX_MISMATCH, EX_OK, EX_USAGE, main
from randsys.database import Database, SurfaceRecord


def _run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_genus(capsys, tmp_path):
    db = tmp_path / "db.json"
    code, out, _ = _run(capsys, "generate", "--genus", "2", "--seed", "1", "--db", str(db))
    assert code == EX_OK
    doc = json.loads(out)
    assert doc["saturated"] and doc["verified"]
    assert doc["genus"] == 2 and doc["cusps"] == 1
    assert len(doc["record"]["gluing"]) == 18
    assert 2 in Database.load(db).records


def test_generate_single_run(capsys):
    code, out, _ = _run(capsys, "generate", "--n", "5", "--tau0", "4", "--seed", "3")
    doc = json.loads(out)
    assert code == (EX_OK if doc["saturated"] and doc["verified"] else EX_FAILED)
    assert doc["n"] == 5 and doc["tau0"] == 4


def test_generate_seed_too_short(capsys):
    # the annulus core LRLR already has trace 7
    code, _, err = _run(capsys, "generate", "--n", "2", "--tau0", "8", "--seed", "0")
    assert code == EX_FAILED
    assert "trace 7 < 8" in err


@pytest.mark.parametrize("argv", [
    ["generate", "--genus", "2"],
    ["generate", "--seed", "1"],
    ["generate", "--genus", "2", "--n", "3", "--seed", "1"],
    ["generate", "--n", "3", "--seed", "1"],
    ["generate", "--n", "3", "--tau0", "2", "--seed", "1"],
    ["sweep", "--genus-range", "5:2", "--seed", "1", "--out", "x", "--db", "y"],
    ["covers", "--group", "sl2"],
    ["bogus"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == EX_USAGE
    assert "usage" in err


def test_malformed_db(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = _run(capsys, "verify", "--db", str(bad))
    assert code == EX_DATAERR
    code, _, _ = _run(capsys, "verify", "--db", str(tmp_path / "missing.json"))
    assert code == EX_DATAERR


def test_verify(capsys, tmp_path):
    db = tmp_path / "db.json"
    assert _run(capsys, "generate", "--genus", "3", "--seed", "2", "--db", str(db))[0] == EX_OK
    code, out, _ = _run(capsys, "verify", "--db", str(db))
    assert code == EX_OK
    assert json.loads(out)["passed"]


def test_verify_failure(capsys, tmp_path):
    db = tmp_path / "db.json"
    Database([SurfaceRecord(1, 3, (3, 5, 4, 0, 2, 1))]).save(db)
    code, out, _ = _run(capsys, "verify", "--db", str(db))
    assert code == EX_MISMATCH
    assert not json.loads(out)["checks"]["one_cusp"]


def test_covers_sl2_matches_oracle(capsys):
    code, out, _ = _run(capsys, "covers", "--group", "sl2", "--p", "3", "--samples", "20",
                        "--seed", "5", "--oracle")
    assert code == EX_OK
    rows = [json.loads(x) for x in out.splitlines()]
    assert len(rows) == 20
    assert all(r["match"] for r in rows)
    assert all(r["systole"]["trace"] == r["oracle_trace"] for r in rows)


def test_covers_cap(capsys):
    code, out, _ = _run(capsys, "covers", "--group", "trivial", "--samples", "1", "--seed", "0",
                        "--cap", "0.5")
    assert code == EX_OK
    assert json.loads(out)["systole"] is None


def test_covers_sym_table(capsys, tmp_path):
    path = tmp_path / "fix.csv"
    code, _, _ = _run(capsys, "covers", "--group", "sym", "--n", "100", "--samples", "200",
                      "--seed", "1", "--out", str(path))
    assert code == EX_OK
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert [r["word"] for r in rows] == ["a", "ab", "aaB"]
    assert all(r["parameter"] == "100" for r in rows)


def test_covers_needs_db_for_other_bases(capsys):
    code, _, _ = _run(capsys, "covers", "--group", "sl2", "--base-db-genus", "2", "--seed", "0")
    assert code == EX_USAGE


def test_covers_base_from_db(capsys, tmp_path):
    db = tmp_path / "db.json"
    assert _run(capsys, "generate", "--genus", "2", "--seed", "1", "--db", str(db))[0] == EX_OK
    code, out, _ = _run(capsys, "covers", "--group", "sl2", "--p", "3", "--samples", "2",
                        "--base-db-genus", "2", "--db", str(db), "--seed", "0", "--oracle")
    assert code == EX_OK
    assert all(json.loads(x)["match"] for x in out.splitlines())
    code, _, _ = _run(capsys, "covers", "--group", "sl2", "--base-db-genus", "7",
                      "--db", str(db), "--seed", "0")
    assert code == EX_DATAERR


def test_sweep_deterministic(capsys, tmp_path):
    blobs = []
    for name in ("a", "b"):
        db, out = tmp_path / f"{name}.json", tmp_path / f"{name}.csv"
        code, _, _ = _run(capsys, "sweep", "--genus-range", "2:4", "--seed", "7",
                          "--out", str(out), "--db", str(db))
        assert code == EX_OK
        blobs.append((db.read_bytes(), out.read_bytes()))
    assert blobs[0] == blobs[1]
    rows = list(csv.DictReader(io.StringIO(blobs[0][1].decode())))
    assert [int(r["genus"]) for r in rows] == [2, 3, 4]
    assert all(float(r["systole"]) <= float(r["upper_bound"]) for r in rows)
