"""
Tests for the run ledger.
"""
import numpy as np

from main import main
from src.database import db
from src.database.runs import latest_runs, record_run


def test_record_and_list_runs(ledger_url):
    first = record_run(ledger_url, "gen", ["gen", "3", "1"], 0, "generated",
                       [("pair.json", "pair", "ab" * 32)])
    second = record_run(ledger_url, "class", ["class", "pair.json"], 2, "RelationViolation")

    runs = latest_runs()

    assert first is not None and second == first + 1
    assert [run.command for run in runs] == ["class", "gen"]
    assert runs[0].exit_code == 2
    assert runs[1].artifacts[0].sha256 == "ab" * 32
    assert runs[1].arguments == '["gen", "3", "1"]'


def test_ledger_failure_is_swallowed():
    db.close_database()
    try:
        assert record_run("notadialect://nowhere", "gen", [], 0, "") is None
    finally:
        db.close_database()


def test_connection_check(ledger_url):
    db.init_database(ledger_url)
    assert db.test_connection()


def test_cli_records_runs(cli, write_pair, ledger_url, monkeypatch, tmp_path):
    monkeypatch.setenv("SOFTPAIRS_DATABASE_URL", ledger_url)
    pair = str(write_pair(np.eye(2), np.zeros((2, 2))))

    code, out, _ = cli("class", pair)
    assert code == 0 and out == "2\n"
    code, _, _ = cli("demo", "bott", "--grid", "4", "--out", str(tmp_path / "demo"))
    assert code == 0

    db.init_database(ledger_url)
    runs = latest_runs()
    assert [run.command for run in runs] == ["demo", "class"]
    assert runs[0].artifacts[0].kind == "field"
    assert runs[1].summary == "class 2"


def test_ledger_is_optional():
    """Without a database URL nothing is recorded and main still succeeds."""
    db.close_database()
    assert main(["gen", "2", "1", "--config", "/nonexistent/none.env"]) == 0
    assert db.engine is None
