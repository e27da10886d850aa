import os
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pytest

from main import main
from src.algebra.pairs import SoftPair, random_valid_pair
from src.database import db
from src.storage import formats


@pytest.fixture(scope="session")
def pair_corpus() -> List[SoftPair]:
    """Seeded valid pairs covering every (n, k) with n ≤ 6."""
    corpus = []
    seed = 0
    for n in range(1, 7):
        for k in range(n + 1):
            for _ in range(2):
                corpus.append(random_valid_pair(n, k, seed))
                seed += 1
    return corpus


@pytest.fixture
def diagonal_pair() -> SoftPair:
    """(diag(0.5, 1), diag(0.5, 0)): common part 0.5, class 1."""
    return SoftPair(np.diag([0.5, 1.0]), np.diag([0.5, 0.0]))


@pytest.fixture
def write_pair(tmp_path: Path):
    """Write a pair document into the test directory and return its path."""

    def _write(a, b, name: str = "pair.json") -> Path:
        path = tmp_path / name
        formats.write_document(path, formats.pair_to_doc(SoftPair(np.asarray(a), np.asarray(b))))
        return path

    return _write


@pytest.fixture
def cli(capsys, monkeypatch, tmp_path: Path):
    """
    Run the command-line entry point and capture (exit code, stdout, stderr).

    An empty configuration file isolates runs from any .env in the checkout.
    """
    for key in list(os.environ):
        if key.startswith("SOFTPAIRS_"):
            monkeypatch.delenv(key)
    config = tmp_path / "test.env"
    config.write_text("")

    def _run(*argv: str) -> Tuple[int, str, str]:
        code = main(list(argv) + ["--config", str(config)])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


@pytest.fixture
def ledger_url(tmp_path: Path):
    """SQLite ledger in the test directory; connections closed afterwards."""
    db.close_database()
    yield f"sqlite:///{tmp_path / 'ledger.db'}"
    db.close_database()
