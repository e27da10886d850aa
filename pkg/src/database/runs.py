"""
Recording command runs in the ledger.
"""
import json
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from sqlalchemy import desc
from sqlalchemy.orm import joinedload

from .db import create_tables, get_db_session, init_database
from .models import RunArtifact, RunRecord

logger = logging.getLogger(__name__)


def record_run(url: str, command: str, argv: Sequence[str], exit_code: int, summary: str,
               artifacts: Iterable[Tuple[str, str, str]] = ()) -> Optional[int]:
    """
    Store one run with its (path, kind, sha256) artifacts; returns the row id.

    Failures are logged and swallowed: the ledger never changes a command's
    outcome.
    """
    try:
        init_database(url)
        create_tables()
        with get_db_session() as session:
            run = RunRecord(
                command=command,
                arguments=json.dumps(list(argv)),
                exit_code=exit_code,
                summary=summary,
            )
            for path, kind, sha256 in artifacts:
                run.artifacts.append(RunArtifact(path=path, kind=kind, sha256=sha256))
            session.add(run)
            session.commit()
            session.refresh(run)
            return int(run.id)
    except Exception as e:
        logger.error(f"Failed to record run in the ledger: {e}")
        return None


def latest_runs(limit: int = 20) -> List[RunRecord]:
    """Newest runs first, artifacts loaded."""
    with get_db_session() as session:
        query = session.query(RunRecord).options(
            joinedload(RunRecord.artifacts)
        ).order_by(desc(RunRecord.id)).limit(limit)
        runs = query.all()
        session.expunge_all()
        return runs
