"""
Engine and session handling for the run ledger.
"""
import logging
from contextlib import contextmanager
from typing import Generator, Optional

from sqlalchemy import Engine, create_engine, text
from sqlalchemy.orm import Session, sessionmaker

logger = logging.getLogger(__name__)

engine: Optional[Engine] = None
SessionLocal: Optional[sessionmaker] = None


def init_database(url: str) -> None:
    """
    Initialize the database engine and session factory for ``url``.
    Calling it again with an engine already open is a no-op.
    """
    global engine, SessionLocal

    if engine is not None:
        return

    if url.startswith("postgres://"):
        url = url.replace("postgres://", "postgresql://", 1)
    safe_url = url.split("@")[-1] if "@" in url else url
    logger.info(f"Opening run ledger at {safe_url}")

    engine = create_engine(url, pool_pre_ping=True, echo=False)
    SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def create_tables() -> None:
    from .models import Base

    Base.metadata.create_all(bind=get_engine())


def close_database() -> None:
    global engine, SessionLocal
    if engine:
        engine.dispose()
        engine = None
        SessionLocal = None


@contextmanager
def get_db_session() -> Generator[Session, None, None]:
    """
    Ledger session; rolled back if the block raises.

        with get_db_session() as session:
            session.add(RunRecord(command="class", ...))
            session.commit()
    """
    if SessionLocal is None:
        raise RuntimeError("Database not initialized. Call init_database() first.")

    session = SessionLocal()
    try:
        yield session
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def get_engine() -> Engine:
    if engine is None:
        raise RuntimeError("Database not initialized. Call init_database() first.")
    return engine


def test_connection() -> bool:
    """True when the ledger answers a trivial query."""
    try:
        with get_db_session() as session:
            session.execute(text("SELECT 1"))
            return True
    except Exception as e:
        logger.error(f"Run ledger is unreachable: {e}")
        return False
