"""
SQLAlchemy models for the run ledger.
"""
from datetime import datetime

from sqlalchemy import Column, DateTime, ForeignKey, Integer, String, Text, text
from sqlalchemy.orm import declarative_base, relationship

# Create the base class for all models
Base = declarative_base()


class RunRecord(Base):
    __tablename__ = 'runs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String(50), nullable=False)
    arguments = Column(Text, nullable=False)
    exit_code = Column(Integer, nullable=False)
    summary = Column(Text, nullable=False, default="")
    created_at = Column(DateTime, default=datetime.utcnow, server_default=text('CURRENT_TIMESTAMP'))

    artifacts = relationship("RunArtifact", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<RunRecord(command='{self.command}', exit={self.exit_code})>"


class RunArtifact(Base):
    __tablename__ = 'run_artifacts'

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey('runs.id'), nullable=False)
    path = Column(Text, nullable=False)
    kind = Column(String(50), nullable=False)
    sha256 = Column(String(64), nullable=False)

    run = relationship("RunRecord", back_populates="artifacts")

    def __repr__(self):
        return f"<RunArtifact(kind='{self.kind}', path='{self.path}')>"
