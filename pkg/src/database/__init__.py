"""
Run ledger: SQLAlchemy models and session management.
"""
