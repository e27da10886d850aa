#!/usr/bin/env python3
"""
Database initialization script.
Creates the run ledger tables for softpairs.
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to Python path
root_path = Path(__file__).parent.parent
sys.path.insert(0, str(root_path))

from src.cli.config import Config
from src.database.db import close_database, create_tables, init_database, test_connection

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def main() -> int:
    parser = argparse.ArgumentParser(description="Create the softpairs run ledger tables")
    parser.add_argument("--url", help="database URL (default SOFTPAIRS_DATABASE_URL)")
    args = parser.parse_args()

    url = args.url or Config().DATABASE_URL
    if not url:
        logger.error("No database URL: pass --url or set SOFTPAIRS_DATABASE_URL")
        return 1
    try:
        init_database(url)
        create_tables()
        if not test_connection():
            return 1
        logger.info("Run ledger tables created successfully")
        return 0
    except Exception as e:
        logger.error(f"Error creating run ledger tables: {e}")
        return 1
    finally:
        close_database()


if __name__ == "__main__":
    sys.exit(main())
