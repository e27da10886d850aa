#!/usr/bin/env python3
"""
Print the most recent runs recorded in the ledger, newest first.
"""
import argparse
import sys
from pathlib import Path

# Add project root to path so we can import src
sys.path.append(str(Path(__file__).parent.parent))

from src.cli.config import Config
from src.database.db import close_database, init_database
from src.database.runs import latest_runs


def main() -> int:
    parser = argparse.ArgumentParser(description="Show recent softpairs runs")
    parser.add_argument("--url", help="database URL (default SOFTPAIRS_DATABASE_URL)")
    parser.add_argument("--limit", type=int, default=20)
    args = parser.parse_args()

    url = args.url or Config().DATABASE_URL
    if not url:
        print("No database URL: pass --url or set SOFTPAIRS_DATABASE_URL", file=sys.stderr)
        return 1
    init_database(url)
    try:
        runs = latest_runs(args.limit)
    finally:
        close_database()

    if not runs:
        print("No runs recorded.")
        return 0
    for run in runs:
        print(f"#{run.id}  {run.created_at:%Y-%m-%d %H:%M:%S}  exit {run.exit_code}  {run.command}  {run.summary}")
        for artifact in run.artifacts:
            print(f"    {artifact.kind:<10} {artifact.sha256[:12]}  {artifact.path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
