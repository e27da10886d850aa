import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from src.algebra.errors import SoftPairError
from src.cli.commands import COMMANDS, CommandResult, build_parser
from src.cli.config import Config
from src.database.db import close_database
from src.database.runs import record_run

# Configure logging
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=logging.WARNING,
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

VERBOSITY = {1: logging.INFO, 2: logging.DEBUG}


def _set_log_level(config_level: str, verbose: int) -> None:
    level = logging.getLevelName(config_level)
    if verbose:
        level = min(level, VERBOSITY.get(verbose, logging.DEBUG))
    logging.getLogger().setLevel(level)


def run(argv: Optional[List[str]] = None) -> CommandResult:
    """Parse ``argv`` and execute one command; errors become a failed CommandResult."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
        config_path = getattr(args, "config", None)
        config = Config(Path(config_path) if config_path else None)
        config.validate()
        _set_log_level(config.LOG_LEVEL, getattr(args, "verbose", 0) or 0)
        run_config = config.to_run_config(args)
        logger.info(f"Running {args.command} with {run_config.to_dict()}")
        result = COMMANDS[args.command](args, run_config)
    except SoftPairError as e:
        logger.debug(f"{type(e).__name__}: {e}")
        return CommandResult(e.exit_code, f"{type(e).__name__}: {e}")
    except OSError as e:
        return CommandResult(1, f"I/O error: {e}")
    except np.linalg.LinAlgError as e:
        logger.debug(f"LinAlgError: {e}")
        return CommandResult(2, f"LinAlgError: {e}")
    except (ValueError, TypeError) as e:
        logger.debug(f"Rejected input: {e}")
        return CommandResult(1, f"invalid input: {e}")
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return CommandResult(2, f"internal error: {type(e).__name__}: {e}")

    if config.DATABASE_URL:
        artifacts = [(a.path, a.kind, a.sha256) for a in result.artifacts]
        record_run(config.DATABASE_URL, args.command, argv, result.exit_code, result.summary, artifacts)
        close_database()
    return result


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line entry point; returns the process exit code (0, 1 or 2)."""
    result = run(argv)
    if result.data:
        sys.stdout.write(result.data)
        sys.stdout.flush()
    if result.report:
        sys.stderr.write(result.report)
    if result.exit_code != 0:
        sys.stderr.write(f"error: {result.summary}\n")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
