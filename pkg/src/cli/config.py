"""
Configuration management for the command-line front end.
"""
import logging
import os
from argparse import Namespace
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Final, Mapping, Optional

from dotenv import dotenv_values

from src.algebra.errors import InvalidInput

logger = logging.getLogger(__name__)

PREFIX = "SOFTPAIRS_"
FORMATS = ("human", "tabular")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigError(InvalidInput):
    """A configuration value is missing, malformed or out of range."""


@dataclass(frozen=True)
class RunConfig:
    """Settings one command runs with, after flags have been applied."""

    tol: float
    atol: float
    rtol: float
    cluster_tol: float
    gluing_tol: float
    steps: int
    seed: int
    grid: int
    format: str
    out: Optional[Path] = None
    grid_given: bool = False

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["out"] = None if self.out is None else str(self.out)
        return data


class Config:
    """
    Layered settings: environment variables over the configuration file over
    built-in defaults. Command-line flags are applied by ``to_run_config``.
    """

    def __init__(self, env_file_path: Optional[Path] = None, environ: Optional[Mapping[str, str]] = None):
        if env_file_path is None:
            env_file_path = Path(__file__).parent.parent.parent / ".env"
        self.env_file_path = Path(env_file_path)
        file_values: Dict[str, Optional[str]] = {}
        if self.env_file_path.is_file():
            file_values = dotenv_values(self.env_file_path)
            logger.debug(f"Loaded configuration file {self.env_file_path}")
        self._sources = {k: v for k, v in file_values.items() if v is not None}
        self._sources.update(os.environ if environ is None else environ)

        self.TOL: Final = self._float("TOL", 1e-10)
        self.ATOL: Final = self._float("ATOL", 1e-10)
        self.RTOL: Final = self._float("RTOL", 1e-9)
        self.CLUSTER_TOL: Final = self._float("CLUSTER_TOL", 1e-6)
        self.GLUING_TOL: Final = self._float("GLUING_TOL", 1e-9)
        self.STEPS: Final = self._int("STEPS", 101)
        self.SEED: Final = self._int("SEED", 0)
        self.GRID: Final = self._int("GRID", 32)
        self.FORMAT: Final = self._get("FORMAT", "human")
        self.LOG_LEVEL: Final = self._get("LOG_LEVEL", "WARNING").upper()
        self.DATABASE_URL: Final = self._get("DATABASE_URL", "") or None

    def _get(self, key: str, default: str) -> str:
        return str(self._sources.get(PREFIX + key, default)).strip()

    def _float(self, key: str, default: float) -> float:
        raw = self._get(key, repr(default))
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{PREFIX}{key} must be a number, got {raw!r}")

    def _int(self, key: str, default: int) -> int:
        raw = self._get(key, str(default))
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{PREFIX}{key} must be an integer, got {raw!r}")

    def validate(self) -> None:
        """Raise ConfigError on out-of-range values."""
        _check_run_values(self.TOL, self.ATOL, self.RTOL, self.CLUSTER_TOL, self.GLUING_TOL,
                          self.STEPS, self.GRID, self.FORMAT, self.SEED)
        if self.LOG_LEVEL not in LOG_LEVELS:
            raise ConfigError(f"{PREFIX}LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")

    def to_run_config(self, args: Namespace) -> RunConfig:
        """Merge parsed flags over the layered settings."""

        def pick(name: str, fallback: Any) -> Any:
            value = getattr(args, name, None)
            return fallback if value is None else value

        out = pick("out", None)
        run = RunConfig(
            tol=float(pick("tol", self.TOL)),
            atol=self.ATOL,
            rtol=self.RTOL,
            cluster_tol=float(pick("cluster_tol", self.CLUSTER_TOL)),
            gluing_tol=self.GLUING_TOL,
            steps=int(pick("steps", self.STEPS)),
            seed=int(pick("seed", self.SEED)),
            grid=int(pick("grid", self.GRID)),
            format=str(pick("format", self.FORMAT)),
            out=None if out is None else Path(out),
            grid_given=getattr(args, "grid", None) is not None or PREFIX + "GRID" in self._sources,
        )
        _check_run_values(run.tol, run.atol, run.rtol, run.cluster_tol, run.gluing_tol,
                          run.steps, run.grid, run.format, run.seed)
        return run


def _check_run_values(tol: float, atol: float, rtol: float, cluster_tol: float, gluing_tol: float,
                      steps: int, grid: int, fmt: str, seed: int = 0) -> None:
    for name, value in (("tol", tol), ("atol", atol), ("rtol", rtol),
                        ("cluster-tol", cluster_tol), ("gluing-tol", gluing_tol)):
        if not value > 0.0:
            raise ConfigError(f"{name} must be positive, got {value}")
    if steps < 2:
        raise ConfigError(f"steps must be at least 2, got {steps}")
    if grid < 3:
        raise ConfigError(f"grid resolution must be at least 3, got {grid}")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {', '.join(FORMATS)}, got {fmt!r}")
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
