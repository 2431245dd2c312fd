import logging
from typing import Any

from pydantic import ConfigDict, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    EPSILON: float = 1e-10
    GUMBEL_TAU_THRESHOLD: float = 1e-3
    MAX_ITER: int = 200
    MAX_HALVINGS: int = 30
    DEVIANCE_TOL: float = 1e-8
    SCORE_TOL: float = 1e-7
    DEFAULT_K: int = 10
    LAMBDA_GRID: list[float] = [-3, -2, -1, 0, 1, 2, 3, 4, 5, 6]
    LAMBDA_SWEEPS: int = 2
    LAMBDA_PARSIMONY: float = 1.0
    TAU_GRID_START: float = -1.0
    TAU_GRID_STOP: float = -0.05
    TAU_GRID_STEP: float = 0.05
    EDF_LINEAR_TOL: float = 0.05
    WOE_BINS: int = 10
    WOE_SMOOTHING: float = 0.5
    WOE_MIN_RATE_GAP: float = 0.01
    WOE_MIN_BIN_COUNT: int = 0
    IMPUTATION_M: int = 5
    IMPUTATION_ITERATIONS: int = 10
    N_JOBS: int = 1
    MODELS_DIR: str = "models"
    LOG_LEVEL: str = "INFO"

    @field_validator("EPSILON")
    @classmethod
    def validate_epsilon(cls, v: Any):
        if not 0 < v < 1e-4:
            raise ValueError("EPSILON must lie in (0, 1e-4)")
        return v

    @field_validator("DEFAULT_K")
    @classmethod
    def validate_basis_dimension(cls, v: Any):
        if v < 4:
            raise ValueError("DEFAULT_K must be at least 4")
        return v

    @field_validator("LAMBDA_GRID")
    @classmethod
    def validate_lambda_grid(cls, v: Any):
        if not v:
            raise ValueError("LAMBDA_GRID must not be empty")
        return sorted(v)

    @field_validator("TAU_GRID_STEP", "GUMBEL_TAU_THRESHOLD", "DEVIANCE_TOL", "SCORE_TOL")
    @classmethod
    def validate_positive(cls, v: Any):
        if v <= 0:
            raise ValueError("value must be positive")
        return v

    @field_validator("MAX_ITER", "LAMBDA_SWEEPS", "WOE_BINS", "IMPUTATION_M", "IMPUTATION_ITERATIONS")
    @classmethod
    def validate_count(cls, v: Any):
        if v < 1:
            raise ValueError("count must be at least 1")
        return v

    @field_validator("LAMBDA_PARSIMONY")
    @classmethod
    def validate_parsimony(cls, v: Any):
        if v < 0:
            raise ValueError("LAMBDA_PARSIMONY must not be negative")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: Any):
        v = str(v).upper()
        if v not in ["DEBUG", "INFO", "WARNING", "ERROR"]:
            raise ValueError("LOG_LEVEL must be DEBUG, INFO, WARNING or ERROR")
        return v

    @property
    def tau_grid(self) -> list[float]:
        """Default tail-parameter grid, ascending from TAU_GRID_START to TAU_GRID_STOP."""
        count = int(round((self.TAU_GRID_STOP - self.TAU_GRID_START) / self.TAU_GRID_STEP)) + 1
        return [round(self.TAU_GRID_START + i * self.TAU_GRID_STEP, 10) for i in range(count)]

    model_config = ConfigDict(
        extra="ignore", env_file=".env", env_file_encoding="utf-8"
    )


config = Settings()

VERSION = "0.1.0"

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(level: str | None = None):
    """Configure root logging once for the CLI and the scoring service.

    :param level: Log level name, defaults to ``config.LOG_LEVEL``.
    :type level: str, optional
    """
    logging.basicConfig(level=level or config.LOG_LEVEL, format=LOG_FORMAT)
