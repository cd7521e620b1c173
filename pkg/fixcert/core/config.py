"""
Core Configuration Module for FixCert

Technical Explanation:
- Uses Pydantic Settings to load environment variables from .env file
- BaseSettings automatically validates types and required fields
- Numerical tolerances, grid shapes and budgets live here so that every
  check, the solver and the certifier agree on the same constants
- Each setting has a default value that reproduces the documented examples
"""

import json

from pydantic import field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Application settings loaded from environment variables

    Technical Note:
    - Pydantic converts env var types (str -> float, str -> list[float], ...)
    - Variables are read from .env file if it exists
    - Any tolerance can be overridden with e.g. EPS_TOL=1e-10
    """

    # Application Settings
    APP_NAME: str = "FixCert"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    ENVIRONMENT: str = "development"  # development, staging, production, test

    # API Settings
    API_V1_PREFIX: str = "/api/v1"
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # Tolerances
    # Technical Note: EPS_TOL separates genuine zeros from float noise in the
    # implicit-function checks; METRIC_ATOL decides equality of metric values.
    EPS_TOL: float = 1e-9
    METRIC_ATOL: float = 1e-12
    # contractive inequality on a space: F may exceed 0 by this fraction of the
    # largest distance in the tuple
    CONTRACTIVE_RTOL: float = 1e-12
    SOLVE_TOL: float = 1e-12
    FIXED_POINT_TOL: float = 1e-9

    # Solver
    DEFAULT_BUDGET: int = 10_000
    EPS_LADDER: list[float] = [1e-3, 1e-6, 1e-9]

    # Condition grids (logarithmic, plus the zero boundary)
    GRID_POINTS: int = 25
    GRID_MIN: float = 1e-3
    GRID_MAX: float = 1e3
    GRID_SEED: int = 7
    MONOTONE_BASES: int = 64

    # Comparison-function decay check
    DECAY_MAX_ITERATIONS: int = 10_000
    DECAY_THRESHOLD: float = 1e-9

    # Sampling of point pairs on infinite spaces
    PAIR_SAMPLES: int = 41
    INDEXED_SAMPLE_LIMIT: int = 50

    # Numeric coincidence search
    SEARCH_WINDOW: float = 1e3
    SEARCH_GRID: int = 2001

    # Logging
    LOG_LEVEL: str = "INFO"  # DEBUG, INFO, WARNING, ERROR, CRITICAL

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("DEBUG", mode="before")
    @classmethod
    def _parse_debug(cls, value):
        if isinstance(value, bool):
            return value
        if value is None:
            return False
        if isinstance(value, str):
            normalized = value.strip().lower()
            if normalized in {"1", "true", "yes", "on"}:
                return True
            if normalized in {"0", "false", "no", "off"}:
                return False
        return False

    @field_validator("EPS_LADDER", mode="before")
    @classmethod
    def _parse_eps_ladder(cls, value):
        if isinstance(value, str):
            stripped = value.strip()
            if not stripped:
                return []
            # Accept JSON array form and comma-separated form.
            if stripped.startswith("["):
                try:
                    parsed = json.loads(stripped)
                    if isinstance(parsed, list):
                        return [float(item) for item in parsed]
                except Exception:
                    pass
            return [float(part) for part in stripped.split(",") if part.strip()]
        if isinstance(value, (list, tuple, set)):
            return [float(item) for item in value]
        return value

    @field_validator("ENVIRONMENT")
    @classmethod
    def _validate_environment(cls, value: str) -> str:
        allowed = {"development", "staging", "production", "test"}
        normalized = value.strip().lower()
        if normalized not in allowed:
            raise ValueError(f"ENVIRONMENT must be one of {sorted(allowed)}")
        return normalized

    @field_validator("LOG_LEVEL")
    @classmethod
    def _validate_log_level(cls, value: str) -> str:
        normalized = value.strip().upper()
        if normalized not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError("LOG_LEVEL must be a standard logging level name")
        return normalized

    @model_validator(mode="after")
    def _validate_numeric_ranges(self):
        if self.GRID_MIN <= 0 or self.GRID_MIN >= self.GRID_MAX:
            raise ValueError("GRID_MIN must be positive and below GRID_MAX")
        if self.GRID_POINTS < 2:
            raise ValueError("GRID_POINTS must be at least 2")
        for name in ("EPS_TOL", "METRIC_ATOL", "CONTRACTIVE_RTOL", "SOLVE_TOL", "FIXED_POINT_TOL", "DECAY_THRESHOLD"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if any(eps <= 0 for eps in self.EPS_LADDER):
            raise ValueError("EPS_LADDER entries must be positive")
        return self


# Singleton instance
settings = Settings()


def get_settings() -> Settings:
    """
    Dependency injection helper for FastAPI

    Usage in FastAPI route:
    @router.get("/")
    async def read_root(settings: Settings = Depends(get_settings)):
        return {"app_name": settings.APP_NAME}
    """
    return settings
