"""
Configuration management for the T-Bill QAE toolkit.
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import dotenv_values
from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Application settings."""

    # Application settings
    APP_NAME: str = "tbill-qae"
    LOG_LEVEL: str = "INFO"

    # Reproducibility defaults
    DEFAULT_SEED: int = 1234
    DEFAULT_TRIALS: int = 16
    DEFAULT_P: float = 0.2
    DEFAULT_SHOTS: int = 10000

    # Router settings
    ROUTE_TRIALS: int = 64
    LOOKAHEAD_WINDOW: int = 8
    LOOKAHEAD_DECAY: float = 0.5

    # Dense simulation guards
    MAX_UNITARY_WIDTH: int = 12
    MAX_STATEVECTOR_WIDTH: int = 24

    SCALING_WORKERS: int = 1

    model_config = SettingsConfigDict(
        env_prefix="TBILL_QAE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator(
        "DEFAULT_TRIALS",
        "DEFAULT_SHOTS",
        "ROUTE_TRIALS",
        "LOOKAHEAD_WINDOW",
        "MAX_UNITARY_WIDTH",
        "MAX_STATEVECTOR_WIDTH",
        "SCALING_WORKERS",
    )
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("LOOKAHEAD_DECAY")
    @classmethod
    def check_decay(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError("decay must lie in (0, 1]")
        return v

    @field_validator("DEFAULT_P")
    @classmethod
    def check_probability(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError("probability must lie in [0, 1]")
        return v


@lru_cache()
def get_settings() -> Settings:
    """Get application settings with caching."""
    return Settings()


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a ``key=value`` config file.

    Keys mirror command-line flags; dashes and case are normalized so that
    ``eval-qubits=3`` and ``EVAL_QUBITS=3`` are the same entry.
    """
    values = dotenv_values(path)
    config = {
        key.strip().lower().replace("-", "_"): value
        for key, value in values.items()
        if value is not None
    }
    logger.debug(f"Loaded {len(config)} config entries from {path}")
    return config


def configure_logging(level: Optional[str] = None) -> None:
    """Configure application logging."""
    settings = get_settings()
    level = level or settings.LOG_LEVEL

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(),
        ],
    )

    # Set log levels for libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)

    logger.debug(f"Logging configured with level {level}")
