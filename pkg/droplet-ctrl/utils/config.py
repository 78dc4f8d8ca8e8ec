"""
Environment configuration management for droplet-ctrl.
Validates and provides access to environment variables.
"""
import os
from typing import Optional
from pathlib import Path

from dotenv import load_dotenv

from .errors import ConfigError


class Config:
    """Runtime configuration read from the environment."""

    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[Path] = None
    LOG_FORMAT: str = "json"
    ENVIRONMENT: str = "development"
    RESULTS_DIR: Path = Path("./results")
    SHOW_PROGRESS: bool = True

    def __init__(self):
        """Initialize configuration from environment variables."""
        load_dotenv()

        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
        self.LOG_FORMAT = os.getenv("LOG_FORMAT", "json").lower()
        self.ENVIRONMENT = os.getenv("ENVIRONMENT", "development").lower()
        self.RESULTS_DIR = Path(os.getenv("DROPLET_RESULTS_DIR", "./results"))
        self.SHOW_PROGRESS = self._get_flag("DROPLET_PROGRESS", "1")

        log_file_path = os.getenv("LOG_FILE")
        if log_file_path:
            self.LOG_FILE = Path(log_file_path)

        self._validate()

    def _get_flag(self, key: str, default: str) -> bool:
        """
        Read a 0/1 environment flag.

        Args:
            key: Environment variable name
            default: Value used when the variable is unset

        Returns:
            Flag value

        Raises:
            ConfigError: If the value is neither 0 nor 1
        """
        value = os.getenv(key, default).strip()
        if value not in ("0", "1"):
            raise ConfigError(f"{key} must be 0 or 1, got {value!r}")
        return value == "1"

    def _validate(self) -> None:
        """Validate configuration values."""
        valid_log_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if self.LOG_LEVEL not in valid_log_levels:
            raise ConfigError(
                f"LOG_LEVEL must be one of {valid_log_levels}, got {self.LOG_LEVEL}"
            )

        valid_formats = ["json", "text"]
        if self.LOG_FORMAT not in valid_formats:
            raise ConfigError(
                f"LOG_FORMAT must be one of {valid_formats}, got {self.LOG_FORMAT}"
            )

        valid_environments = ["development", "production", "testing"]
        if self.ENVIRONMENT not in valid_environments:
            raise ConfigError(
                f"ENVIRONMENT must be one of {valid_environments}, got {self.ENVIRONMENT}"
            )

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.ENVIRONMENT == "development"

    @property
    def is_production(self) -> bool:
        """Check if running in production mode."""
        return self.ENVIRONMENT == "production"

    @property
    def is_testing(self) -> bool:
        """Check if running in testing mode."""
        return self.ENVIRONMENT == "testing"


# Global configuration instance
_config: Optional[Config] = None


def get_config() -> Config:
    """
    Get global configuration instance.

    Returns:
        Config instance
    """
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config() -> None:
    """Drop the cached configuration so the next get_config() re-reads the environment."""
    global _config
    _config = None
