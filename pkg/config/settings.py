"""
Unified Configuration settings for the subgroup OFDM simulator.
"""

from pathlib import Path
from typing import Optional
from pydantic_settings import BaseSettings

from .api_config import APIConfig
from .simulation_config import SimConfig


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    log_level: str = "INFO"
    log_file: Optional[str] = "logs/groupest.log"
    log_rotation: str = "10 MB"
    log_retention: str = "7 days"
    log_format: str = (
        "{time:YYYY-MM-DD HH:mm:ss} | {level} | {name}:{function}:{line} | {message}"
    )

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",
    }


class AppSettings(BaseSettings):
    """Main application settings."""

    # Application Identity
    app_name: str = "Subgroup OFDM Estimation"
    app_version: str = "1.0.0"
    app_author: str = "BalenciCash"
    app_description: str = (
        "OFDM link simulator with energy-constrained subgroup channel estimation"
    )

    # Environment
    environment: str = "development"
    debug: bool = False

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",
    }

    @property
    def is_production(self) -> bool:
        """Check if running in production."""
        return self.environment.lower() == "production"


class Settings:
    """Unified settings container."""

    def __init__(self):
        self.app = AppSettings()
        self.api = APIConfig()
        self.logging = LoggingConfig()
        self.simulation = SimConfig()

    def ensure_directories(self) -> None:
        """Ensure output directories used by entry points exist."""
        directories = [self.simulation.results_dir]
        if self.logging.log_file:
            directories.append(Path(self.logging.log_file).parent)

        for directory in directories:
            Path(directory).mkdir(parents=True, exist_ok=True)


# Initialize global settings instance
settings = Settings()
