"""
HTTP service configuration for the subgroup OFDM simulator.

Sweeps requested over HTTP run inside the request, so their size is capped.
"""

from typing import List

from pydantic_settings import BaseSettings


class APIConfig(BaseSettings):
    """Service host, identity and request limits."""

    api_host: str = "0.0.0.0"
    api_port: int = 8000
    api_prefix: str = "/api/v1"

    app_name: str = "Subgroup OFDM Estimation Service"
    app_version: str = "1.0.0"
    app_description: str = "Group-based OFDM channel estimation simulator"

    # Request limits
    max_api_trials: int = 50
    max_api_n: int = 1024
    max_api_cells: int = 60

    cors_origins: List[str] = ["*"]

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",
    }

    @property
    def cors_config(self) -> dict:
        """Keyword arguments for CORSMiddleware."""
        return {
            "allow_origins": self.cors_origins,
            "allow_credentials": True,
            "allow_methods": ["GET", "POST"],
            "allow_headers": ["*"],
        }

    def sweep_limit_violation(self, trials: int, n: int, cells: int) -> str:
        """Reason a sweep request is too large, or an empty string."""
        if trials > self.max_api_trials:
            return f"At most {self.max_api_trials} trials per cell over HTTP"
        if n > self.max_api_n:
            return f"At most n={self.max_api_n} subcarriers over HTTP"
        if cells > self.max_api_cells:
            return f"At most {self.max_api_cells} (d, snr) cells over HTTP"
        return ""
