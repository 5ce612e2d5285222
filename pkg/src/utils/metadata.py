"""
Run Metadata Handler.
Stamps simulation outputs and API responses with a reproducible run signature.
"""

import datetime
import platform
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from config.simulation_config import SimConfig


class RunMetadata:
    """Run metadata for sweeps and service responses."""

    def __init__(self, config: Optional[SimConfig] = None):
        self._app_name = "subgroup-ofdm-estimation"
        self._version = "1.0.0"
        self.config = config

    @property
    def signature(self) -> str:
        """Configuration signature, or 'unconfigured' when no config is bound."""
        return self.config.signature() if self.config else "unconfigured"

    def get_metadata(self) -> Dict[str, Any]:
        """Get run metadata for outputs."""
        return {
            "project": self._app_name,
            "version": self._version,
            "signature": self.signature,
            "numpy": np.__version__,
            "python": platform.python_version(),
            "timestamp": datetime.datetime.now().isoformat(),
        }

    def log_start(self, context: str) -> None:
        """Log the run identity at the start of a sweep or command."""
        logger.info(f"{context}: {self._app_name} v{self._version}")
        logger.info(f"Config signature: {self.signature}")


def run_metadata(config: Optional[SimConfig] = None) -> RunMetadata:
    """Create a metadata handler bound to ``config``."""
    return RunMetadata(config)
