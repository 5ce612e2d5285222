"""
Configuration module for the subgroup OFDM simulator.
"""

from .settings import settings
from .simulation_config import SimConfig
from .api_config import APIConfig

__all__ = ["settings", "SimConfig", "APIConfig"]
