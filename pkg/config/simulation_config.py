"""
Simulation Configuration for the subgroup OFDM simulator.

Defaults reproduce the reference simulation table: N = 256 subcarriers,
CP = N/8 samples, QPSK, epsilon = 0.15, SNR 0..25 dB in 5 dB steps and the
generator grid {2, 8, 16, 64, 128}.
"""

import json
import hashlib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings

from src.core.exceptions import ConfigurationError
from src.services.channel import DEFAULT_FADING, ChannelModel, Fading, required_prefix

TRIALS_AUTO = "auto"


class SimConfig(BaseSettings):
    """Monte Carlo sweep configuration."""

    # OFDM grid
    n: int = 256
    n_cp: Optional[int] = None  # defaults to n // 8
    symbol_duration_us: float = 12.8
    modulation: Literal["qpsk"] = "qpsk"

    # Estimation
    epsilon: float = 0.15
    estimators: List[Literal["ls", "lmmse", "subgroup"]] = [
        "ls",
        "lmmse",
        "subgroup",
    ]

    # Sweep grid
    snr_grid_db: List[float] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
    d_grid: List[int] = [2, 8, 16, 64, 128]
    channel: Literal["tdl", "itu"] = "tdl"
    tdl_decay_rate: float = 0.3
    fading: Optional[Literal["per_tap", "profile"]] = None  # None: channel default
    deterministic_taps: bool = False

    # Monte Carlo
    trials: str = TRIALS_AUTO
    master_seed: int = 20240101
    workers: int = 1

    # Output
    results_dir: Path = Path("./results")

    model_config = {
        "env_prefix": "SIM_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "case_sensitive": False,
        "extra": "ignore",
    }

    @field_validator("n")
    @classmethod
    def _positive_n(cls, value: int) -> int:
        if value < 1:
            raise ValueError("n must be a positive integer")
        return value

    @field_validator("epsilon")
    @classmethod
    def _epsilon_open_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("epsilon must lie strictly between 0 and 1")
        return value

    @field_validator("trials", mode="before")
    @classmethod
    def _trials_mode(cls, value: Any) -> str:
        text = str(value).strip().lower()
        if text == TRIALS_AUTO:
            return text
        if not text.isdigit() or int(text) < 1:
            raise ValueError("trials must be 'auto' or a positive integer")
        return str(int(text))

    @field_validator("master_seed")
    @classmethod
    def _seed_range(cls, value: int) -> int:
        if not 0 <= value < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        return value

    @field_validator("workers")
    @classmethod
    def _positive_workers(cls, value: int) -> int:
        if value < 1:
            raise ValueError("workers must be at least 1")
        return value

    @model_validator(mode="after")
    def _grid_invariants(self) -> "SimConfig":
        if self.n_cp is None:
            self.n_cp = self.n // 8
        if not 0 <= self.n_cp <= self.n:
            raise ConfigurationError(
                f"n_cp={self.n_cp} must lie in [0, n={self.n}]", config_key="n_cp"
            )
        bad = [d for d in self.d_grid if d < 1 or self.n % d != 0]
        if bad:
            raise ConfigurationError(
                f"d_grid entries {bad} do not divide n={self.n}", config_key="d_grid"
            )

        # Every realization must fit inside the prefix
        needed = required_prefix(
            ChannelModel(self.channel), self.n, self.symbol_duration_us
        )
        if self.n_cp < needed:
            raise ConfigurationError(
                f"{self.channel} taps at n={self.n} need a prefix of at least "
                f"{needed} samples, got n_cp={self.n_cp}",
                config_key="n_cp",
            )
        return self

    @classmethod
    def build(cls, **overrides: Any) -> "SimConfig":
        """Construct a config, reporting invalid values as ConfigurationError."""
        try:
            return cls(**overrides)
        except ValidationError as e:
            first = e.errors()[0]
            cause = first.get("ctx", {}).get("error")
            if isinstance(cause, ConfigurationError) and cause.config_key:
                key = cause.config_key
            else:
                key = ".".join(str(part) for part in first.get("loc", ())) or "config"
            raise ConfigurationError(
                f"Invalid configuration: {first.get('msg')}",
                config_key=key,
                details={"errors": [err.get("msg") for err in e.errors()]},
            ) from e

    @property
    def cp_length(self) -> int:
        """Cyclic prefix length in samples (always resolved after validation)."""
        return int(self.n_cp if self.n_cp is not None else self.n // 8)

    @property
    def fading_law(self) -> Fading:
        """Tap fading used for realizations; fixed taps win over ``fading``."""
        if self.deterministic_taps:
            return Fading.FIXED
        if self.fading is not None:
            return Fading(self.fading)
        return DEFAULT_FADING[ChannelModel(self.channel)]

    def canonical_dict(self) -> Dict[str, Any]:
        """Config values that influence simulation numbers."""
        data = self.model_dump(mode="json", exclude={"results_dir", "workers"})
        data["n_cp"] = self.cp_length
        data["fading"] = self.fading_law.value
        return data

    def signature(self) -> str:
        """Stable short hash of the simulation-relevant configuration."""
        payload = json.dumps(self.canonical_dict(), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]
