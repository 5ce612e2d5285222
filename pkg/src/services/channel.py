"""
Multipath channel models.

Two power delay profiles are provided: the ITU indoor office profile, whose
delays do not line up with any annihilator, and a structured tapped delay
line whose taps sit exactly on H_perp = <n/d>. Realizations are block-fading
with unit mean total power, and every tap is marginally CN(0, P_p). The TDL
fades each tap independently. The ITU profile keeps its stated power shape
and fades as a whole: one Rayleigh envelope per realization, independent
uniform tap phases, so the taps stay uncorrelated with the same covariance.
The noise convention is per-sample SNR, sigma2 = 10^(-SNR/10).
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from src.core.exceptions import ChannelModelError
from src.core.group_core import subgroup
from src.core.transform import channel_freq_response, circular_convolve, transmit_cp

ITU_INDOOR_DELAYS_NS = (0.0, 100.0, 200.0, 300.0, 500.0, 700.0)
ITU_INDOOR_POWERS_DB = (0.0, -3.6, -7.2, -10.8, -18.0, -25.2)
DEFAULT_SYMBOL_DURATION_US = 12.8
DEFAULT_DECAY_RATE = 0.3


class ChannelModel(str, Enum):
    """Supported channel families."""

    TDL = "tdl"
    ITU = "itu"


class Fading(str, Enum):
    """How tap gains are drawn for one realization."""

    PER_TAP = "per_tap"  # independent CN(0, P_p) per tap
    PROFILE = "profile"  # shared Rayleigh envelope, independent phases
    FIXED = "fixed"  # sqrt(P_p), no fading


DEFAULT_FADING = {ChannelModel.TDL: Fading.PER_TAP, ChannelModel.ITU: Fading.PROFILE}


@dataclass(frozen=True)
class PowerDelayProfile:
    """Path delays (ns) and relative average powers (dB)."""

    delays_ns: Tuple[float, ...]
    powers_db: Tuple[float, ...]
    label: str

    def __post_init__(self):
        if len(self.delays_ns) != len(self.powers_db):
            raise ChannelModelError(
                "Delay and power lists differ in length", model=self.label
            )
        if not self.delays_ns:
            raise ChannelModelError("Profile has no taps", model=self.label)
        if self.delays_ns[0] != 0.0:
            raise ChannelModelError("First delay must be 0 ns", model=self.label)
        if any(b <= a for a, b in zip(self.delays_ns, self.delays_ns[1:])):
            raise ChannelModelError(
                "Delays must be strictly increasing", model=self.label
            )

    @property
    def num_taps(self) -> int:
        return len(self.delays_ns)

    def linear_powers(self) -> np.ndarray:
        """Per-tap powers in linear scale, normalized to unit sum."""
        powers = 10.0 ** (np.asarray(self.powers_db, dtype=float) / 10.0)
        return powers / powers.sum()


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One block-fading channel draw on the sample grid."""

    taps: np.ndarray
    freq: np.ndarray
    tap_support: Tuple[int, ...]
    n_cp: int

    def __post_init__(self):
        outside = np.flatnonzero(self.taps)
        if not set(outside.tolist()) <= set(self.tap_support):
            raise ChannelModelError("Taps are nonzero outside the declared support")
        if self.tap_support and max(self.tap_support) >= self.n_cp:
            raise ChannelModelError(
                f"Tap index {max(self.tap_support)} not covered by a "
                f"{self.n_cp}-sample cyclic prefix",
                details={"tap_support": list(self.tap_support), "n_cp": self.n_cp},
            )

    @property
    def n(self) -> int:
        return int(self.taps.shape[0])

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-sample complex AWGN variance at a target SNR."""

    snr_db: float
    sigma2: float = field(default=0.0)

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseSpec":
        """Unit signal power convention: sigma2 = 10^(-snr_db / 10)."""
        return cls(snr_db=float(snr_db), sigma2=float(10.0 ** (-snr_db / 10.0)))

    @classmethod
    def noiseless(cls) -> "NoiseSpec":
        return cls(snr_db=math.inf, sigma2=0.0)


def itu_indoor_pdp() -> PowerDelayProfile:
    """ITU indoor office profile."""
    return PowerDelayProfile(
        delays_ns=ITU_INDOOR_DELAYS_NS,
        powers_db=ITU_INDOOR_POWERS_DB,
        label="ITU indoor office",
    )


def tdl_structured_pdp(
    n: int,
    d: int,
    n_cp: Optional[int] = None,
    decay_rate: float = DEFAULT_DECAY_RATE,
    symbol_duration_us: float = DEFAULT_SYMBOL_DURATION_US,
) -> PowerDelayProfile:
    """Tapped delay line with taps on <n/d>, exponentially decaying by ordinal."""
    spec = subgroup(n, d)
    n_cp = n // 8 if n_cp is None else n_cp
    indices = [m for m in sorted(spec.elements_h_perp) if m < n_cp]
    if not indices:
        raise ChannelModelError(
            f"No annihilator tap of <{n // d}> fits inside a {n_cp}-sample prefix",
            model="tdl",
        )

    dropped = spec.perp_order - len(indices)
    if dropped:
        logger.debug(f"TDL d={d}: dropped {dropped} taps beyond the cyclic prefix")

    period_ns = symbol_duration_us * 1000.0 / n
    return PowerDelayProfile(
        delays_ns=tuple(m * period_ns for m in indices),
        powers_db=tuple(
            10.0 * math.log10(math.exp(-decay_rate * i)) for i in range(len(indices))
        ),
        label=f"TDL structured (n={n}, d={d})",
    )


def delays_to_samples(
    pdp: PowerDelayProfile, symbol_duration_us: float, n: int
) -> List[int]:
    """Round each path delay to the nearest sample index."""
    symbol_ns = symbol_duration_us * 1000.0
    period_ns = symbol_ns / n
    late = [delay for delay in pdp.delays_ns if delay >= symbol_ns]
    if late:
        raise ChannelModelError(
            f"Delays {late} ns exceed the {symbol_ns} ns symbol", model=pdp.label
        )
    return [int(round(delay / period_ns)) for delay in pdp.delays_ns]


def tap_powers_on_grid(
    pdp: PowerDelayProfile, symbol_duration_us: float, n: int
) -> Tuple[List[int], np.ndarray]:
    """Sample indices with normalized linear powers; colliding paths add."""
    merged: Dict[int, float] = {}
    for index, power in zip(
        delays_to_samples(pdp, symbol_duration_us, n), pdp.linear_powers()
    ):
        merged[index] = merged.get(index, 0.0) + float(power)
    indices = sorted(merged)
    return indices, np.array([merged[m] for m in indices])


def pdp_for(
    model: ChannelModel,
    n: int,
    d: int,
    n_cp: Optional[int] = None,
    decay_rate: float = DEFAULT_DECAY_RATE,
    symbol_duration_us: float = DEFAULT_SYMBOL_DURATION_US,
) -> PowerDelayProfile:
    """Profile used for a sweep cell; only the TDL depends on d."""
    if ChannelModel(model) is ChannelModel.ITU:
        return itu_indoor_pdp()
    return tdl_structured_pdp(n, d, n_cp, decay_rate, symbol_duration_us)


def required_prefix(
    model: ChannelModel,
    n: int,
    symbol_duration_us: float = DEFAULT_SYMBOL_DURATION_US,
) -> int:
    """Shortest cyclic prefix that covers every tap of ``model`` at size n."""
    if ChannelModel(model) is ChannelModel.ITU:
        return max(delays_to_samples(itu_indoor_pdp(), symbol_duration_us, n)) + 1
    # TDL taps past the prefix are dropped; tap 0 always stays
    return 1


def realize_channel(
    pdp: PowerDelayProfile,
    n: int,
    n_cp: int,
    rng: np.random.Generator,
    symbol_duration_us: float = DEFAULT_SYMBOL_DURATION_US,
    fading: Fading = Fading.PER_TAP,
) -> ChannelRealization:
    """Draw one channel; each tap is marginally CN(0, P_p) unless ``fading`` is FIXED."""
    indices, powers = tap_powers_on_grid(pdp, symbol_duration_us, n)
    if max(indices) >= n_cp:
        raise ChannelModelError(
            f"Profile '{pdp.label}' spans {max(indices) + 1} samples, "
            f"longer than the {n_cp}-sample prefix",
            model=pdp.label,
        )

    fading = Fading(fading)
    if fading is Fading.FIXED:
        gains = np.sqrt(powers).astype(np.complex128)
    elif fading is Fading.PROFILE:
        envelope = rng.standard_normal(2)
        phases = rng.uniform(0.0, 2.0 * np.pi, len(indices))
        gain = (envelope[0] + 1j * envelope[1]) / np.sqrt(2.0)
        gains = gain * np.sqrt(powers) * np.exp(1j * phases)
    else:
        draws = rng.standard_normal((2, len(indices)))
        gains = np.sqrt(powers / 2.0) * (draws[0] + 1j * draws[1])

    taps = np.zeros(n, dtype=np.complex128)
    taps[indices] = gains
    return ChannelRealization(
        taps=taps,
        freq=channel_freq_response(taps),
        tap_support=tuple(indices),
        n_cp=n_cp,
    )


def complex_awgn(size: int, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. CN(0, sigma2) samples."""
    draws = rng.standard_normal((2, size))
    return np.sqrt(sigma2 / 2.0) * (draws[0] + 1j * draws[1])


def apply_channel_awgn(
    x: Sequence[complex],
    ch: ChannelRealization,
    noise: NoiseSpec,
    rng: np.random.Generator,
    n_cp: Optional[int] = None,
) -> np.ndarray:
    """Pass one time block through the channel and add white noise.

    With ``n_cp`` the explicit prefix path is used, otherwise the circular
    shortcut; the two agree when the prefix covers the tap span.
    """
    block = np.asarray(x, dtype=np.complex128)
    if n_cp is None:
        received = circular_convolve(block, ch.taps)
    else:
        received = transmit_cp(block, ch.taps, n_cp)

    if noise.sigma2 > 0.0:
        received = received + complex_awgn(block.shape[0], noise.sigma2, rng)
    return received


def pdp_table(
    pdp: PowerDelayProfile, symbol_duration_us: float, n: int
) -> List[Dict[str, float]]:
    """Rows describing each path: delay, sample index, dB and linear power."""
    indices = delays_to_samples(pdp, symbol_duration_us, n)
    return [
        {
            "delay_ns": delay,
            "sample_index": index,
            "power_db": power_db,
            "linear_power": float(linear),
        }
        for delay, index, power_db, linear in zip(
            pdp.delays_ns, indices, pdp.powers_db, pdp.linear_powers()
        )
    ]
