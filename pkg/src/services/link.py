"""
Single-trial OFDM link.

One trial draws a channel, sends a full pilot symbol followed by one data
symbol over the active tones Z_n minus H, estimates the channel with every
requested estimator, equalizes with a one-tap divider and scores MSE, SER,
BER and throughput. All estimators see the same channel, noise and data.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.special import erfc

from config.simulation_config import SimConfig
from src.core.exceptions import SignalShapeError
from src.core.group_core import SubgroupSpec, project, signal_energy, subgroup
from src.core.transform import dft_unitary, idft_unitary
from src.services.channel import (
    ChannelModel,
    ChannelRealization,
    NoiseSpec,
    PowerDelayProfile,
    apply_channel_awgn,
    pdp_for,
    realize_channel,
)
from src.services.estimators import (
    EstimateResult,
    Estimator,
    LmmseFilter,
    LmmseStatistics,
    covariance_from_pdp,
    lmmse_estimate,
    ls_estimate,
    perfect_estimate,
    subgroup_estimate,
)

BITS_PER_SYMBOL = {"qpsk": 2}
ERASURE_THRESHOLD = 1e-9
_SQRT_HALF = 1.0 / math.sqrt(2.0)
ERASURE_SYMBOL = complex(_SQRT_HALF, _SQRT_HALF)


@dataclass(frozen=True)
class ToneAllocation:
    """Active tones Z_n minus H for H = <d>."""

    n: int
    spec: SubgroupSpec
    active: Tuple[int, ...]
    eta: float

    @classmethod
    def for_generator(cls, n: int, d: int) -> "ToneAllocation":
        spec = subgroup(n, d)
        nulled = set(spec.elements_h)
        active = tuple(k for k in range(n) if k not in nulled)
        return cls(n=n, spec=spec, active=active, eta=len(active) / n)

    @property
    def nulled(self) -> Tuple[int, ...]:
        return self.spec.elements_h


@dataclass(frozen=True)
class TrialMetrics:
    """Per-trial link metrics for one estimator."""

    mse: float
    ser: float
    ber: float
    throughput: float
    chosen_d: Optional[int] = None


def qpsk_map(bits: Sequence[int]) -> np.ndarray:
    """Gray QPSK: 00 -> (1+j), 01 -> (-1+j), 11 -> (-1-j), 10 -> (1-j), over sqrt 2."""
    bits = np.asarray(bits, dtype=np.int8)
    if bits.ndim != 1 or bits.size % 2:
        raise SignalShapeError(f"QPSK needs an even number of bits, got {bits.size}")
    pairs = bits.reshape(-1, 2)
    return _SQRT_HALF * ((1 - 2 * pairs[:, 1]) + 1j * (1 - 2 * pairs[:, 0]))


def qpsk_demap(symbols: Sequence[complex]) -> np.ndarray:
    """Quadrant decision, inverse of ``qpsk_map``."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    bits = np.empty((symbols.size, 2), dtype=np.int8)
    bits[:, 0] = symbols.imag < 0
    bits[:, 1] = symbols.real < 0
    return bits.reshape(-1)


def build_ofdm_symbol(data_syms: Sequence[complex], alloc: ToneAllocation) -> np.ndarray:
    """Place data on active tones in index order; tones in H stay zero."""
    data = np.asarray(data_syms, dtype=np.complex128)
    if data.shape != (len(alloc.active),):
        raise SignalShapeError(
            f"Expected {len(alloc.active)} data symbols, got {data.size}",
            expected=len(alloc.active),
            actual=int(data.size),
        )
    block = np.zeros(alloc.n, dtype=np.complex128)
    block[list(alloc.active)] = data
    return block


def erasure_mask(H_hat: Sequence[complex], alloc: ToneAllocation) -> np.ndarray:
    """Active tones whose estimate is too small to divide by."""
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    return np.abs(H_hat[list(alloc.active)]) < ERASURE_THRESHOLD


def equalize(
    Y: Sequence[complex], H_hat: Sequence[complex], alloc: ToneAllocation
) -> np.ndarray:
    """One-tap zero-forcing on active tones; erasures map to a fixed symbol."""
    Y = np.asarray(Y, dtype=np.complex128)
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    tones = list(alloc.active)
    erased = erasure_mask(H_hat, alloc)

    symbols = np.full(len(tones), ERASURE_SYMBOL, dtype=np.complex128)
    kept = ~erased
    symbols[kept] = Y[tones][kept] / H_hat[tones][kept]

    if erased.any():
        logger.warning(f"Equalizer: {int(erased.sum())} tones erased")
    return symbols


def mse_metric(H_true: Sequence[complex], H_hat: Sequence[complex]) -> float:
    """(1/n) sum_k |H[k] - H_hat[k]|^2 over all n tones."""
    H_true = np.asarray(H_true, dtype=np.complex128)
    H_hat = np.asarray(H_hat, dtype=np.complex128)
    if H_true.shape != H_hat.shape:
        raise SignalShapeError("True and estimated responses differ in length")
    return signal_energy(H_true - H_hat) / H_true.shape[0]


def throughput_metric(ser: float, alloc: ToneAllocation, bits_per_symbol: int) -> float:
    """eta * (1 - SER) * log2 M, bits per subcarrier use."""
    if not 0.0 <= ser <= 1.0:
        raise ValueError(f"SER must lie in [0, 1], got {ser}")
    return alloc.eta * (1.0 - ser) * bits_per_symbol


def predicted_mse(
    e_total: float, e_sub: float, sigma2: float, d_star: int, n: int
) -> float:
    """Expected tap-domain MSE of a projected noisy estimate."""
    if e_sub > e_total * (1.0 + 1e-12):
        raise ValueError("Captured energy exceeds total energy")
    return (e_total - e_sub) / n + sigma2 * d_star / n


def mse_bound(e_total: float, epsilon: float, n: int) -> float:
    """Worst-case projection MSE when at least (1 - epsilon) is captured."""
    return epsilon * e_total / n


def projected_time_error(
    h: Sequence[complex], h_hat: Sequence[complex], spec: SubgroupSpec
) -> float:
    """(1/n) ||h - P h_hat||^2 for the projector onto H_perp."""
    h = np.asarray(h, dtype=np.complex128)
    return signal_energy(h - project(h_hat, spec)) / spec.n


def qpsk_ser_awgn(snr_db: float) -> float:
    """Closed-form QPSK SER at per-symbol SNR gamma."""
    gamma = 10.0 ** (snr_db / 10.0)
    q = float(erfc(math.sqrt(gamma / 2.0)))
    return q - 0.25 * q * q


def _transmit(
    bits: np.ndarray,
    alloc: ToneAllocation,
    channel: ChannelRealization,
    noise: NoiseSpec,
    rng: np.random.Generator,
    n_cp: int,
) -> Tuple[np.ndarray, np.ndarray]:
    X = build_ofdm_symbol(qpsk_map(bits), alloc)
    y = apply_channel_awgn(idft_unitary(X), channel, noise, rng, n_cp=n_cp)
    return X, dft_unitary(y)


def lmmse_filter_for(
    pdp: PowerDelayProfile, config: SimConfig, alloc: ToneAllocation, snr_db: float
) -> LmmseFilter:
    """Receiver statistics for one (channel, d, SNR) cell."""
    stats = LmmseStatistics(
        covariance=covariance_from_pdp(pdp, config.n, config.symbol_duration_us),
        sigma2=NoiseSpec.from_snr_db(snr_db).sigma2,
    )
    return LmmseFilter(stats, alloc.active)


def run_trial(
    config: SimConfig,
    d: int,
    snr_db: float,
    rng: np.random.Generator,
    estimators: Optional[Iterable[Estimator]] = None,
    pdp: Optional[PowerDelayProfile] = None,
    lmmse_filter: Optional[LmmseFilter] = None,
) -> Dict[Estimator, TrialMetrics]:
    """Run one Monte Carlo trial and score each estimator on it."""
    estimators = [Estimator(e) for e in (estimators or config.estimators)]
    n, n_cp = config.n, config.cp_length
    bits_per_symbol = BITS_PER_SYMBOL[config.modulation]
    alloc = ToneAllocation.for_generator(n, d)
    pdp = pdp or pdp_for(
        ChannelModel(config.channel),
        n,
        d,
        n_cp,
        config.tdl_decay_rate,
        config.symbol_duration_us,
    )

    # Draw order is fixed: channel, pilot, data
    channel = realize_channel(
        pdp,
        n,
        n_cp,
        rng,
        symbol_duration_us=config.symbol_duration_us,
        fading=config.fading_law,
    )
    noise = NoiseSpec.from_snr_db(snr_db)
    num_bits = len(alloc.active) * bits_per_symbol
    X_pilot, Y_pilot = _transmit(
        rng.integers(0, 2, num_bits), alloc, channel, noise, rng, n_cp
    )
    data_bits = rng.integers(0, 2, num_bits).astype(np.int8)
    _, Y_data = _transmit(data_bits, alloc, channel, noise, rng, n_cp)

    results: Dict[Estimator, TrialMetrics] = {}
    for method in estimators:
        estimate = _estimate(
            method, config, alloc, pdp, snr_db, X_pilot, Y_pilot, channel, lmmse_filter
        )
        detected = qpsk_demap(equalize(Y_data, estimate.H_hat_freq, alloc))

        bit_errors = detected != data_bits
        symbol_errors = bit_errors.reshape(-1, bits_per_symbol).any(axis=1)
        ser = float(symbol_errors.mean())
        results[method] = TrialMetrics(
            mse=mse_metric(channel.freq, estimate.H_hat_freq),
            ser=ser,
            ber=float(bit_errors.mean()),
            throughput=throughput_metric(ser, alloc, bits_per_symbol),
            chosen_d=estimate.chosen_d,
        )
    return results


def _estimate(
    method: Estimator,
    config: SimConfig,
    alloc: ToneAllocation,
    pdp: PowerDelayProfile,
    snr_db: float,
    X_pilot: np.ndarray,
    Y_pilot: np.ndarray,
    channel: ChannelRealization,
    lmmse_filter: Optional[LmmseFilter],
) -> EstimateResult:
    if method is Estimator.LS:
        return ls_estimate(Y_pilot, X_pilot, alloc.active)
    if method is Estimator.SUBGROUP:
        return subgroup_estimate(Y_pilot, X_pilot, alloc.active, config.epsilon)
    if method is Estimator.LMMSE:
        lmmse_filter = lmmse_filter or lmmse_filter_for(pdp, config, alloc, snr_db)
        H_ls = ls_estimate(Y_pilot, X_pilot, alloc.active).H_hat_freq
        return lmmse_estimate(H_ls, None, alloc.active, lmmse_filter=lmmse_filter)
    return perfect_estimate(channel.freq)
