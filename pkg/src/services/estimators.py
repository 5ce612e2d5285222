"""
Pilot-aided channel estimators: LS, LMMSE with known statistics, and the
energy-constrained subgroup estimator.

All estimators work from one full pilot symbol. Tones outside the active
set carry no pilot and are zero-filled before any inverse transform.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from src.core.exceptions import EstimationError, SignalShapeError
from src.core.group_core import divisors, project, signal_energy, subgroup
from src.core.transform import channel_freq_response, channel_impulse_response
from src.services.channel import PowerDelayProfile, tap_powers_on_grid


class Estimator(str, Enum):
    """Estimator tags; PERFECT is the genie reference."""

    LS = "ls"
    LMMSE = "lmmse"
    SUBGROUP = "subgroup"
    PERFECT = "perfect"


@dataclass(frozen=True, eq=False)
class EstimateResult:
    """Frequency-domain estimate with its tap-domain counterpart."""

    h_hat_time: np.ndarray
    H_hat_freq: np.ndarray
    method: Estimator
    chosen_d: Optional[int] = None
    ratio_trace: Tuple[Tuple[int, float], ...] = ()
    operation_count: int = 0

    @property
    def candidates_visited(self) -> int:
        """Number of divisors examined by the subgroup search."""
        return len(self.ratio_trace)


@dataclass(frozen=True, eq=False)
class LmmseStatistics:
    """Receiver-known channel covariance R_HH and noise variance."""

    covariance: np.ndarray
    sigma2: float

    def __post_init__(self):
        cov = self.covariance
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise SignalShapeError(f"Covariance must be square, got {cov.shape}")
        if not np.allclose(cov, cov.conj().T, atol=1e-10):
            raise EstimationError("Covariance is not Hermitian", method="lmmse")
        if self.sigma2 < 0:
            raise EstimationError("Noise variance must be nonnegative", method="lmmse")


def _active_indices(active: Iterable[int], n: int) -> np.ndarray:
    indices = np.unique(np.asarray(list(active), dtype=int))
    if indices.size == 0:
        raise EstimationError("Active tone set is empty, nothing to estimate")
    if indices[0] < 0 or indices[-1] >= n:
        raise EstimationError(
            f"Active tones must lie in [0, {n})", details={"n": n}
        )
    return indices


def _check_pair(Y: Sequence[complex], X: Sequence[complex]) -> Tuple[np.ndarray, np.ndarray]:
    received = np.asarray(Y, dtype=np.complex128)
    pilots = np.asarray(X, dtype=np.complex128)
    if received.shape != pilots.shape or received.ndim != 1:
        raise SignalShapeError(
            f"Received {received.shape} and pilot {pilots.shape} blocks differ"
        )
    return received, pilots


def _pilot_division(
    received: np.ndarray, pilots: np.ndarray, active: np.ndarray
) -> np.ndarray:
    if np.any(pilots[active] == 0):
        zero_tones = active[pilots[active] == 0].tolist()
        raise EstimationError(
            "Zero pilot on an active tone",
            method="ls",
            details={"tones": zero_tones[:10]},
        )
    H_hat = np.zeros_like(received)
    H_hat[active] = received[active] / pilots[active]
    return H_hat


def ls_estimate(
    Y: Sequence[complex], X: Sequence[complex], active: Iterable[int]
) -> EstimateResult:
    """Per-tone division on active tones, zero elsewhere."""
    received, pilots = _check_pair(Y, X)
    tones = _active_indices(active, received.shape[0])
    H_hat = _pilot_division(received, pilots, tones)
    return EstimateResult(
        h_hat_time=channel_impulse_response(H_hat),
        H_hat_freq=H_hat,
        method=Estimator.LS,
    )


def covariance_from_pdp(
    pdp: PowerDelayProfile, n: int, symbol_duration_us: float
) -> np.ndarray:
    """R[k, l] = sum_p P_p exp(-j 2 pi (k - l) m_p / n)."""
    indices, powers = tap_powers_on_grid(pdp, symbol_duration_us, n)
    steering = np.exp(-2j * np.pi * np.outer(np.arange(n), indices) / n)
    return (steering * powers) @ steering.conj().T


class LmmseFilter:
    """Cholesky-factored LMMSE filter on the active-tone submatrix."""

    def __init__(self, stats: LmmseStatistics, active: Iterable[int]):
        self.n = stats.covariance.shape[0]
        self.active = _active_indices(active, self.n)
        self.sigma2 = float(stats.sigma2)
        self.r_active = stats.covariance[np.ix_(self.active, self.active)]
        self._factor = None

        if self.sigma2 == 0.0:
            return

        system = self.r_active + self.sigma2 * np.eye(self.active.size)
        try:
            self._factor = cho_factor(system, lower=True)
        except LinAlgError as e:
            raise EstimationError(
                f"LMMSE system is not positive definite: {str(e)}",
                method="lmmse",
                details={"condition_estimate": float(np.linalg.cond(system))},
            ) from e

    def apply(self, H_ls: np.ndarray) -> np.ndarray:
        """R (R + sigma2 I)^-1 H_ls on active tones, zero elsewhere."""
        H_hat = np.zeros_like(H_ls)
        if self._factor is None:
            H_hat[self.active] = H_ls[self.active]
        else:
            H_hat[self.active] = self.r_active @ cho_solve(
                self._factor, H_ls[self.active]
            )
        return H_hat


def lmmse_estimate(
    H_ls: Sequence[complex],
    stats: Optional[LmmseStatistics],
    active: Iterable[int],
    lmmse_filter: Optional[LmmseFilter] = None,
) -> EstimateResult:
    """Linear MMSE smoothing of an LS estimate.

    A prebuilt ``lmmse_filter`` (shared across the trials of a cell) takes
    precedence over ``stats``.
    """
    H_ls = np.asarray(H_ls, dtype=np.complex128)
    if lmmse_filter is None:
        if stats is None:
            raise EstimationError("LMMSE needs statistics or a filter", method="lmmse")
        lmmse_filter = LmmseFilter(stats, active)
    if H_ls.shape[0] != lmmse_filter.n:
        raise SignalShapeError(
            "LS estimate and covariance sizes differ",
            expected=lmmse_filter.n,
            actual=H_ls.shape[0],
        )
    H_hat = lmmse_filter.apply(H_ls)
    return EstimateResult(
        h_hat_time=channel_impulse_response(H_hat),
        H_hat_freq=H_hat,
        method=Estimator.LMMSE,
    )


@dataclass
class _WorkCounter:
    ops: int = 0
    trace: List[Tuple[int, float]] = field(default_factory=list)


def subgroup_estimate(
    Y: Sequence[complex],
    X: Sequence[complex],
    active: Iterable[int],
    epsilon: float,
) -> EstimateResult:
    """Energy-constrained subgroup estimation.

    LS on the pilots, back to taps, then scan divisors d of n in increasing
    order and keep the first annihilator <n/d> holding more than
    (1 - epsilon) of the tap energy. Taps outside it are zeroed.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")

    received, pilots = _check_pair(Y, X)
    n = received.shape[0]
    tones = _active_indices(active, n)

    # LS on active tones
    H_ls = _pilot_division(received, pilots, tones)

    # Back to the tap domain
    h_hat = channel_impulse_response(H_ls)
    work = _WorkCounter(ops=int(round(n * math.log2(n))) if n > 1 else 1)

    # Total energy
    e_total = signal_energy(h_hat)
    work.ops += n
    if e_total == 0.0:
        logger.warning("Subgroup estimate: zero-energy LS estimate, returning zeros")
        return EstimateResult(
            h_hat_time=np.zeros(n, dtype=np.complex128),
            H_hat_freq=np.zeros(n, dtype=np.complex128),
            method=Estimator.SUBGROUP,
            operation_count=work.ops,
        )

    # Divisor scan, smallest d first
    best = n
    threshold = 1.0 - epsilon
    for d in divisors(n):
        on_support = h_hat[:: n // d]
        ratio = signal_energy(on_support) / e_total
        work.ops += d
        work.trace.append((d, ratio))
        if ratio > threshold:
            best = d
            break

    # Keep taps on the selected annihilator
    h_sparse = project(h_hat, subgroup(n, best))
    work.ops += n

    # Frequency response of the sparse taps
    H_hat = channel_freq_response(h_sparse)
    work.ops += int(round(n * math.log2(n))) if n > 1 else 1

    logger.debug(
        f"Subgroup estimate: d={best} after {len(work.trace)} candidates"
    )
    return EstimateResult(
        h_hat_time=h_sparse,
        H_hat_freq=H_hat,
        method=Estimator.SUBGROUP,
        chosen_d=best,
        ratio_trace=tuple(work.trace),
        operation_count=work.ops,
    )


def perfect_estimate(H_true: Sequence[complex]) -> EstimateResult:
    """Genie estimate equal to the true response."""
    H = np.asarray(H_true, dtype=np.complex128).copy()
    return EstimateResult(
        h_hat_time=channel_impulse_response(H), H_hat_freq=H, method=Estimator.PERFECT
    )
