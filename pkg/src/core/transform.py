"""
Block transforms for the OFDM modem.

Two normalisations:
  - signals (transmit/receive blocks) use the unitary pair, 1/sqrt(n) both ways;
  - the channel response follows H[k] = sum_m h[m] exp(-j 2 pi k m / n) with no
    scaling, so that Y = H * X + W holds for unit-power constellations.

The fast path is numpy's mixed-radix FFT; ``dft_direct`` is the O(n^2)
reference used by the tests.
"""

from typing import Optional, Sequence

import numpy as np

from src.core.exceptions import SignalShapeError


def _block(values: Sequence[complex], n: Optional[int] = None) -> np.ndarray:
    block = np.asarray(values, dtype=np.complex128)
    if block.ndim != 1:
        raise SignalShapeError(f"Expected a 1-D block, got shape {block.shape}")
    if n is not None and block.shape[0] != n:
        raise SignalShapeError(
            f"Expected block length {n}, got {block.shape[0]}",
            expected=n,
            actual=int(block.shape[0]),
        )
    return block


def idft_unitary(bins: Sequence[complex]) -> np.ndarray:
    """Frequency block -> time block, x[m] = n^-1/2 sum_k X[k] e^{+j2pi km/n}."""
    return np.fft.ifft(_block(bins), norm="ortho")


def dft_unitary(samples: Sequence[complex]) -> np.ndarray:
    """Time block -> frequency block, inverse of ``idft_unitary``."""
    return np.fft.fft(_block(samples), norm="ortho")


def dft_direct(values: Sequence[complex], inverse: bool = False) -> np.ndarray:
    """Unitary DFT by explicit matrix product (reference implementation)."""
    block = _block(values)
    n = block.shape[0]
    sign = 1.0 if inverse else -1.0
    k = np.arange(n)
    kernel = np.exp(sign * 2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)
    return kernel @ block


def channel_freq_response(h_taps: Sequence[complex]) -> np.ndarray:
    """H[k] = sum_m h[m] e^{-j2pi km/n} over the zero-padded tap vector."""
    return np.fft.fft(_block(h_taps))


def channel_impulse_response(freq: Sequence[complex]) -> np.ndarray:
    """Exact inverse of ``channel_freq_response`` (tap-scale inverse DFT)."""
    return np.fft.ifft(_block(freq))


def add_cp(samples: Sequence[complex], n_cp: int) -> np.ndarray:
    """Prepend the last n_cp samples of the block."""
    block = _block(samples)
    if n_cp < 0 or n_cp > block.shape[0]:
        raise SignalShapeError(
            f"Cyclic prefix of {n_cp} samples invalid for block of {block.shape[0]}",
            expected=block.shape[0],
            actual=n_cp,
        )
    if n_cp == 0:
        return block.copy()
    return np.concatenate([block[-n_cp:], block])


def remove_cp(samples: Sequence[complex], n_cp: int, n: int) -> np.ndarray:
    """Drop the first n_cp samples and keep the next n."""
    block = _block(samples)
    if n_cp < 0 or n_cp > n or block.shape[0] < n_cp + n:
        raise SignalShapeError(
            f"Cannot strip a {n_cp}-sample prefix from {block.shape[0]} samples",
            expected=n_cp + n,
            actual=int(block.shape[0]),
        )
    return block[n_cp : n_cp + n].copy()


def circular_convolve(samples: Sequence[complex], h_taps: Sequence[complex]) -> np.ndarray:
    """y[m] = sum_l h[l] x[(m - l) mod n]."""
    block = _block(samples)
    n = block.shape[0]
    taps = _block(h_taps)
    if taps.shape[0] > n:
        raise SignalShapeError(
            f"Tap vector of length {taps.shape[0]} longer than block {n}",
            expected=n,
            actual=int(taps.shape[0]),
        )
    padded = np.zeros(n, dtype=np.complex128)
    padded[: taps.shape[0]] = taps
    return np.fft.ifft(np.fft.fft(block) * np.fft.fft(padded))


def circular_convolve_direct(
    samples: Sequence[complex], h_taps: Sequence[complex]
) -> np.ndarray:
    """Reference circular convolution by explicit index arithmetic."""
    block = _block(samples)
    n = block.shape[0]
    taps = _block(h_taps)
    if taps.shape[0] > n:
        raise SignalShapeError("Tap vector longer than block", expected=n)
    out = np.zeros(n, dtype=np.complex128)
    for lag, tap in enumerate(taps):
        if tap != 0:
            out += tap * np.roll(block, lag)
    return out


def transmit_cp(samples: Sequence[complex], h_taps: Sequence[complex], n_cp: int) -> np.ndarray:
    """Add CP, apply the linear channel, strip the CP.

    Equals ``circular_convolve`` whenever the tap span fits in the prefix.
    """
    block = _block(samples)
    n = block.shape[0]
    taps = np.trim_zeros(_block(h_taps), trim="b")
    if taps.size == 0:
        return np.zeros(n, dtype=np.complex128)
    received = np.convolve(add_cp(block, n_cp), taps)
    return remove_cp(received, n_cp, n)
