"""Tests for block transforms, prefix handling and convolution."""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from src.core.exceptions import SignalShapeError
from src.core.transform import (
    add_cp,
    channel_freq_response,
    channel_impulse_response,
    circular_convolve,
    circular_convolve_direct,
    dft_direct,
    dft_unitary,
    idft_unitary,
    remove_cp,
    transmit_cp,
)


def _noise(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


class TestUnitaryPair:
    def test_dc_bin(self):
        """A DC bin maps to a constant 1/sqrt(n)."""
        bins = np.zeros(16, dtype=complex)
        bins[0] = 1.0
        assert_allclose(idft_unitary(bins), np.full(16, 0.25), atol=1e-15)

    def test_all_ones(self):
        """All-ones bins collapse to sqrt(n) at index 0."""
        expected = np.zeros(16, dtype=complex)
        expected[0] = 4.0
        assert_allclose(idft_unitary(np.ones(16)), expected, atol=1e-14)

    def test_shift(self):
        """delta_1 maps to a linear phase ramp."""
        n = 12
        delta = np.zeros(n, dtype=complex)
        delta[1] = 1.0
        k = np.arange(n)
        assert_allclose(
            dft_unitary(delta), np.exp(-2j * np.pi * k / n) / np.sqrt(n), atol=1e-15
        )

    @pytest.mark.parametrize("n", [8, 12, 64, 256])
    def test_parseval(self, rng, n):
        """Norms are preserved both ways."""
        x = _noise(rng, n)
        assert abs(np.linalg.norm(dft_unitary(x)) - np.linalg.norm(x)) < 1e-12
        assert abs(np.linalg.norm(idft_unitary(x)) - np.linalg.norm(x)) < 1e-12

    @pytest.mark.parametrize("n", [8, 12, 64, 256, 4096])
    def test_round_trip(self, rng, n):
        """dft(idft(f)) = f."""
        f = _noise(rng, n) / np.sqrt(2 * n)
        assert np.max(np.abs(dft_unitary(idft_unitary(f)) - f)) <= 1e-12

    @pytest.mark.parametrize("n", [8, 12, 64])
    def test_matches_direct(self, rng, n):
        """The fast path agrees with the O(n^2) reference."""
        x = _noise(rng, n)
        assert_allclose(dft_unitary(x), dft_direct(x), atol=1e-12)
        assert_allclose(idft_unitary(x), dft_direct(x, inverse=True), atol=1e-12)

    def test_rejects_matrices(self):
        """Blocks are one-dimensional."""
        with pytest.raises(SignalShapeError):
            dft_unitary(np.ones((4, 4)))


class TestChannelResponse:
    def test_flat(self):
        """delta_0 is a flat channel."""
        h = np.zeros(8, dtype=complex)
        h[0] = 1.0
        assert_allclose(channel_freq_response(h), np.ones(8), atol=1e-15)

    def test_half_period(self):
        """delta_{n/2} alternates sign across tones."""
        h = np.zeros(8, dtype=complex)
        h[4] = 1.0
        assert_allclose(channel_freq_response(h), (-1.0) ** np.arange(8), atol=1e-14)

    def test_structured_support_is_periodic(self, rng):
        """Taps on <n/d> give a response with period d."""
        h = np.zeros(12, dtype=complex)
        h[[0, 4, 8]] = _noise(rng, 3)
        H = channel_freq_response(h)
        assert_allclose(np.roll(H, -3), H, atol=1e-12)

    def test_impulse_response_inverts(self, rng):
        """channel_impulse_response is the exact inverse."""
        h = _noise(rng, 64)
        assert_allclose(channel_impulse_response(channel_freq_response(h)), h, atol=1e-12)


class TestCyclicPrefix:
    def test_definition(self):
        """[a, b, c, d] with two prefix samples."""
        block = np.array([1, 2, 3, 4], dtype=complex)
        assert_array_equal(add_cp(block, 2), [3, 4, 1, 2, 3, 4])

    def test_zero_prefix(self):
        """n_cp = 0 is the identity."""
        block = np.array([1, 2, 3, 4], dtype=complex)
        assert_array_equal(add_cp(block, 0), block)

    def test_remove_inverts_add(self, rng):
        """Stripping the prefix restores the block exactly."""
        block = _noise(rng, 32)
        assert_array_equal(remove_cp(add_cp(block, 8), 8, 32), block)

    def test_prefix_longer_than_block(self):
        """n_cp > n is rejected."""
        with pytest.raises(SignalShapeError):
            add_cp(np.ones(4), 5)


class TestConvolution:
    def test_identity_tap(self, rng):
        """delta_0 leaves x unchanged."""
        x = _noise(rng, 16)
        h = np.zeros(16, dtype=complex)
        h[0] = 1.0
        assert_allclose(circular_convolve(x, h), x, atol=1e-14)

    def test_unit_delay(self, rng):
        """delta_1 shifts x cyclically by one."""
        x = _noise(rng, 16)
        assert_allclose(circular_convolve(x, [0, 1]), np.roll(x, 1), atol=1e-14)

    def test_matches_direct(self, rng):
        """FFT path agrees with explicit index arithmetic."""
        x, h = _noise(rng, 32), _noise(rng, 7)
        assert_allclose(circular_convolve(x, h), circular_convolve_direct(x, h), atol=1e-12)

    def test_convolution_theorem(self, rng):
        """dft(x * h) = H . dft(x) with the mixed conventions."""
        x, h = _noise(rng, 64), _noise(rng, 64)
        lhs = dft_unitary(circular_convolve(x, h))
        rhs = channel_freq_response(h) * dft_unitary(x)
        assert np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs) < 1e-10

    def test_taps_longer_than_block(self):
        """The tap vector must fit in the block."""
        with pytest.raises(SignalShapeError):
            circular_convolve(np.ones(4), np.ones(5))

    def test_prefix_path_matches_circular(self, rng):
        """With the tap span inside the prefix, both pipelines agree."""
        x = _noise(rng, 64)
        h = np.zeros(64, dtype=complex)
        h[:5] = _noise(rng, 5)
        cp_path = transmit_cp(x, h, 8)
        reference = circular_convolve(x, h)
        assert np.linalg.norm(cp_path - reference) / np.linalg.norm(reference) < 1e-10

    def test_short_prefix_diverges(self, rng):
        """A prefix shorter than the tap span leaves measurable ISI."""
        x = _noise(rng, 64)
        h = np.zeros(64, dtype=complex)
        h[:10] = _noise(rng, 10)
        cp_path = transmit_cp(x, h, 2)
        reference = circular_convolve(x, h)
        assert np.linalg.norm(cp_path - reference) / np.linalg.norm(reference) > 1e-3
