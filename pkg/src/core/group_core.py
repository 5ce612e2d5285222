"""
Cyclic subgroup algebra over Z_N.

Subcarrier indices form the additive group Z_n. Every subgroup is cyclic,
H = <d> = {0, d, 2d, ...} for a divisor d of n, and its annihilator (the
characters trivial on H, indexed by frequency bins) is H_perp = <n/d>. The
annihilator is the admissible time-domain support of a channel whose
spectrum is structured by H.

Set-valued results are exact integer tuples; only the projector and the
energy quantities touch floating point.
"""

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from src.core.exceptions import (
    DegenerateSignalError,
    InvalidGeneratorError,
    SignalShapeError,
)


@dataclass(frozen=True)
class SubgroupSpec:
    """A subgroup H = <d> of Z_n together with its annihilator <n/d>."""

    n: int
    d: int
    elements_h: Tuple[int, ...]
    elements_h_perp: Tuple[int, ...]

    @property
    def perp_step(self) -> int:
        """Spacing n/d between consecutive annihilator residues."""
        return self.n // self.d

    @property
    def order(self) -> int:
        """|H| = n/d."""
        return len(self.elements_h)

    @property
    def perp_order(self) -> int:
        """|H_perp| = d."""
        return len(self.elements_h_perp)


@dataclass(frozen=True)
class EnergyProfile:
    """Energy ratio R_d of a tap vector for every divisor d of n."""

    divisors: Tuple[int, ...]
    ratios: Tuple[float, ...]
    e_total: float

    def ratio_for(self, d: int) -> float:
        """R_d for a divisor d present in the profile."""
        return self.ratios[self.divisors.index(d)]


def divisors(n: int) -> List[int]:
    """All positive divisors of n in increasing order."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")

    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k != n // k:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def divisor_count(n: int) -> int:
    """tau(n), the number of candidate subgroups of Z_n."""
    return len(divisors(n))


def subgroup(n: int, d: int) -> SubgroupSpec:
    """Build <d> and its annihilator <n/d> inside Z_n."""
    if n < 1 or d < 1 or n % d != 0:
        raise InvalidGeneratorError(n, d)

    step = n // d
    return SubgroupSpec(
        n=n,
        d=d,
        elements_h=tuple(k * d % n for k in range(step)),
        elements_h_perp=tuple(k * step % n for k in range(d)),
    )


def subgroup_lattice(n: int) -> List[SubgroupSpec]:
    """Every subgroup of Z_n, ordered by generator d."""
    return [subgroup(n, d) for d in divisors(n)]


def is_subgroup_closed(elements: Iterable[int], n: int) -> bool:
    """True when ``elements`` contains 0 and is closed under addition mod n."""
    members = set(elements)
    if 0 not in members:
        return False
    return all((a + b) % n in members for a in members for b in members)


def annihilator_of(elements: Iterable[int], n: int) -> Tuple[int, ...]:
    """Exhaustive index-form annihilator {k : k*h = 0 mod n for all h}."""
    members = tuple(elements)
    return tuple(k for k in range(n) if all(k * h % n == 0 for h in members))


def annihilator_bruteforce(spec: SubgroupSpec) -> Tuple[int, ...]:
    """Integer oracle for ``spec.elements_h_perp``."""
    return annihilator_of(spec.elements_h, spec.n)


def bidual_holds(spec: SubgroupSpec) -> bool:
    """Check (H_perp)_perp == H by the exhaustive oracle."""
    return annihilator_of(annihilator_bruteforce(spec), spec.n) == spec.elements_h


def _as_vector(h: Sequence[complex], n: int) -> np.ndarray:
    vector = np.asarray(h, dtype=np.complex128)
    if vector.ndim != 1 or vector.shape[0] != n:
        raise SignalShapeError(
            f"Expected a length-{n} vector, got shape {vector.shape}",
            expected=n,
            actual=int(vector.size),
        )
    return vector


def signal_energy(values: np.ndarray) -> float:
    """Sum of squared magnitudes."""
    return float(np.sum(values.real**2 + values.imag**2))


def project(h: Sequence[complex], spec: SubgroupSpec) -> np.ndarray:
    """Orthogonal projection of h onto vectors supported on H_perp."""
    vector = _as_vector(h, spec.n)
    projected = np.zeros_like(vector)
    projected[:: spec.perp_step] = vector[:: spec.perp_step]
    return projected


def energy_ratio(h: Sequence[complex], spec: SubgroupSpec) -> float:
    """Fraction of the energy of h lying on H_perp."""
    vector = _as_vector(h, spec.n)
    e_total = signal_energy(vector)
    if e_total == 0.0:
        raise DegenerateSignalError(
            "Energy ratio undefined for an all-zero vector", details={"n": spec.n}
        )
    return min(1.0, signal_energy(vector[:: spec.perp_step]) / e_total)


def relative_projection_error(h: Sequence[complex], spec: SubgroupSpec) -> float:
    """||h - P h||^2 / ||h||^2, the complement of the energy ratio."""
    vector = _as_vector(h, spec.n)
    e_total = signal_energy(vector)
    if e_total == 0.0:
        raise DegenerateSignalError("Relative error undefined for a zero vector")
    return signal_energy(vector - project(vector, spec)) / e_total


def epsilon_bound_holds(h: Sequence[complex], spec: SubgroupSpec, epsilon: float) -> bool:
    """Relative projection error is within epsilon."""
    return relative_projection_error(h, spec) <= epsilon


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def minimal_subgroup(h: Sequence[complex], epsilon: float) -> SubgroupSpec:
    """Smallest d whose annihilator keeps at least (1 - epsilon) of the energy."""
    _check_epsilon(epsilon)
    vector = np.asarray(h, dtype=np.complex128)
    n = int(vector.size)

    for d in divisors(n):
        spec = subgroup(n, d)
        if energy_ratio(vector, spec) >= 1.0 - epsilon:
            return spec

    # d = n always passes for nonzero input
    return subgroup(n, n)


def energy_profile(h: Sequence[complex]) -> EnergyProfile:
    """R_d for all divisors of len(h)."""
    vector = np.asarray(h, dtype=np.complex128)
    n = int(vector.size)
    all_divisors = divisors(n)
    ratios = tuple(energy_ratio(vector, subgroup(n, d)) for d in all_divisors)
    return EnergyProfile(
        divisors=tuple(all_divisors), ratios=ratios, e_total=signal_energy(vector)
    )
