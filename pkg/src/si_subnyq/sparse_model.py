"""Sparse signal model: only k of m generator channels carry energy.

Channel indices are 0-based throughout the library.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .si_core import TWO_PI, CoefficientBank, GeneratorSet

AMPLITUDE_DISTRIBUTIONS = ("complex_normal", "real_normal", "bernoulli")


@dataclass(frozen=True)
class SparsityProfile:
    """Which k of the m channels are active."""

    m: int
    k: int
    support: frozenset[int]

    def __post_init__(self):
        support = frozenset(int(i) for i in self.support)
        if self.k > self.m:
            raise InvalidInputError(f"k={self.k} exceeds m={self.m}")
        if len(support) != self.k:
            raise InvalidInputError(
                f"support {sorted(support)} has {len(support)} entries, expected k={self.k}")
        if any(i < 0 or i >= self.m for i in support):
            raise InvalidInputError(f"support {sorted(support)} out of range 0..{self.m - 1}")
        object.__setattr__(self, "support", support)


@dataclass(frozen=True)
class SparseSISignal:
    """A sparse shift-invariant signal: profile + coefficients + generators."""

    profile: SparsityProfile
    coefficients: CoefficientBank
    generators: GeneratorSet

    def __post_init__(self):
        if self.coefficients.support != self.profile.support:
            raise InvalidInputError("coefficient support does not match the sparsity profile")
        if self.coefficients.m != self.generators.m:
            raise InvalidInputError(
                f"coefficient bank has {self.coefficients.m} channels, "
                f"generator set has {self.generators.m}")


def _draw(rng: np.random.Generator, dist: str, n: int) -> np.ndarray:
    if dist == "complex_normal":
        return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    if dist == "real_normal":
        return rng.standard_normal(n).astype(np.complex128)
    if dist == "bernoulli":
        return rng.choice([-1.0, 1.0], size=n).astype(np.complex128)
    raise InvalidInputError(
        f"unknown amplitude distribution {dist!r}; choose from {AMPLITUDE_DISTRIBUTIONS}")


def synthesize(profile: SparsityProfile, n_samples: int,
               seed: int | np.random.Generator,
               dist: str = "complex_normal") -> CoefficientBank:
    """Seeded random coefficient bank honoring the sparsity profile.

    Active channels get i.i.d. values from ``dist`` (default unit-variance
    complex normal); inactive channels are exactly zero. Each active channel
    is redrawn if it comes out identically zero, so the empirical support
    always equals the profile support.
    """
    if n_samples < 1:
        raise InvalidInputError(f"n_samples must be >= 1, got {n_samples}")
    rng = np.random.default_rng(seed)
    sequences = np.zeros((profile.m, n_samples), dtype=np.complex128)
    for channel in sorted(profile.support):
        for _ in range(100):
            values = _draw(rng, dist, n_samples)
            if np.any(values != 0):
                break
        else:
            raise InvalidInputError(f"distribution {dist!r} keeps drawing all-zero channels")
        sequences[channel] = values
    return CoefficientBank(sequences, profile.support)


def _dtft(sequence: np.ndarray, theta: float) -> complex:
    n = np.arange(sequence.shape[0])
    return complex(np.sum(sequence * np.exp(-1j * theta * n)))


def signal_spectrum(signal: SparseSISignal, omega: float) -> complex:
    """Evaluate X(omega) = sum_l D_l(e^{j*omega*T}) A_l(omega).

    D_l is the finite N-term transform of channel l, evaluable at any omega.
    The generator factor is known on the declared frequency lattice: inside a
    declared alias cell, omega must land on a lattice point; outside every
    declared cell the generator spectra are exactly zero, so the value is 0.
    Channels whose sequences are identically zero never contribute.
    """
    gens = signal.generators
    grid_n = gens.grid.n
    theta = omega * gens.period
    spacing = TWO_PI / grid_n
    # locate omega on the (q, j) lattice: omega*T = w_q - 2*pi*j, w_q in [0, 2*pi)
    cell = int(np.ceil(-theta / TWO_PI - 1e-12))  # alias cell index containing omega
    in_union = cell in gens.alias_support
    q = int(np.round((theta + TWO_PI * cell) / spacing))
    on_lattice = 0 <= q < grid_n and abs(theta - (q * spacing - TWO_PI * cell)) <= 1e-9 * spacing

    total = 0.0 + 0.0j
    for channel in range(gens.m):
        seq = signal.coefficients.sequences[channel]
        if not np.any(seq != 0):
            continue
        if not in_union:
            continue  # generator spectrum is exactly zero outside the declared cells
        if not on_lattice:
            raise InvalidInputError(
                f"omega={omega} lies inside a declared alias cell but not on the "
                f"frequency lattice (resolution {spacing / gens.period:.3e})")
        a_val = gens.spectra[channel, q, gens.alias_support.index(cell)]
        total += _dtft(seq, theta) * a_val
    return total
