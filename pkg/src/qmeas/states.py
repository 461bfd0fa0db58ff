"""Pure states, density matrices, ensembles, and their conversions.

Constructors reject badly normalized input instead of silently fixing it;
``renormalize`` exists for building fixtures. Amplitude vectors are the
single source of truth for pure states, the density form is computed on
demand and never cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidState,
    NotNormalized,
    ProbabilityMismatch,
)
from .linalg import as_matrix, qubit_count, validate

NORM_TOL = 1e-10


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """Normalized amplitude vector over the computational basis of n qubits."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1).copy()
        if vec.size != 1 << self.n:
            raise DimensionMismatch(f"{vec.size} amplitudes for {self.n} qubits")
        norm2 = float(np.sum(np.abs(vec) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NotNormalized(f"squared norm {norm2!r} deviates from 1 beyond {NORM_TOL:.1e}")
        object.__setattr__(self, "amplitudes", _freeze(vec))

    @property
    def dim(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class DensityState:
    """PSD unit-trace matrix describing a possibly mixed n-qubit state."""

    n: int
    rho: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.rho).copy()
        if m.shape != (1 << self.n, 1 << self.n):
            raise DimensionMismatch(f"{m.shape} density for {self.n} qubits")
        report = validate(m, "density", NORM_TOL)
        if not report.ok:
            raise InvalidState(str(report))
        object.__setattr__(self, "rho", _freeze(m))

    @property
    def dim(self) -> int:
        return 1 << self.n


@dataclass(frozen=True)
class Ensemble:
    """Probabilistic mixture of pure states, probabilities summing to 1."""

    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(p), s) for p, s in self.members)
        if not members:
            raise ProbabilityMismatch("empty ensemble")
        if any(p < -NORM_TOL or p > 1 + NORM_TOL for p, _ in members):
            raise ProbabilityMismatch("probabilities must lie in [0, 1]")
        total = sum(p for p, _ in members)
        if abs(total - 1.0) > NORM_TOL:
            raise ProbabilityMismatch(f"probabilities sum to {total!r}")
        n = members[0][1].n
        if any(s.n != n for _, s in members):
            raise DimensionMismatch("ensemble members act on different registers")
        object.__setattr__(self, "members", members)

    @property
    def n(self) -> int:
        return self.members[0][1].n


# -- constructors -------------------------------------------------------------

def from_amplitudes(amps) -> PureState:
    vec = np.asarray(amps, dtype=complex).reshape(-1)
    return PureState(n=qubit_count(vec.size), amplitudes=vec)


def renormalize(amps) -> PureState:
    """Scale an arbitrary nonzero vector to unit norm."""
    vec = np.asarray(amps, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise NotNormalized("cannot normalize the zero vector")
    return from_amplitudes(vec / norm)


def basis_state(bits: str) -> PureState:
    """Computational basis vector |bits>, qubit 0 leftmost."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"basis label must be a nonempty bit string, got {bits!r}")
    n = len(bits)
    vec = np.zeros(1 << n, dtype=complex)
    vec[int(bits, 2)] = 1.0
    return PureState(n=n, amplitudes=vec)


def bell_state(which: str) -> PureState:
    """One of the four Bell states phi+, phi-, psi+, psi-."""
    s = 1 / math.sqrt(2)
    table = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    if which not in table:
        raise ValueError(f"unknown Bell state {which!r}")
    return from_amplitudes(table[which])


def plus_state() -> PureState:
    return from_amplitudes([1 / math.sqrt(2), 1 / math.sqrt(2)])


def ghz_state(n: int = 3) -> PureState:
    vec = np.zeros(1 << n, dtype=complex)
    vec[0] = vec[-1] = 1 / math.sqrt(2)
    return PureState(n=n, amplitudes=vec)


def maximally_mixed(n: int) -> DensityState:
    d = 1 << n
    return DensityState(n=n, rho=np.eye(d, dtype=complex) / d)


# -- conversions and metrics --------------------------------------------------

def to_density(psi: PureState) -> DensityState:
    """Rank-1 density |psi><psi|."""
    vec = psi.amplitudes
    return DensityState(n=psi.n, rho=np.outer(vec, vec.conj()))


def ensemble_to_density(e: Ensemble) -> DensityState:
    """Weighted sum of member outer products."""
    d = 1 << e.n
    rho = np.zeros((d, d), dtype=complex)
    for p, s in e.members:
        rho += p * np.outer(s.amplitudes, s.amplitudes.conj())
    return DensityState(n=e.n, rho=rho)


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2; equals 1 exactly when the states agree up to global phase."""
    if a.n != b.n:
        raise DimensionMismatch(f"states on {a.n} and {b.n} qubits")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def purity(rho: DensityState) -> float:
    """tr(rho^2), between 2^-n (maximally mixed) and 1 (pure)."""
    return float(np.trace(rho.rho @ rho.rho).real)
