"""Projective measurements, observables, and POVMs.

Measurement objects validate their defining constraints on construction:
projectors must be idempotent, mutually orthogonal, and resolve the
identity; POVM effects must be PSD and sum to the identity. Probabilities
and post-states follow the generalized Born rule; conditioning below the
1e-12 probability floor raises instead of dividing by noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import draw_outcome
from .errors import (
    BadPartition,
    BadSplit,
    DimensionMismatch,
    IdenticalStates,
    InvalidMeasurement,
    NotOrthonormal,
    NotUnitary,
    ZeroProbabilityOutcome,
)
from .linalg import (
    apply_to_vector,
    as_matrix,
    dilation_blocks,
    eig_hermitian,
    group_eigenvalues,
    pauli_decompose,
    pauli_string_matrix,
    qubit_count,
    require_square,
    sqrt_psd,
    validate,
)
from .states import DensityState, PureState

STRUCT_TOL = 1e-10
ZERO_PROB_TOL = 1e-12
LOCALITY_RTOL = 1e-8


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectiveMeasurement:
    """Labeled orthogonal projectors resolving the identity on n qubits."""

    n: int
    outcomes: tuple[tuple[int, np.ndarray], ...]

    def __post_init__(self):
        d = 1 << self.n
        outs = tuple((int(y), as_matrix(p).copy()) for y, p in self.outcomes)
        if not outs:
            raise InvalidMeasurement("measurement needs at least one outcome")
        if len({y for y, _ in outs}) != len(outs):
            raise InvalidMeasurement("duplicate outcome labels")
        total = np.zeros((d, d), dtype=complex)
        for y, p in outs:
            if p.shape != (d, d):
                raise DimensionMismatch(f"projector for outcome {y} has shape {p.shape}")
            report = validate(p, "projector", STRUCT_TOL)
            if not report.ok:
                raise InvalidMeasurement(f"outcome {y}: {report}")
            total += p
        for i in range(len(outs)):
            for j in range(i + 1, len(outs)):
                dev = float(np.max(np.abs(outs[i][1] @ outs[j][1])))
                if dev > STRUCT_TOL:
                    raise InvalidMeasurement(
                        f"projectors {outs[i][0]} and {outs[j][0]} overlap by {dev:.3e}")
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > STRUCT_TOL:
            raise InvalidMeasurement(f"resolution of identity off by {dev:.3e}")
        for _, p in outs:
            p.setflags(write=False)
        object.__setattr__(self, "outcomes", outs)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(y for y, _ in self.outcomes)

    def projector(self, y: int) -> np.ndarray:
        for label, p in self.outcomes:
            if label == y:
                return p
        raise KeyError(f"no outcome labeled {y}")


@dataclass(frozen=True)
class Povm:
    """Labeled PSD effects summing to the identity on n qubits."""

    n: int
    effects: tuple[tuple[int, np.ndarray], ...]

    def __post_init__(self):
        d = 1 << self.n
        effs = tuple((int(y), as_matrix(m).copy()) for y, m in self.effects)
        if not effs:
            raise InvalidMeasurement("POVM needs at least one effect")
        if len({y for y, _ in effs}) != len(effs):
            raise InvalidMeasurement("duplicate outcome labels")
        total = np.zeros((d, d), dtype=complex)
        for y, m in effs:
            if m.shape != (d, d):
                raise DimensionMismatch(f"effect for outcome {y} has shape {m.shape}")
            report = validate(m, "psd", STRUCT_TOL)
            if not report.ok:
                raise InvalidMeasurement(f"effect {y}: {report}")
            total += m
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > STRUCT_TOL:
            raise InvalidMeasurement(f"effects sum off identity by {dev:.3e}")
        for _, m in effs:
            m.setflags(write=False)
        object.__setattr__(self, "effects", effs)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(y for y, _ in self.effects)

    def effect(self, y: int) -> np.ndarray:
        for label, m in self.effects:
            if label == y:
                return m
        raise KeyError(f"no outcome labeled {y}")


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix with its outcome values and eigenspace projectors."""

    n: int
    matrix: np.ndarray
    spectral: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        m = as_matrix(self.matrix).copy()
        pairs = tuple((float(v), as_matrix(p).copy()) for v, p in self.spectral)
        # distinctness after grouping, and a consistent reconstruction
        values = [v for v, _ in pairs]
        if len(values) != len(set(values)):
            raise InvalidMeasurement("repeated outcome values")
        rebuilt = sum(v * p for v, p in pairs)
        if float(np.max(np.abs(rebuilt - m))) > 1e-8:
            raise InvalidMeasurement("spectral pairs do not reconstruct the matrix")
        self._measurement_check(pairs)
        m.setflags(write=False)
        for _, p in pairs:
            p.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "spectral", pairs)

    def _measurement_check(self, pairs):
        ProjectiveMeasurement(
            n=self.n, outcomes=tuple((y, p) for y, (_, p) in enumerate(pairs)))

    @property
    def measurement(self) -> ProjectiveMeasurement:
        """The underlying projective measurement, labels in spectral order."""
        return ProjectiveMeasurement(
            n=self.n, outcomes=tuple((y, p) for y, (_, p) in enumerate(self.spectral)))

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.spectral)


@dataclass(frozen=True)
class PauliString:
    """Factors over {I,X,Y,Z} encoded as digits 0..3, qubit 0 first."""

    s: tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(c) for c in self.s)
        if not digits or any(c not in (0, 1, 2, 3) for c in digits):
            raise ValueError(f"Pauli digits must be in 0..3, got {self.s!r}")
        object.__setattr__(self, "s", digits)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        lookup = {"I": 0, "X": 1, "Y": 2, "Z": 3}
        try:
            return cls(tuple(lookup[c] for c in label.upper()))
        except KeyError as exc:
            raise ValueError(f"bad Pauli label {label!r}") from exc

    @property
    def n(self) -> int:
        return len(self.s)

    def matrix(self) -> np.ndarray:
        return pauli_string_matrix("".join(str(c) for c in self.s))


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _check_orthonormal(vectors: np.ndarray, tol: float = STRUCT_TOL):
    gram = vectors.conj() @ vectors.T
    dev = float(np.max(np.abs(gram - np.eye(vectors.shape[0]))))
    if dev > tol:
        raise NotOrthonormal(f"Gram matrix off identity by {dev:.3e}")


def projector_from_vectors(vs) -> np.ndarray:
    """Projector onto the span of pairwise orthonormal vectors."""
    vecs = np.asarray([np.asarray(v, dtype=complex).reshape(-1) for v in vs])
    _check_orthonormal(vecs)
    return vecs.T @ vecs.conj()


def measurement_from_partition(basis, partition) -> ProjectiveMeasurement:
    """Group an orthonormal basis into projectors, one per index subset.

    Outcome y is the position of its subset in the declared partition.
    All-singleton partitions recover the von Neumann measurement.
    """
    vecs = np.asarray([np.asarray(v, dtype=complex).reshape(-1) for v in basis])
    count = vecs.shape[0]
    n = qubit_count(count)
    if vecs.shape != (count, count):
        raise DimensionMismatch("basis vectors have the wrong length")
    _check_orthonormal(vecs)
    subsets = [sorted(int(i) for i in xs) for xs in partition]
    seen: set[int] = set()
    for xs in subsets:
        if not xs:
            raise BadPartition("empty subset")
        for i in xs:
            if i < 0 or i >= count or i in seen:
                raise BadPartition(f"index {i} repeated or out of range")
            seen.add(i)
    if len(seen) != count:
        raise BadPartition("partition does not cover every index")
    outcomes = []
    for y, xs in enumerate(subsets):
        chosen = vecs[xs]
        outcomes.append((y, chosen.T @ chosen.conj()))
    return ProjectiveMeasurement(n=n, outcomes=tuple(outcomes))


def parity_measurement(n: int) -> ProjectiveMeasurement:
    """Two-outcome measurement splitting even from odd Hamming weight.

    Outcome 0 spans basis states whose label has an even number of ones;
    for n=2 these are exactly the projectors onto {|00>,|11>} and
    {|01>,|10>}.
    """
    if n < 1:
        raise DimensionMismatch("parity needs at least one qubit")
    d = 1 << n
    weights = np.array([bin(i).count("1") & 1 for i in range(d)])
    even = np.diag((weights == 0).astype(complex))
    odd = np.diag((weights == 1).astype(complex))
    return ProjectiveMeasurement(n=n, outcomes=((0, even), (1, odd)))


# ---------------------------------------------------------------------------
# Born rule, post-states, sampling
# ---------------------------------------------------------------------------

def _check_dims(n: int, rho: DensityState):
    if rho.n != n:
        raise DimensionMismatch(f"measurement on {n} qubits, state on {rho.n}")


def born_probabilities(m: ProjectiveMeasurement, rho: DensityState) -> np.ndarray:
    """tr(Pi_y rho) for each outcome, in label declaration order."""
    _check_dims(m.n, rho)
    probs = np.array([np.trace(p @ rho.rho).real for _, p in m.outcomes])
    return np.clip(probs, 0.0, None)


def post_state(m: ProjectiveMeasurement, y: int, rho: DensityState) -> DensityState:
    """Incomplete collapse Pi rho Pi / tr(Pi rho) on observing y."""
    _check_dims(m.n, rho)
    p = m.projector(y)
    prob = float(np.trace(p @ rho.rho).real)
    if prob <= ZERO_PROB_TOL:
        raise ZeroProbabilityOutcome(f"outcome {y} has probability {prob:.3e}")
    return DensityState(n=m.n, rho=(p @ rho.rho @ p) / prob)


def sample(m: ProjectiveMeasurement, rho: DensityState, rng) -> tuple[int, DensityState]:
    """Draw an outcome by inverse CDF and return it with the collapsed state."""
    probs = born_probabilities(m, rho)
    label = m.outcomes[draw_outcome(probs, rng)][0]
    return label, post_state(m, label, rho)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def observable_from_hermitian(h, tol: float = STRUCT_TOL) -> Observable:
    """Spectral outcomes of a Hermitian matrix, degenerate eigenvalues grouped."""
    m = as_matrix(h)
    d = require_square(m)
    n = qubit_count(d)
    dec = eig_hermitian(m, tol=tol)
    scale = float(np.max(np.abs(m))) if d else 0.0
    pairs = []
    for group in group_eigenvalues(dec.values, scale):
        vecs = dec.vectors[:, group]
        value = float(np.mean(dec.values[group]))
        pairs.append((value, vecs @ vecs.conj().T))
    return Observable(n=n, matrix=m, spectral=tuple(pairs))


def expectation(o: Observable, rho: DensityState) -> float:
    """tr(O rho)."""
    _check_dims(o.n, rho)
    return float(np.trace(o.matrix @ rho.rho).real)


def expectation_via_pauli(o: Observable, rho: DensityState) -> float:
    """Expectation as the coefficient-weighted sum of Pauli-string expectations."""
    _check_dims(o.n, rho)
    pc = pauli_decompose(o.matrix)
    total = 0.0 + 0.0j
    for s, a in pc.coeffs.items():
        if a != 0:
            total += a * np.trace(pauli_string_matrix(s) @ rho.rho)
    return float(total.real)


#: +1/-1 eigenvectors of the non-identity Paulis, columns (v_plus, v_minus).
_PAULI_EIGVECS = {
    1: np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    2: np.array([[1, 1], [1j, -1j]], dtype=complex) / math.sqrt(2),
    3: np.array([[1, 0], [0, 1]], dtype=complex),
}


def sample_pauli_local(p: PauliString, psi: PureState, rng) -> int:
    """Measure each non-identity factor locally and multiply the +/-1 results.

    Factors are measured left to right (qubit 0 first) on the evolving
    state; identity factors contribute +1. The product has the same
    distribution as a joint measurement of the full string.
    """
    if p.n != psi.n:
        raise DimensionMismatch(f"string on {p.n} qubits, state on {psi.n}")
    vec = psi.amplitudes.copy()
    product = 1
    for k, digit in enumerate(p.s):
        if digit == 0:
            continue
        basis = _PAULI_EIGVECS[digit]
        v_plus = basis[:, 0]
        proj = np.outer(v_plus, v_plus.conj())
        plus_branch = apply_to_vector(proj, vec, [k], psi.n)
        p_plus = float(np.sum(np.abs(plus_branch) ** 2))
        if rng.random() < p_plus:
            vec = plus_branch / math.sqrt(p_plus)
        else:
            minus_branch = vec - plus_branch
            vec = minus_branch / np.linalg.norm(minus_branch)
            product = -product
    return product


def _obs_matrix(o) -> np.ndarray:
    return o.matrix if isinstance(o, Observable) else as_matrix(o)


def compatible(o1, o2, tol: float = STRUCT_TOL) -> bool:
    """True when the observables commute and hence share an eigenbasis."""
    a, b = _obs_matrix(o1), _obs_matrix(o2)
    if a.shape != b.shape:
        raise DimensionMismatch(f"observables of shape {a.shape} and {b.shape}")
    return float(np.max(np.abs(a @ b - b @ a))) <= tol


def is_local(m: ProjectiveMeasurement, split: tuple[int, int]) -> bool:
    """True when every projector factors across the bipartition.

    Each projector is reshaped to a dA^2 x dB^2 matrix whose rank is 1
    exactly when the projector is a Kronecker product; rank is tested on
    singular values with a 1e-8 relative threshold.
    """
    da, db = split
    if da * db != 1 << m.n or da < 1 or db < 1:
        raise BadSplit(f"split {da}x{db} does not match {1 << m.n}")
    for _, p in m.outcomes:
        r = p.reshape(da, db, da, db).transpose(0, 2, 1, 3).reshape(da * da, db * db)
        gram = r @ r.conj().T
        sv = np.sqrt(np.clip(eig_hermitian(gram, tol=np.inf).values, 0.0, None))
        if sv[0] <= 0.0:
            continue
        if sv.size > 1 and sv[1] >= LOCALITY_RTOL * sv[0]:
            return False
    return True


# ---------------------------------------------------------------------------
# POVMs
# ---------------------------------------------------------------------------

def as_povm(m: ProjectiveMeasurement) -> Povm:
    """View a projective measurement as the POVM with effects Pi_y."""
    return Povm(n=m.n, effects=m.outcomes)


def povm_probabilities(p: Povm, rho: DensityState) -> np.ndarray:
    """tr(M_y rho) for each effect, in label declaration order."""
    _check_dims(p.n, rho)
    probs = np.array([np.trace(m @ rho.rho).real for _, m in p.effects])
    return np.clip(probs, 0.0, None)


def povm_post_state(p: Povm, y: int, rho: DensityState) -> DensityState:
    """Square-root convention post-state M^1/2 rho M^1/2 / tr(M rho)."""
    _check_dims(p.n, rho)
    m = p.effect(y)
    prob = float(np.trace(m @ rho.rho).real)
    if prob <= ZERO_PROB_TOL:
        raise ZeroProbabilityOutcome(f"outcome {y} has probability {prob:.3e}")
    root = sqrt_psd(m, tol=STRUCT_TOL)
    return DensityState(n=p.n, rho=(root @ rho.rho @ root) / prob)


def povm_sample(p: Povm, rho: DensityState, rng) -> tuple[int, DensityState]:
    """Inverse-CDF draw paired with the square-root post-state."""
    probs = povm_probabilities(p, rho)
    label = p.effects[draw_outcome(probs, rng)][0]
    return label, povm_post_state(p, label, rho)


def povm_from_dilation(u, n_prime: int) -> Povm:
    """Effects M_y = U_y0^dagger U_y0 from a unitary on n' + n qubits.

    The ancillas are the most significant block, prepared in |0>. Block
    columns that vanish stay in the POVM as zero effects so outcome labels
    remain 0..2^n' - 1.
    """
    m = as_matrix(u)
    report = validate(m, "unitary", STRUCT_TOL)
    if not report.ok:
        raise NotUnitary(str(report))
    blocks = dilation_blocks(m, n_prime)
    n = qubit_count(blocks[0].shape[0])
    effects = tuple((y, b.conj().T @ b) for y, b in enumerate(blocks))
    return Povm(n=n, effects=effects)


def usd_povm(psi0: PureState, psi1: PureState) -> Povm:
    """Unambiguous discrimination POVM for two non-orthogonal pure states.

    Outcomes 0 and 1 identify the respective state without error; outcome
    2 declares ignorance with probability |<psi0|psi1>| on either input.
    """
    if psi0.n != psi1.n:
        raise DimensionMismatch(f"states on {psi0.n} and {psi1.n} qubits")
    overlap = complex(np.vdot(psi0.amplitudes, psi1.amplitudes))
    c = abs(overlap)
    if c >= 1.0 - ZERO_PROB_TOL:
        raise IdenticalStates("states coincide up to global phase")
    a = 1.0 / (1.0 + c)
    d = psi0.dim
    eye = np.eye(d, dtype=complex)
    pi0 = np.outer(psi0.amplitudes, psi0.amplitudes.conj())
    pi1 = np.outer(psi1.amplitudes, psi1.amplitudes.conj())
    m0 = a * (eye - pi1)
    m1 = a * (eye - pi0)
    m2 = eye - m0 - m1
    return Povm(n=psi0.n, effects=((0, m0), (1, m1), (2, m2)))


# ---------------------------------------------------------------------------
# Repeatability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RepeatEntry:
    label: int
    probability: float
    repeat_probability: float


@dataclass(frozen=True)
class RepeatReport:
    """Analytic repeat probabilities plus one sampled first outcome."""

    sampled_outcome: int
    entries: tuple[RepeatEntry, ...]

    def entry(self, label: int) -> RepeatEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(f"no outcome labeled {label}")


def repeat_measurement_check(m, rho: DensityState, rng) -> RepeatReport:
    """Measure, re-measure the post-state, report P(second = first | first).

    Works for projective measurements (where the answer is exactly 1) and
    for general POVMs (where it usually is not). The conditional
    probabilities are computed analytically; the rng only picks the
    reported first outcome.
    """
    povm = as_povm(m) if isinstance(m, ProjectiveMeasurement) else m
    probs = povm_probabilities(povm, rho)
    entries = []
    for (label, effect), prob in zip(povm.effects, probs):
        if prob <= ZERO_PROB_TOL:
            continue
        after = povm_post_state(povm, label, rho)
        again = float(np.trace(effect @ after.rho).real)
        entries.append(RepeatEntry(label=label, probability=float(prob),
                                   repeat_probability=again))
    first = povm.effects[draw_outcome(probs, rng)][0]
    return RepeatReport(sampled_outcome=first, entries=tuple(entries))
