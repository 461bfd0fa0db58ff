"""Quantum channels in Kraus form.

A channel is a list of Kraus matrices satisfying the completeness relation
sum K^dagger K = I, which makes it trace preserving; complete positivity
holds by construction of the Kraus form. Channels may change register size
only through state preparation (zero-qubit input).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadProbabilities,
    BadTarget,
    DimensionMismatch,
    InvalidChannel,
    NotUnitary,
)
from .linalg import (
    Check,
    ValidationReport,
    X,
    Y,
    Z,
    as_matrix,
    dilation_blocks,
    embed_operator,
    qubit_count,
    validate,
)
from .states import DensityState, Ensemble

STRUCT_TOL = 1e-10
PRUNE_TOL = 1e-14


@dataclass(frozen=True)
class KrausChannel:
    """Kraus matrices of shape 2^n_out x 2^n_in with sum K^dagger K = I."""

    n_in: int
    n_out: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(as_matrix(k).copy() for k in self.kraus)
        if not mats:
            raise InvalidChannel("channel needs at least one Kraus matrix")
        shape = (1 << self.n_out, 1 << self.n_in)
        for k in mats:
            if k.shape != shape:
                raise DimensionMismatch(f"Kraus matrix of shape {k.shape}, expected {shape}")
        dev = _completeness_deviation(mats, self.n_in)
        if dev > STRUCT_TOL:
            raise InvalidChannel(f"sum K^dagger K off identity by {dev:.3e}")
        for k in mats:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", mats)


def _completeness_deviation(mats, n_in: int) -> float:
    d = 1 << n_in
    total = np.zeros((d, d), dtype=complex)
    for k in mats:
        total += k.conj().T @ k
    return float(np.max(np.abs(total - np.eye(d))))


def kraus_validate(c: KrausChannel, tol: float = STRUCT_TOL) -> ValidationReport:
    """Report the deviation of sum K^dagger K from the identity."""
    dev = _completeness_deviation(c.kraus, c.n_in)
    return ValidationReport(kind="kraus", checks=(Check("completeness", dev, tol),))


def apply(c: KrausChannel, rho: DensityState) -> DensityState:
    """rho_out = sum K rho K^dagger."""
    if rho.n != c.n_in:
        raise DimensionMismatch(f"channel input is {c.n_in} qubits, state is {rho.n}")
    d = 1 << c.n_out
    out = np.zeros((d, d), dtype=complex)
    for k in c.kraus:
        out += k @ rho.rho @ k.conj().T
    return DensityState(n=c.n_out, rho=out)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Channel applying ``inner`` first; Kraus set is all pairwise products.

    Products with negligible norm are pruned to bound the set size.
    """
    if inner.n_out != outer.n_in:
        raise DimensionMismatch(
            f"inner emits {inner.n_out} qubits, outer expects {outer.n_in}")
    mats = []
    for k2 in outer.kraus:
        for k1 in inner.kraus:
            prod = k2 @ k1
            if np.max(np.abs(prod)) >= PRUNE_TOL:
                mats.append(prod)
    return KrausChannel(n_in=inner.n_in, n_out=outer.n_out, kraus=tuple(mats))


def channel_from_dilation(u, n_prime: int) -> KrausChannel:
    """Kraus set {U_y0} of a unitary on n' ancilla + n system qubits.

    Applying the result equals evolving |0><0| x rho under u and tracing
    out the leading ancilla block.
    """
    m = as_matrix(u)
    report = validate(m, "unitary", STRUCT_TOL)
    if not report.ok:
        raise NotUnitary(str(report))
    blocks = dilation_blocks(m, n_prime)
    n = qubit_count(blocks[0].shape[0])
    return KrausChannel(n_in=n, n_out=n, kraus=tuple(blocks))


def pauli_channel(p0: float, p1: float, p2: float, p3: float) -> KrausChannel:
    """Single-qubit channel applying I, X, Y, Z with the given probabilities."""
    probs = [float(p) for p in (p0, p1, p2, p3)]
    if any(p < 0 for p in probs):
        raise BadProbabilities(f"negative probability in {probs}")
    if abs(sum(probs) - 1.0) > STRUCT_TOL:
        raise BadProbabilities(f"probabilities sum to {sum(probs)!r}")
    paulis = (np.eye(2, dtype=complex), X, Y, Z)
    mats = tuple(np.sqrt(p) * g for p, g in zip(probs, paulis) if p > 0.0)
    return KrausChannel(n_in=1, n_out=1, kraus=mats)


def _check_flip_probability(p: float, name: str) -> float:
    p = float(p)
    if p < 0 or p > 1:
        raise BadProbabilities(f"{name} probability {p} outside [0, 1]")
    if p > 0.5:
        # values above one half are equivalent to 1-p plus a deterministic flip
        warnings.warn(f"{name} probability {p} exceeds 0.5", stacklevel=3)
    return p


def bit_flip(p: float) -> KrausChannel:
    """Apply X with probability p, identity otherwise."""
    p = _check_flip_probability(p, "bit-flip")
    return pauli_channel(1.0 - p, p, 0.0, 0.0)


def dephasing(p: float) -> KrausChannel:
    """Apply Z with probability p, identity otherwise."""
    p = _check_flip_probability(p, "dephasing")
    return pauli_channel(1.0 - p, 0.0, 0.0, p)


def state_prep_channel(e: Ensemble) -> KrausChannel:
    """Preparation of an ensemble as a channel from a zero-qubit input.

    The Kraus maps are columns sqrt(p_x) |v_x>; applied to the scalar
    density 1 they produce the ensemble's density matrix.
    """
    mats = tuple(
        np.sqrt(p) * s.amplitudes.reshape(-1, 1) for p, s in e.members)
    return KrausChannel(n_in=0, n_out=e.n, kraus=mats)


def classical_channel(n: int) -> KrausChannel:
    """Full computational-basis decoherence: K_x = |x><x|.

    Keeps the diagonal of the input density and zeroes everything else,
    which is how a noiseless classical channel looks as a quantum channel.
    """
    if n < 1:
        raise DimensionMismatch("classical channel needs at least one qubit")
    d = 1 << n
    mats = []
    for x in range(d):
        k = np.zeros((d, d), dtype=complex)
        k[x, x] = 1.0
        mats.append(k)
    return KrausChannel(n_in=n, n_out=n, kraus=tuple(mats))


def embed(c: KrausChannel, targets, n_total: int) -> KrausChannel:
    """Act with a channel on a subset of a larger register.

    Every Kraus matrix is tensored with the identity on untouched qubits,
    index-permuted so that operator axis j lands on ``targets[j]``.
    """
    if c.n_in != c.n_out:
        raise BadTarget("only square channels can be embedded")
    targets = list(targets)
    if len(targets) != c.n_in:
        raise BadTarget(f"channel on {c.n_in} qubits, {len(targets)} targets")
    mats = tuple(embed_operator(k, targets, n_total) for k in c.kraus)
    return KrausChannel(n_in=n_total, n_out=n_total, kraus=mats)
