"""Dense complex linear algebra kernel.

Everything in this package carries its operators as plain complex numpy
matrices. Qubit 0 is the most significant bit of a computational-basis
index, so Kronecker compositions list qubit 0 leftmost. All tolerance
checks are max absolute element-wise deviations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadDimension, BadSplit, BadTarget, NonSquare, NotHermitian, NotPsd

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)

#: Pauli matrices indexed 0..3 as I, X, Y, Z.
PAULIS = (I2, X, Y, Z)

JACOBI_OFF_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
DEGENERACY_RTOL = 1e-8


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise BadDimension(f"expected a matrix, got ndim={m.ndim}")
    return m


def require_square(m: np.ndarray) -> int:
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"matrix is {m.shape[0]}x{m.shape[1]}")
    return m.shape[0]


def qubit_count(dim: int) -> int:
    """Number of qubits for a dimension that must be a power of two."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise BadDimension(f"dimension {dim} is not a power of two")
    return n


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor owns the most significant qubits."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(factors) -> np.ndarray:
    """Kronecker product of a sequence of matrices, left to right."""
    out = np.array([[1.0 + 0j]])
    for f in factors:
        out = np.kron(out, as_matrix(f))
    return out


def dagger(a) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a, dtype=complex).conj().T


def trace(a) -> complex:
    """Sum of diagonal entries of a square matrix."""
    m = as_matrix(a)
    require_square(m)
    return complex(np.trace(m))


def partial_trace(rho, dims: tuple[int, int], over: str) -> np.ndarray:
    """Trace out one subsystem of a bipartite operator.

    ``dims = (dA, dB)`` with subsystem A on the most significant index
    block. ``over`` selects the subsystem to discard, ``"a"`` or ``"b"``.
    """
    m = as_matrix(rho)
    d = require_square(m)
    da, db = dims
    if da * db != d:
        raise BadSplit(f"dims {da}x{db} do not match matrix size {d}")
    t = m.reshape(da, db, da, db)
    if over == "a":
        return np.einsum("abac->bc", t)
    if over == "b":
        return np.einsum("abcb->ac", t)
    raise BadTarget(f"unknown subsystem selector {over!r}")


def embed_operator(op, targets, n: int) -> np.ndarray:
    """Expand a k-qubit operator to n qubits at the given target positions.

    ``targets[j]`` is the register qubit carrying axis j of ``op``. The
    remaining qubits receive the identity; the result is expressed in the
    standard qubit order via an index permutation, no SWAP insertion.
    """
    g = as_matrix(op)
    dim = require_square(g)
    k = qubit_count(dim)
    targets = list(targets)
    if len(targets) != k or len(set(targets)) != k:
        raise BadTarget(f"operator on {k} qubits needs {k} distinct targets, got {targets}")
    if any(t < 0 or t >= n for t in targets):
        raise BadTarget(f"targets {targets} out of range for {n} qubits")
    if k == n and targets == list(range(n)):
        return g.copy()
    rest = [q for q in range(n) if q not in targets]
    order = targets + rest
    big = np.kron(g, np.eye(1 << (n - k), dtype=complex))
    pos = {q: i for i, q in enumerate(order)}
    perm = [pos[q] for q in range(n)]
    t = big.reshape((2,) * (2 * n))
    t = t.transpose(perm + [p + n for p in perm])
    return np.ascontiguousarray(t.reshape(1 << n, 1 << n))


def apply_to_vector(op, vec, targets, n: int) -> np.ndarray:
    """Apply a k-qubit operator to selected qubits of an n-qubit vector."""
    g = as_matrix(op)
    k = qubit_count(require_square(g))
    targets = list(targets)
    if len(targets) != k or len(set(targets)) != k:
        raise BadTarget(f"operator on {k} qubits needs {k} distinct targets, got {targets}")
    psi = np.asarray(vec, dtype=complex).reshape((2,) * n)
    t = np.tensordot(g.reshape((2,) * (2 * k)), psi, axes=(range(k, 2 * k), targets))
    return np.moveaxis(t, range(k), targets).reshape(-1)


def dilation_blocks(u, n_prime: int) -> list[np.ndarray]:
    """First block column of a unitary on n' ancilla + n system qubits.

    The ancillas occupy the most significant block; block y is the
    system-sized submatrix mapping the |0> ancilla sector to the |y> sector.
    """
    m = as_matrix(u)
    d = require_square(m)
    total = qubit_count(d)
    if n_prime < 0 or n_prime > total:
        raise BadTarget(f"{n_prime} ancillas out of {total} qubits")
    size = 1 << (total - n_prime)
    return [m[y * size:(y + 1) * size, 0:size] for y in range(1 << n_prime)]


# ---------------------------------------------------------------------------
# Hermitian eigendecomposition: cyclic complex Jacobi rotations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues sorted descending; ``vectors[:, k]`` pairs with ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Rebuild the Hermitian matrix as sum of lambda_k v_k v_k^dagger."""
        return (self.vectors * self.values) @ self.vectors.conj().T


def _off_norm(h: np.ndarray) -> float:
    off = h - np.diag(np.diag(h))
    return float(np.linalg.norm(off))


def _jacobi_rotation(app: float, aqq: float, hpq: complex):
    """2x2 unitary annihilating the (p, q) entry of a Hermitian matrix."""
    r = abs(hpq)
    phase = hpq / r
    theta = 0.5 * math.atan2(2.0 * r, app - aqq)
    c = math.cos(theta)
    s = math.sin(theta)
    return np.array([[c, -s * phase], [s * np.conj(phase), c]], dtype=complex)


def eig_hermitian(h, tol: float = 1e-10) -> SpectralDecomposition:
    """Full spectral decomposition of a Hermitian matrix.

    Cyclic Jacobi rotations on the complex matrix, sweeping until the
    off-diagonal Frobenius norm drops below 1e-12 (relative to the input
    scale) or 100 sweeps. Raises NotHermitian when the input deviates from
    its conjugate transpose by more than ``tol``.
    """
    m = as_matrix(h)
    d = require_square(m)
    dev = float(np.max(np.abs(m - m.conj().T))) if d else 0.0
    if dev > tol:
        raise NotHermitian(f"max |H - H^dagger| = {dev:.3e} exceeds tol {tol:.1e}")
    a = (m + m.conj().T) / 2.0
    v = np.eye(d, dtype=complex)
    if d > 1:
        stop = JACOBI_OFF_TOL * max(1.0, float(np.linalg.norm(a)))
        for _ in range(JACOBI_MAX_SWEEPS):
            if _off_norm(a) < stop:
                break
            for p in range(d - 1):
                for q in range(p + 1, d):
                    if abs(a[p, q]) <= stop / (d * d):
                        continue
                    w = _jacobi_rotation(a[p, p].real, a[q, q].real, a[p, q])
                    a[:, [p, q]] = a[:, [p, q]] @ w
                    a[[p, q], :] = w.conj().T @ a[[p, q], :]
                    v[:, [p, q]] = v[:, [p, q]] @ w
    values = np.diag(a).real.copy()
    order = np.argsort(-values, kind="stable")
    return SpectralDecomposition(values=values[order], vectors=v[:, order])


def group_eigenvalues(values: np.ndarray, scale: float) -> list[list[int]]:
    """Group indices of descending eigenvalues whose gap is below tolerance.

    Two adjacent eigenvalues merge when their gap is smaller than
    ``1e-8 * max(1, scale)``.
    """
    gap = DEGENERACY_RTOL * max(1.0, scale)
    groups: list[list[int]] = []
    for i, lam in enumerate(values):
        if groups and abs(values[groups[-1][-1]] - lam) < gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def sqrt_psd(m, tol: float = 1e-10) -> np.ndarray:
    """Positive semidefinite square root of a PSD matrix.

    Eigenvalues below ``-tol`` raise NotPsd; small negative eigenvalues in
    ``[-tol, 0)`` are clamped to zero.
    """
    dec = eig_hermitian(m, tol=tol)
    if dec.values.size and dec.values[-1] < -tol:
        raise NotPsd(f"minimum eigenvalue {dec.values[-1]:.3e} below -{tol:.1e}")
    roots = np.sqrt(np.clip(dec.values, 0.0, None))
    return (dec.vectors * roots) @ dec.vectors.conj().T


# ---------------------------------------------------------------------------
# Pauli-basis decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliCoefficients:
    """Coefficients of a matrix in the n-qubit Pauli-string basis.

    Keys are digit strings over {0,1,2,3} standing for {I,X,Y,Z} factors,
    qubit 0 first. For a Hermitian input all coefficients are real.
    """

    n: int
    coeffs: dict[str, complex]


def pauli_string_matrix(s: str) -> np.ndarray:
    """Materialize the Pauli string with digit s_k acting on qubit k."""
    return kron_all(PAULIS[int(c)] for c in s)


def pauli_decompose(a) -> PauliCoefficients:
    """Expand a 2^n x 2^n matrix over Pauli strings: a_s = tr(a P_s) / 2^n."""
    m = as_matrix(a)
    d = require_square(m)
    n = qubit_count(d)
    coeffs: dict[str, complex] = {}
    for digits in itertools.product("0123", repeat=n):
        s = "".join(digits)
        p = pauli_string_matrix(s)
        coeffs[s] = complex(np.trace(p @ m)) / d
    return PauliCoefficients(n=n, coeffs=coeffs)


def pauli_reconstruct(pc: PauliCoefficients) -> np.ndarray:
    """Inverse of ``pauli_decompose``."""
    d = 1 << pc.n
    out = np.zeros((d, d), dtype=complex)
    for s, a in pc.coeffs.items():
        if a != 0:
            out += a * pauli_string_matrix(s)
    return out


# ---------------------------------------------------------------------------
# Structural validators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    """One predicate of a validation run."""

    name: str
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol


@dataclass(frozen=True)
class ValidationReport:
    kind: str
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[Check, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def max_deviation(self) -> float:
        return max((c.deviation for c in self.checks), default=0.0)

    def __str__(self) -> str:
        lines = [f"{self.kind}: {'pass' if self.ok else 'FAIL'}"]
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            lines.append(f"  {c.name}: deviation {c.deviation:.3e} (tol {c.tol:.1e}) {status}")
        return "\n".join(lines)


def _hermitian_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def _psd_deviation(m: np.ndarray, tol: float) -> float:
    """|most negative eigenvalue|, zero if PSD within tol.

    Fast path: Cholesky of the symmetrized matrix shifted by tol succeeds
    exactly when the minimum eigenvalue exceeds -tol; the eigensolver is
    only consulted to quantify a failure.
    """
    sym = (m + m.conj().T) / 2.0
    try:
        np.linalg.cholesky(sym + tol * np.eye(m.shape[0]))
        return 0.0
    except np.linalg.LinAlgError:
        dec = eig_hermitian(sym, tol=np.inf)
        return float(max(0.0, -dec.values[-1]))


def validate(m, kind: str, tol: float = 1e-10) -> ValidationReport:
    """Check a structural property of a square matrix.

    ``kind`` is one of ``unitary``, ``hermitian``, ``psd``, ``projector``,
    ``density``. The report carries every failed predicate with its max
    deviation rather than raising.
    """
    a = as_matrix(m)
    d = require_square(a)
    checks: list[Check] = []
    if kind == "unitary":
        dev = float(np.max(np.abs(a.conj().T @ a - np.eye(d))))
        checks.append(Check("unitarity", dev, tol))
    elif kind == "hermitian":
        checks.append(Check("hermiticity", _hermitian_deviation(a), tol))
    elif kind == "psd":
        checks.append(Check("hermiticity", _hermitian_deviation(a), tol))
        checks.append(Check("positivity", _psd_deviation(a, tol), tol))
    elif kind == "projector":
        checks.append(Check("hermiticity", _hermitian_deviation(a), tol))
        checks.append(Check("idempotence", float(np.max(np.abs(a @ a - a))), tol))
    elif kind == "density":
        checks.append(Check("hermiticity", _hermitian_deviation(a), tol))
        checks.append(Check("positivity", _psd_deviation(a, tol), tol))
        checks.append(Check("unit trace", abs(complex(np.trace(a)) - 1.0), tol))
    else:
        raise ValueError(f"unknown validation kind {kind!r}")
    return ValidationReport(kind=kind, checks=tuple(checks))
