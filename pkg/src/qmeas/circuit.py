"""Gate-level simulator with mid-circuit partial measurements.

Mid-circuit measurements are always computational-basis measurements of
the targeted qubits; measuring in another basis is expressed by
conjugating with a change-of-basis gate. Classically controlled gates
take a conjunction of bit literals, which is all the decoders here need.
Gates on non-adjacent qubits are embedded by index permutation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidCircuit,
    NotBalanced,
    NotOrthonormal,
    TooManyBranches,
)
from .linalg import (
    H,
    X,
    Y,
    Z,
    apply_to_vector,
    as_matrix,
    embed_operator,
    qubit_count,
    require_square,
    validate,
)
from .states import PureState

GATE_TOL = 1e-10
BRANCH_PROB_TOL = 1e-12
MAX_CLASSICAL_BITS = 20

CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

NAMED_GATES = {"X": X, "Y": Y, "Z": Z, "H": H, "CNOT": CNOT, "CZ": CZ}

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Condition:
    """Conjunction of classical-bit literals, e.g. y0 & !y1."""

    literals: tuple[tuple[str, bool], ...]

    @classmethod
    def parse(cls, text: str) -> "Condition":
        literals = []
        for token in text.split("&"):
            token = token.strip()
            wanted = True
            if token.startswith("!"):
                wanted = False
                token = token[1:].strip()
            if not _NAME_RE.match(token):
                raise InvalidCircuit(f"bad condition literal {token!r}")
            literals.append((token, wanted))
        if not literals:
            raise InvalidCircuit("empty condition")
        return cls(literals=tuple(literals))

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.literals)

    def evaluate(self, bits: dict[str, int]) -> bool:
        return all(bits[name] == (1 if wanted else 0) for name, wanted in self.literals)

    def __str__(self) -> str:
        return " & ".join(name if wanted else f"!{name}" for name, wanted in self.literals)


@dataclass(frozen=True)
class Gate:
    """Unitary applied to target qubits, optionally classically controlled."""

    targets: tuple[int, ...]
    matrix: np.ndarray
    name: str | None = None
    condition: Condition | None = None


@dataclass(frozen=True)
class Measure:
    """Computational-basis measurement storing one bit name per target."""

    targets: tuple[int, ...]
    store: tuple[str, ...]


CircuitOp = Gate | Measure


def named_gate(name: str, *targets: int, condition: Condition | None = None) -> Gate:
    if name not in NAMED_GATES:
        raise InvalidCircuit(f"unknown gate {name!r}")
    return Gate(targets=tuple(targets), matrix=NAMED_GATES[name], name=name,
                condition=condition)


def unitary_gate(matrix, targets, condition: Condition | None = None) -> Gate:
    return Gate(targets=tuple(targets), matrix=as_matrix(matrix), condition=condition)


def measure_op(targets, store) -> Measure:
    return Measure(targets=tuple(targets), store=tuple(store))


@dataclass(frozen=True)
class Circuit:
    n: int
    ops: tuple[CircuitOp, ...]

    def __post_init__(self):
        defined: set[str] = set()
        for op in self.ops:
            if any(t < 0 or t >= self.n for t in op.targets):
                raise InvalidCircuit(f"targets {op.targets} out of range for {self.n} qubits")
            if len(set(op.targets)) != len(op.targets):
                raise InvalidCircuit(f"repeated target in {op.targets}")
            if isinstance(op, Gate):
                d = require_square(op.matrix)
                if d != 1 << len(op.targets):
                    raise InvalidCircuit(
                        f"gate of size {d} on {len(op.targets)} targets")
                if not validate(op.matrix, "unitary", GATE_TOL).ok:
                    raise InvalidCircuit(f"gate {op.name or 'matrix'} is not unitary")
                if op.condition is not None:
                    missing = [b for b in op.condition.names() if b not in defined]
                    if missing:
                        raise InvalidCircuit(f"condition uses undefined bits {missing}")
            else:
                if len(op.store) != len(op.targets):
                    raise InvalidCircuit("one stored bit name per measured qubit")
                for name in op.store:
                    if not _NAME_RE.match(name):
                        raise InvalidCircuit(f"bad bit name {name!r}")
                    if name in defined:
                        raise InvalidCircuit(f"bit {name!r} stored twice")
                    defined.add(name)

    @property
    def classical_bits(self) -> tuple[str, ...]:
        names = []
        for op in self.ops:
            if isinstance(op, Measure):
                names.extend(op.store)
        return tuple(names)


@dataclass(frozen=True)
class RunRecord:
    """One sampled trajectory: final state, measured bits, their joint probability."""

    final_state: PureState
    bits: dict[str, int]
    trajectory_probability: float


@dataclass(frozen=True)
class CircuitBranch:
    """One exact measurement branch of a circuit run."""

    bits: dict[str, int]
    probability: float
    state: PureState


@lru_cache(maxsize=256)
def _outcome_keys(n: int, targets: tuple[int, ...]) -> np.ndarray:
    """Map each basis index to the outcome integer read off the targets."""
    idx = np.arange(1 << n)
    keys = np.zeros(1 << n, dtype=np.int64)
    for t in targets:
        keys = (keys << 1) | ((idx >> (n - 1 - t)) & 1)
    keys.setflags(write=False)
    return keys


def _store_bits(bits: dict[str, int], op: Measure, outcome: int):
    k = len(op.targets)
    for j, name in enumerate(op.store):
        bits[name] = (outcome >> (k - 1 - j)) & 1


def draw_outcome(probs: np.ndarray, rng) -> int:
    """Inverse-CDF draw that never lands on a zero-probability outcome."""
    y = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    y = min(y, probs.size - 1)
    if probs[y] <= 0.0:
        y = int(np.argmax(probs))
    return y


def run(c: Circuit, input: PureState, rng) -> RunRecord:
    """Sample one trajectory through the circuit."""
    if input.n != c.n:
        raise DimensionMismatch(f"circuit on {c.n} qubits, state on {input.n}")
    vec = input.amplitudes.copy()
    bits: dict[str, int] = {}
    joint = 1.0
    for op in c.ops:
        if isinstance(op, Gate):
            if op.condition is None or op.condition.evaluate(bits):
                vec = apply_to_vector(op.matrix, vec, op.targets, c.n)
        else:
            keys = _outcome_keys(c.n, op.targets)
            probs = np.bincount(keys, weights=np.abs(vec) ** 2,
                                minlength=1 << len(op.targets))
            y = draw_outcome(probs, rng)
            p = float(probs[y])
            vec = np.where(keys == y, vec, 0.0) / np.sqrt(p)
            _store_bits(bits, op, y)
            joint *= p
    return RunRecord(final_state=PureState(n=c.n, amplitudes=vec), bits=bits,
                     trajectory_probability=joint)


def run_distribution(c: Circuit, input: PureState) -> tuple[CircuitBranch, ...]:
    """Enumerate every measurement branch with its exact probability.

    Branches with probability below 1e-12 are dropped; the surviving
    probabilities sum to 1 up to rounding.
    """
    if input.n != c.n:
        raise DimensionMismatch(f"circuit on {c.n} qubits, state on {input.n}")
    if len(c.classical_bits) > MAX_CLASSICAL_BITS:
        raise TooManyBranches(
            f"{len(c.classical_bits)} classical bits exceed the {MAX_CLASSICAL_BITS}-bit budget")
    branches: list[tuple[dict[str, int], float, np.ndarray]] = [
        ({}, 1.0, input.amplitudes.copy())]
    for op in c.ops:
        if isinstance(op, Gate):
            updated = []
            for bits, prob, vec in branches:
                if op.condition is None or op.condition.evaluate(bits):
                    vec = apply_to_vector(op.matrix, vec, op.targets, c.n)
                updated.append((bits, prob, vec))
            branches = updated
        else:
            keys = _outcome_keys(c.n, op.targets)
            split = []
            for bits, prob, vec in branches:
                probs = np.bincount(keys, weights=np.abs(vec) ** 2,
                                    minlength=1 << len(op.targets))
                for y, p in enumerate(probs):
                    if p <= BRANCH_PROB_TOL:
                        continue
                    child = dict(bits)
                    _store_bits(child, op, y)
                    split.append((child, prob * float(p),
                                  np.where(keys == y, vec, 0.0) / np.sqrt(p)))
            branches = split
    return tuple(
        CircuitBranch(bits=bits, probability=prob,
                      state=PureState(n=c.n, amplitudes=vec))
        for bits, prob, vec in branches)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Net unitary of the circuit with measurements removed.

    Undefined for classically controlled circuits, which have no single
    measurement-free matrix.
    """
    out = np.eye(1 << c.n, dtype=complex)
    for op in c.ops:
        if isinstance(op, Measure):
            continue
        if op.condition is not None:
            raise InvalidCircuit("net unitary undefined with classically controlled gates")
        out = embed_operator(op.matrix, op.targets, c.n) @ out
    return out


# ---------------------------------------------------------------------------
# Measurement-circuit builders
# ---------------------------------------------------------------------------

def basis_copy(n: int) -> np.ndarray:
    """Permutation |x, y> -> |x, x XOR y> on a source block plus ancilla block.

    Copies computational labels from the leading n qubits onto the
    trailing n qubits when those start in |0>; it is its own inverse.
    """
    if n < 1:
        raise InvalidCircuit("basis copy needs at least one qubit per block")
    size = 1 << n
    m = np.zeros((size * size, size * size), dtype=complex)
    for x in range(size):
        for y in range(size):
            m[(x << n) | (x ^ y), (x << n) | y] = 1.0
    return m


def change_of_basis(from_basis) -> np.ndarray:
    """Unitary mapping the k-th given vector to the computational vector |k>."""
    vecs = np.asarray([np.asarray(v, dtype=complex).reshape(-1) for v in from_basis])
    count = vecs.shape[0]
    if vecs.shape != (count, count):
        raise NotOrthonormal("need exactly dim vectors of matching length")
    gram = vecs.conj() @ vecs.T
    dev = float(np.max(np.abs(gram - np.eye(count))))
    if dev > GATE_TOL:
        raise NotOrthonormal(f"Gram matrix off identity by {dev:.3e}")
    return vecs.conj()


def balanced_measurement_circuit(basis, n_prime: int) -> Circuit:
    """Change basis, measure the last n' qubits, change back.

    The basis must be ordered so that index (x << n') | y is the x-th
    vector of outcome y; the circuit then reproduces the projective
    measurement with projectors summing that subset, with outcome bits
    stored as y0..y(n'-1), qubit n-n'+j giving bit j.
    """
    u = change_of_basis(basis)
    n = qubit_count(u.shape[0])
    if n_prime < 0 or n_prime > n:
        raise NotBalanced(f"cannot measure {n_prime} of {n} qubits")
    measured = tuple(range(n - n_prime, n))
    store = tuple(f"y{j}" for j in range(n_prime))
    ops: list[CircuitOp] = [unitary_gate(u, tuple(range(n)))]
    if n_prime:
        ops.append(measure_op(measured, store))
    ops.append(unitary_gate(u.conj().T, tuple(range(n))))
    return Circuit(n=n, ops=tuple(ops))


def ancilla_von_neumann_circuit(basis) -> Circuit:
    """Complete measurement in an arbitrary basis using n ancilla qubits.

    The register holds the system first and n ancillas (in |0>) last. The
    circuit rotates the basis to computational, copies the labels onto the
    ancillas, measures the ancillas, and rotates back, leaving the system
    in the measured basis vector and the ancillas carrying its index.
    """
    u = change_of_basis(basis)
    n = qubit_count(u.shape[0])
    system = tuple(range(n))
    everything = tuple(range(2 * n))
    ancillas = tuple(range(n, 2 * n))
    store = tuple(f"x{j}" for j in range(n))
    return Circuit(n=2 * n, ops=(
        unitary_gate(u, system),
        unitary_gate(basis_copy(n), everything),
        measure_op(ancillas, store),
        unitary_gate(u.conj().T, system),
    ))


def parity_ancilla_circuit(variant: str = "compact") -> Circuit:
    """Two-qubit parity measurement via one ancilla, Fig.-style.

    ``three-cnot`` conjugates a basis copy with the parity change of
    basis; ``compact`` has the ancilla accumulate the parity with two
    CNOTs. Both leave the ancilla in |y> and the system in the collapsed
    parity eigenstate.
    """
    if variant == "three-cnot":
        ops = (named_gate("CNOT", 0, 1),
               named_gate("CNOT", 1, 2),
               measure_op((2,), ("y",)),
               named_gate("CNOT", 0, 1))
    elif variant == "compact":
        ops = (named_gate("CNOT", 0, 2),
               named_gate("CNOT", 1, 2),
               measure_op((2,), ("y",)))
    else:
        raise ValueError(f"unknown parity circuit variant {variant!r}")
    return Circuit(n=3, ops=ops)


# ---------------------------------------------------------------------------
# JSON form
# ---------------------------------------------------------------------------

def _complex_from_pair(v) -> complex:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise InvalidCircuit(f"complex entries are [re, im] pairs, got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[_complex_from_pair(v) for v in row] for row in rows], dtype=complex)


def matrix_to_json(m) -> list[list[list[float]]]:
    a = as_matrix(m)
    return [[[float(v.real), float(v.imag)] for v in row] for row in a]


def circuit_from_dict(d: dict) -> Circuit:
    """Build a circuit from its JSON dictionary form."""
    try:
        n = int(d["n"])
        raw_ops = d["ops"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidCircuit(f"circuit needs integer 'n' and a list 'ops': {exc}")
    ops: list[CircuitOp] = []
    for entry in raw_ops:
        if not isinstance(entry, dict):
            raise InvalidCircuit(f"circuit op must be an object, got {entry!r}")
        if "measure" in entry:
            targets = tuple(int(t) for t in entry["measure"])
            store = tuple(str(s) for s in entry.get("store", ()))
            ops.append(measure_op(targets, store))
            continue
        condition = Condition.parse(entry["if"]) if "if" in entry else None
        targets = tuple(int(t) for t in entry.get("targets", ()))
        if "gate" in entry:
            ops.append(named_gate(str(entry["gate"]), *targets, condition=condition))
        elif "unitary" in entry:
            ops.append(unitary_gate(matrix_from_json(entry["unitary"]), targets,
                                    condition=condition))
        else:
            raise InvalidCircuit(f"op needs 'gate', 'unitary' or 'measure': {entry!r}")
    return Circuit(n=n, ops=tuple(ops))


def circuit_to_dict(c: Circuit) -> dict:
    ops = []
    for op in c.ops:
        if isinstance(op, Measure):
            ops.append({"measure": list(op.targets), "store": list(op.store)})
            continue
        entry: dict = {"targets": list(op.targets)}
        if op.name is not None:
            entry["gate"] = op.name
        else:
            entry["unitary"] = matrix_to_json(op.matrix)
        if op.condition is not None:
            entry["if"] = str(op.condition)
        ops.append(entry)
    return {"n": c.n, "ops": ops}
