"""Three-qubit repetition code: encode, corrupt, syndrome-decode, correct.

The bit-flip code protects against a single X error; the phase-flip
variant conjugates everything with Hadamards on all three qubits and
protects against a single Z error. Syndrome bits follow the pair-parity
convention: y0 is the parity of qubits 0 and 1, y1 of qubits 1 and 2, so
00 means no error and 10/11/01 point at qubits 0/1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import CNOT, Circuit, Condition, measure_op, named_gate, run
from .errors import BadSelector, DimensionMismatch
from .linalg import H, X, Z, apply_to_vector, kron_all
from .measure import Observable, ProjectiveMeasurement
from .rng import ShotStreams
from .states import PureState, fidelity

#: basis labels spanning each syndrome subspace of the bit-flip code
SYNDROME_SUBSPACES = {
    (0, 0): ("000", "111"),
    (1, 0): ("100", "011"),
    (1, 1): ("010", "101"),
    (0, 1): ("001", "110"),
}

#: syndrome -> qubit receiving the correction (None for the clean syndrome)
CORRECTION_TARGET = {(0, 0): None, (1, 0): 0, (1, 1): 1, (0, 1): 2}

SYNDROMES = ((0, 0), (0, 1), (1, 0), (1, 1))

ROUNDTRIP_TOL = 1e-9


@dataclass(frozen=True)
class RepetitionCode:
    """One logical qubit in three physical qubits, bit-flip or phase-flip."""

    kind: str

    def __post_init__(self):
        if self.kind not in ("bit-flip", "phase-flip"):
            raise BadSelector(f"unknown code kind {self.kind!r}")

    n = 3
    k = 1

    @property
    def hadamard_frame(self) -> np.ndarray | None:
        return kron_all([H, H, H]) if self.kind == "phase-flip" else None

    @property
    def error_operator(self) -> np.ndarray:
        return X if self.kind == "bit-flip" else Z

    def syndrome_projector(self, bits: tuple[int, int]) -> np.ndarray:
        return _syndrome_projectors(self.kind)[bits]

    @property
    def syndrome_measurement(self) -> ProjectiveMeasurement:
        """Four rank-2 projectors labeled 2*y0 + y1."""
        outcomes = tuple(
            (s[0] * 2 + s[1], self.syndrome_projector(s)) for s in SYNDROMES)
        return ProjectiveMeasurement(n=3, outcomes=outcomes)


@lru_cache(maxsize=2)
def _syndrome_projectors(kind: str) -> dict[tuple[int, int], np.ndarray]:
    frame = kron_all([H, H, H]) if kind == "phase-flip" else None
    table = {}
    for bits, labels in SYNDROME_SUBSPACES.items():
        p = np.zeros((8, 8), dtype=complex)
        for label in labels:
            i = int(label, 2)
            p[i, i] = 1.0
        if frame is not None:
            p = frame @ p @ frame
        p.setflags(write=False)
        table[bits] = p
    return table


def bit_flip_code() -> RepetitionCode:
    return RepetitionCode(kind="bit-flip")


def phase_flip_code() -> RepetitionCode:
    return RepetitionCode(kind="phase-flip")


def encode(psi: PureState, code: RepetitionCode) -> PureState:
    """Spread one logical qubit over three physical qubits with two CNOTs.

    The phase-flip encoder is the Hadamard conjugation of the bit-flip
    one, so logical |+> and |-> become |+++> and |--->.
    """
    if psi.n != 1:
        raise DimensionMismatch(f"encoder takes one qubit, got {psi.n}")
    amps = psi.amplitudes
    if code.kind == "phase-flip":
        amps = H @ amps
    vec = np.zeros(8, dtype=complex)
    vec[0] = amps[0]  # |000>
    vec[4] = amps[1]  # |100>
    vec = apply_to_vector(CNOT, vec, [0, 1], 3)
    vec = apply_to_vector(CNOT, vec, [0, 2], 3)
    if code.kind == "phase-flip":
        vec = code.hadamard_frame @ vec
    return PureState(n=3, amplitudes=vec)


def apply_error(state: PureState, error, code: RepetitionCode) -> PureState:
    """Apply the code's single-qubit error (or nothing) at the selected qubit."""
    if state.n != 3:
        raise DimensionMismatch(f"expected 3 qubits, got {state.n}")
    if error is None:
        return state
    q = int(error)
    if q not in (0, 1, 2):
        raise BadSelector(f"error selector must be None or 0..2, got {error!r}")
    vec = apply_to_vector(code.error_operator, state.amplitudes, [q], 3)
    return PureState(n=3, amplitudes=vec)


def _correct(vec: np.ndarray, syndrome: tuple[int, int], code: RepetitionCode) -> np.ndarray:
    target = CORRECTION_TARGET[syndrome]
    if target is None:
        return vec
    return apply_to_vector(code.error_operator, vec, [target], 3)


def decode_projective(state: PureState, code: RepetitionCode) -> tuple[tuple[int, int], PureState]:
    """Measure the four syndrome projectors, collapse, and correct.

    A codeword hit by at most one error gives one syndrome probability 1,
    making the measurement deterministic and gentle; for other inputs the
    most likely syndrome is chosen (first in 00, 01, 10, 11 order on ties).
    """
    if state.n != 3:
        raise DimensionMismatch(f"expected 3 qubits, got {state.n}")
    best, best_p, best_vec = (0, 0), -1.0, None
    for s in SYNDROMES:
        branch = code.syndrome_projector(s) @ state.amplitudes
        p = float(np.real(np.vdot(branch, branch)))
        if p > best_p + 1e-15:
            best, best_p, best_vec = s, p, branch
    collapsed = best_vec / math.sqrt(best_p)
    return best, PureState(n=3, amplitudes=_correct(collapsed, best, code))


def build_decode_circuit(code: RepetitionCode) -> Circuit:
    """Syndrome extraction into two ancillas plus conditioned corrections.

    Qubits 3 and 4 accumulate the pair parities and are measured into
    bits y0, y1; the implicated qubit receives a conditioned X (wrapped
    in Hadamards for the phase-flip code, turning it into a Z).
    """
    ops = [
        named_gate("CNOT", 0, 3),
        named_gate("CNOT", 1, 3),
        named_gate("CNOT", 1, 4),
        named_gate("CNOT", 2, 4),
        measure_op((3, 4), ("y0", "y1")),
        named_gate("X", 0, condition=Condition.parse("y0 & !y1")),
        named_gate("X", 1, condition=Condition.parse("y0 & y1")),
        named_gate("X", 2, condition=Condition.parse("!y0 & y1")),
    ]
    if code.kind == "phase-flip":
        hadamards = [named_gate("H", q) for q in (0, 1, 2)]
        ops = hadamards + ops + hadamards
    return Circuit(n=5, ops=tuple(ops))


def decode_circuit(state: PureState, code: RepetitionCode, rng) -> tuple[tuple[int, int], PureState]:
    """Run the ancilla decoder and discard the measured ancillas."""
    if state.n != 3:
        raise DimensionMismatch(f"expected 3 qubits, got {state.n}")
    padded = np.zeros(32, dtype=complex)
    padded[0::4] = state.amplitudes  # ancillas 3 and 4 start in |0>
    record = run(build_decode_circuit(code), PureState(n=5, amplitudes=padded), rng)
    y0, y1 = record.bits["y0"], record.bits["y1"]
    table = record.final_state.amplitudes.reshape(8, 4)
    system = table[:, y0 * 2 + y1]
    return (y0, y1), PureState(n=3, amplitudes=system)


def hamming_bound(k: int, m: int) -> int:
    """Smallest n with 2^n >= 2^k * (m + 1)."""
    if k < 1 or m < 0:
        raise ValueError(f"need k >= 1 and m >= 0, got k={k}, m={m}")
    return k + m.bit_length()


def error_detect_observable(code: RepetitionCode) -> Observable:
    """+1 on the code space, -1 on anything orthogonal to it."""
    clean = code.syndrome_projector((0, 0))
    eye = np.eye(8, dtype=complex)
    return Observable(n=3, matrix=2 * clean - eye,
                      spectral=((1.0, clean), (-1.0, eye - clean)))


# ---------------------------------------------------------------------------
# Monte-Carlo noise
# ---------------------------------------------------------------------------

def _sample_flips(p: float, noise: str, rng) -> list[int]:
    if noise == "independent":
        return [q for q in range(3) if rng.random() < p]
    if noise == "at-most-one":
        # marginal flip probability per qubit stays p; needs p <= 1/3
        u = rng.random()
        return [min(int(u / p), 2)] if p > 0 and u < 3 * p else []
    raise BadSelector(f"unknown noise model {noise!r}")


def logical_error_rate(code: RepetitionCode, p: float, shots: int, seed: int,
                       noise: str = "independent",
                       logical: PureState | None = None) -> dict:
    """Fraction of shots whose corrected state differs from the encoded one.

    Each shot flips qubits according to the noise model (independent
    per-qubit errors by default), decodes, and compares fidelities. With
    independent noise the rate approaches 3p^2 - 2p^3, the classical
    majority-vote failure rate.
    """
    if p < 0 or p > 1:
        raise ValueError(f"flip probability {p} outside [0, 1]")
    if noise == "at-most-one" and p > 1 / 3:
        raise ValueError("at-most-one noise needs p <= 1/3")
    logical = logical if logical is not None else PureState(n=1, amplitudes=[1, 0])
    clean = encode(logical, code)
    failures = 0
    streams = ShotStreams(seed)
    for shot in range(shots):
        rng = streams.stream(shot)
        corrupted = clean
        for q in _sample_flips(p, noise, rng):
            corrupted = apply_error(corrupted, q, code)
        _, corrected = decode_projective(corrupted, code)
        if fidelity(corrected, clean) < 1.0 - ROUNDTRIP_TOL:
            failures += 1
    return {
        "p": p,
        "shots": shots,
        "seed": seed,
        "noise_model": noise,
        "failures": failures,
        "logical_error_rate": failures / shots if shots else 0.0,
        "majority_vote_rate": 3 * p * p - 2 * p ** 3,
    }
