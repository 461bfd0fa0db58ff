"""Experiment files: parsing, exact evaluation, seeded sampling, reports.

An experiment declares a register, an initial pure state, an ordered list
of stages (circuits, channels, measurements), and a sampling budget.
Exact mode enumerates every measurement branch as an unnormalized density
matrix; sample mode walks one pure-state trajectory per shot, with shot s
drawing from the counter-based stream keyed by (seed, s). Complex numbers
serialize as [re, im] pairs everywhere.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import channels as channels_mod
from . import measure as measure_mod
from .circuit import (
    Circuit,
    Gate,
    Measure,
    circuit_from_dict,
    draw_outcome,
    run as run_circuit,
)
from .errors import ExperimentValidationError, QmeasError, TooManyBranches
from .linalg import embed_operator, sqrt_psd, validate
from .rng import ShotStreams
from .states import PureState, basis_state, bell_state, from_amplitudes, ghz_state, plus_state

DEFAULT_MAX_QUBITS = 12
BRANCH_PROB_TOL = 1e-12
MAX_EXACT_BRANCHES = 1 << 20
DIVERGENCE_SIGMAS = 4.0

MODES = ("exact", "sample", "both")


def max_register() -> int:
    """Register cap, overridable through QMEAS_MAX_QUBITS."""
    raw = os.environ.get("QMEAS_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        return max(1, int(raw))
    except ValueError:
        raise ExperimentValidationError(f"QMEAS_MAX_QUBITS={raw!r} is not an integer")


# ---------------------------------------------------------------------------
# JSON parsing
# ---------------------------------------------------------------------------

def _fail(where: str, message: str):
    raise ExperimentValidationError(f"{where}: {message}")


def _complex_pair(v, where: str) -> complex:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        _fail(where, f"complex entries are [re, im] pairs, got {v!r}")
    try:
        return complex(float(v[0]), float(v[1]))
    except (TypeError, ValueError):
        _fail(where, f"non-numeric complex pair {v!r}")


def vector_from_json(rows, where: str = "vector") -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        _fail(where, "expected a nonempty list of [re, im] pairs")
    return np.array([_complex_pair(v, where) for v in rows], dtype=complex)


def matrix_from_json(rows, where: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        _fail(where, "expected a nonempty list of rows")
    mat = [vector_from_json(r, where) for r in rows]
    widths = {len(r) for r in mat}
    if len(widths) != 1:
        _fail(where, "rows have unequal lengths")
    return np.array(mat, dtype=complex)


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_to_json(m) -> list[list[list[float]]]:
    return [[complex_to_pair(v) for v in row] for row in np.asarray(m, dtype=complex)]


_BELL_NAMES = ("phi+", "phi-", "psi+", "psi-")


def parse_state(spec, where: str = "state") -> PureState:
    """State literal: basis string, amplitude list, or a named preset."""
    if not isinstance(spec, dict):
        _fail(where, f"state literal must be an object, got {spec!r}")
    try:
        if "basis" in spec:
            return basis_state(str(spec["basis"]))
        if "amplitudes" in spec:
            return from_amplitudes(vector_from_json(spec["amplitudes"], where))
        if "bell" in spec:
            return bell_state(str(spec["bell"]))
        if "preset" in spec:
            name = str(spec["preset"])
            if name in _BELL_NAMES:
                return bell_state(name)
            if name == "plus":
                return plus_state()
            if name == "ghz3":
                return ghz_state(3)
            _fail(where, f"unknown preset {name!r}")
    except QmeasError as exc:
        _fail(where, str(exc))
    except ValueError as exc:
        _fail(where, str(exc))
    _fail(where, f"state literal needs basis/amplitudes/bell/preset, got keys {sorted(spec)}")


def parse_measurement(spec, where: str = "measurement"):
    """Measurement literal; returns (kind, object) with kind in
    projective/povm/observable."""
    if not isinstance(spec, dict) or "type" not in spec:
        _fail(where, "measurement literal needs a 'type'")
    kind = spec["type"]
    try:
        if kind == "projective":
            mats = [matrix_from_json(p, where) for p in spec["projectors"]]
            return "projective", measure_mod.ProjectiveMeasurement(
                n=_qubits_of(mats[0], where),
                outcomes=tuple(enumerate(mats)))
        if kind == "povm":
            mats = [matrix_from_json(p, where) for p in spec["effects"]]
            return "povm", measure_mod.Povm(
                n=_qubits_of(mats[0], where), effects=tuple(enumerate(mats)))
        if kind == "observable":
            mat = matrix_from_json(spec["matrix"], where)
            return "observable", measure_mod.observable_from_hermitian(mat)
        if kind == "parity":
            return "projective", measure_mod.parity_measurement(int(spec["n"]))
        if kind == "usd":
            psi0 = parse_state(spec["psi0"], f"{where}.psi0")
            psi1 = parse_state(spec["psi1"], f"{where}.psi1")
            return "povm", measure_mod.usd_povm(psi0, psi1)
    except KeyError as exc:
        _fail(where, f"missing field {exc}")
    except QmeasError as exc:
        _fail(where, str(exc))
    _fail(where, f"unknown measurement type {kind!r}")


def parse_channel(spec, n_total: int, where: str = "channel") -> channels_mod.KrausChannel:
    """Channel literal; embed literals use the experiment register size."""
    if not isinstance(spec, dict) or "type" not in spec:
        _fail(where, "channel literal needs a 'type'")
    kind = spec["type"]
    try:
        if kind == "pauli":
            p = spec["p"]
            if not isinstance(p, list) or len(p) != 4:
                _fail(where, "pauli channel needs p = [p0, p1, p2, p3]")
            return channels_mod.pauli_channel(*[float(v) for v in p])
        if kind == "bitflip":
            return channels_mod.bit_flip(float(spec["p"]))
        if kind == "dephasing":
            return channels_mod.dephasing(float(spec["p"]))
        if kind == "kraus":
            mats = [matrix_from_json(m, where) for m in spec["matrices"]]
            n = _qubits_of(mats[0], where)
            return channels_mod.KrausChannel(n_in=n, n_out=n, kraus=tuple(mats))
        if kind == "embed":
            inner = parse_channel(spec["inner"], n_total, f"{where}.inner")
            targets = [int(t) for t in spec["targets"]]
            return channels_mod.embed(inner, targets, n_total)
    except KeyError as exc:
        _fail(where, f"missing field {exc}")
    except QmeasError as exc:
        _fail(where, str(exc))
    _fail(where, f"unknown channel type {kind!r}")


def _qubits_of(mat: np.ndarray, where: str) -> int:
    d = mat.shape[0]
    if mat.shape != (d, d) or d & (d - 1) or d == 0:
        _fail(where, f"matrix of shape {mat.shape} is not a square power of two")
    return d.bit_length() - 1


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircuitStage:
    circuit: Circuit


@dataclass(frozen=True)
class ChannelStage:
    channel: channels_mod.KrausChannel


@dataclass(frozen=True)
class MeasurementStage:
    """A measurement plus everything the executors need precomputed."""

    label: str
    kind: str
    outcome_names: tuple[str, ...]
    probe: tuple[np.ndarray, ...]
    collapse: tuple[np.ndarray, ...]
    values: tuple[float, ...] | None


def _measurement_stage(label: str, kind: str, obj) -> MeasurementStage:
    if kind == "projective":
        names = tuple(str(y) for y, _ in obj.outcomes)
        probe = tuple(p for _, p in obj.outcomes)
        return MeasurementStage(label, kind, names, probe, probe, None)
    if kind == "povm":
        names = tuple(str(y) for y, _ in obj.effects)
        probe = tuple(m for _, m in obj.effects)
        collapse = tuple(sqrt_psd(m) for m in probe)
        return MeasurementStage(label, kind, names, probe, collapse, None)
    if kind == "observable":
        names = tuple(repr(v) for v, _ in obj.spectral)
        probe = tuple(p for _, p in obj.spectral)
        return MeasurementStage(label, kind, names, probe, probe,
                                tuple(v for v, _ in obj.spectral))
    raise ValueError(f"unknown measurement kind {kind!r}")


Stage = CircuitStage | ChannelStage | MeasurementStage


@dataclass(frozen=True)
class Experiment:
    qubits: int
    initial: PureState
    stages: tuple[Stage, ...]
    shots: int | None
    seed: int
    mode: str


def parse_experiment(doc, shots: int | None = None, seed: int | None = None) -> Experiment:
    """Validate an experiment document, applying optional overrides."""
    if not isinstance(doc, dict):
        raise ExperimentValidationError("experiment must be a JSON object")
    try:
        qubits = int(doc["qubits"])
    except (KeyError, TypeError, ValueError):
        raise ExperimentValidationError("experiment needs an integer 'qubits'")
    cap = max_register()
    if qubits < 1 or qubits > cap:
        raise ExperimentValidationError(
            f"register of {qubits} qubits outside 1..{cap} "
            f"(override the cap with QMEAS_MAX_QUBITS)")
    initial = parse_state(doc.get("initial", {"basis": "0" * qubits}), "initial")
    if initial.n != qubits:
        raise ExperimentValidationError(
            f"initial state has {initial.n} qubits, register has {qubits}")
    mode = str(doc.get("mode", "exact"))
    if mode not in MODES:
        raise ExperimentValidationError(f"mode must be one of {MODES}, got {mode!r}")

    stages: list[Stage] = []
    labels: set[str] = set()
    bit_names: set[str] = set()
    raw_stages = doc.get("stages", [])
    if not isinstance(raw_stages, list):
        raise ExperimentValidationError("'stages' must be a list")
    for i, raw in enumerate(raw_stages):
        where = f"stages[{i}]"
        if not isinstance(raw, dict) or "type" not in raw:
            _fail(where, "stage needs a 'type'")
        kind = raw["type"]
        if kind == "circuit":
            try:
                circ = circuit_from_dict(raw.get("circuit", raw))
            except QmeasError as exc:
                _fail(where, str(exc))
            if circ.n != qubits:
                _fail(where, f"circuit on {circ.n} qubits, register has {qubits}")
            for name in circ.classical_bits:
                if name in bit_names:
                    _fail(where, f"classical bit {name!r} reused across stages")
                bit_names.add(name)
            for op in circ.ops:
                if isinstance(op, Measure):
                    bit_names.add(",".join(op.store))  # reserve the table key
            stages.append(CircuitStage(circuit=circ))
        elif kind == "channel":
            chan = parse_channel(raw.get("channel", raw), qubits, where)
            if chan.n_in != qubits or chan.n_out != qubits:
                _fail(where, f"channel on {chan.n_in} qubits, register has {qubits}")
            stages.append(ChannelStage(channel=chan))
        elif kind == "measurement":
            mkind, obj = parse_measurement(raw.get("measurement", raw), where)
            if obj.n != qubits:
                _fail(where, f"measurement on {obj.n} qubits, register has {qubits}")
            label = str(raw.get("label", f"m{i}"))
            if label in labels or label in bit_names:
                _fail(where, f"measurement label {label!r} reused")
            labels.add(label)
            stages.append(_measurement_stage(label, mkind, obj))
        else:
            _fail(where, f"unknown stage type {kind!r}")

    shots_val = shots if shots is not None else doc.get("shots")
    seed_val = seed if seed is not None else doc.get("seed", 0)
    try:
        seed_val = int(seed_val)
    except (TypeError, ValueError):
        raise ExperimentValidationError(f"seed {seed_val!r} is not an integer")
    if mode in ("sample", "both"):
        try:
            shots_val = int(shots_val)
        except (TypeError, ValueError):
            raise ExperimentValidationError("sampling modes need an integer 'shots'")
        if shots_val < 1:
            raise ExperimentValidationError(f"shots must be >= 1, got {shots_val}")
    else:
        shots_val = None
    return Experiment(qubits=qubits, initial=initial, stages=tuple(stages),
                      shots=shots_val, seed=seed_val, mode=mode)


# ---------------------------------------------------------------------------
# Outcome-table schema shared by the exact and sampled executors
# ---------------------------------------------------------------------------

@dataclass
class _Table:
    label: str
    outcome_names: tuple[str, ...]
    exact: np.ndarray | None = None
    counts: np.ndarray | None = None


def _tables_for(exp: Experiment) -> dict[str, _Table]:
    tables: dict[str, _Table] = {}
    for stage in exp.stages:
        if isinstance(stage, MeasurementStage):
            tables[stage.label] = _Table(stage.label, stage.outcome_names)
        elif isinstance(stage, CircuitStage):
            for op in stage.circuit.ops:
                if isinstance(op, Measure):
                    label = ",".join(op.store)
                    k = len(op.targets)
                    names = tuple(format(y, f"0{k}b") for y in range(1 << k))
                    tables[label] = _Table(label, names)
    return tables


# ---------------------------------------------------------------------------
# Exact executor
# ---------------------------------------------------------------------------

def _circuit_exact_ops(circ: Circuit):
    """Precompute full-register matrices and outcome masks for density runs."""
    ops = []
    idx = np.arange(1 << circ.n)
    for op in circ.ops:
        if isinstance(op, Gate):
            ops.append(("gate", embed_operator(op.matrix, op.targets, circ.n),
                        op.condition))
        else:
            keys = np.zeros(1 << circ.n, dtype=np.int64)
            for t in op.targets:
                keys = (keys << 1) | ((idx >> (circ.n - 1 - t)) & 1)
            masks = [(keys == y).astype(float) for y in range(1 << len(op.targets))]
            ops.append(("measure", masks, op))
    return ops


def _run_exact(exp: Experiment, tables: dict[str, _Table]):
    """Enumerate measurement branches over unnormalized densities."""
    for t in tables.values():
        t.exact = np.zeros(len(t.outcome_names))
    rho0 = np.outer(exp.initial.amplitudes, exp.initial.amplitudes.conj())
    branches: list[tuple[dict[str, int], np.ndarray]] = [({}, rho0)]
    expectations: dict[str, float] = {}
    for stage in exp.stages:
        if isinstance(stage, ChannelStage):
            branches = [
                (bits, sum(k @ rho @ k.conj().T for k in stage.channel.kraus))
                for bits, rho in branches]
        elif isinstance(stage, MeasurementStage):
            if stage.values is not None:
                total = sum(rho for _, rho in branches)
                value = float(sum(
                    v * np.trace(p @ total).real
                    for v, p in zip(stage.values, stage.probe)))
                expectations[stage.label] = value
            table = tables[stage.label]
            split = []
            for bits, rho in branches:
                for j, (probe, collapse) in enumerate(zip(stage.probe, stage.collapse)):
                    p = float(np.trace(probe @ rho).real)
                    if p <= BRANCH_PROB_TOL:
                        continue
                    table.exact[j] += p
                    child = dict(bits)
                    child[stage.label] = j
                    split.append((child, collapse @ rho @ collapse.conj().T))
            branches = split
            if len(branches) > MAX_EXACT_BRANCHES:
                raise TooManyBranches(f"{len(branches)} exact branches")
        else:
            ops = _circuit_exact_ops(stage.circuit)
            updated = []
            for bits, rho in branches:
                local = [(dict(bits), rho)]
                for kind, payload, extra in ops:
                    if kind == "gate":
                        local = [
                            (b, payload @ r @ payload.conj().T
                             if extra is None or extra.evaluate(b) else r)
                            for b, r in local]
                    else:
                        op: Measure = extra
                        table = tables[",".join(op.store)]
                        spawned = []
                        for b, r in local:
                            for y, mask in enumerate(payload):
                                child_rho = r * np.outer(mask, mask)
                                p = float(np.trace(child_rho).real)
                                if p <= BRANCH_PROB_TOL:
                                    continue
                                table.exact[y] += p
                                child = dict(b)
                                k = len(op.targets)
                                for j, name in enumerate(op.store):
                                    child[name] = (y >> (k - 1 - j)) & 1
                                spawned.append((child, child_rho))
                        local = spawned
                updated.extend(local)
            branches = updated
            if len(branches) > MAX_EXACT_BRANCHES:
                raise TooManyBranches(f"{len(branches)} exact branches")
    final = sum(rho for _, rho in branches)
    return expectations, final


# ---------------------------------------------------------------------------
# Sampled executor
# ---------------------------------------------------------------------------

def _run_sampled(exp: Experiment, tables: dict[str, _Table]):
    for t in tables.values():
        t.counts = np.zeros(len(t.outcome_names), dtype=np.int64)
    value_sums: dict[str, list[float]] = {
        s.label: [0.0, 0.0] for s in exp.stages
        if isinstance(s, MeasurementStage) and s.values is not None}
    # stack the per-outcome operators once; the shot loop is pure numpy
    prepared = []
    for stage in exp.stages:
        if isinstance(stage, ChannelStage):
            prepared.append(("channel", stage, np.stack(stage.channel.kraus)))
        elif isinstance(stage, MeasurementStage):
            prepared.append(("measure", stage,
                             (np.stack(stage.probe), np.stack(stage.collapse))))
        else:
            prepared.append(("circuit", stage, None))
    streams = ShotStreams(exp.seed)
    for shot in range(exp.shots):
        rng = streams.stream(shot)
        vec = exp.initial.amplitudes.copy()
        for kind, stage, stacked in prepared:
            if kind == "channel":
                branches = stacked @ vec
                probs = np.einsum("yi,yi->y", branches, branches.conj()).real
                y = draw_outcome(probs, rng)
                vec = branches[y] / math.sqrt(probs[y])
            elif kind == "measure":
                probes, collapses = stacked
                probs = np.einsum("i,yij,j->y", vec.conj(), probes, vec).real
                np.clip(probs, 0.0, None, out=probs)
                y = draw_outcome(probs, rng)
                vec = (collapses[y] @ vec) / math.sqrt(probs[y])
                tables[stage.label].counts[y] += 1
                if stage.values is not None:
                    acc = value_sums[stage.label]
                    acc[0] += stage.values[y]
                    acc[1] += stage.values[y] ** 2
            else:
                record = run_circuit(stage.circuit, PureState(n=exp.qubits, amplitudes=vec), rng)
                vec = record.final_state.amplitudes.copy()
                for op in stage.circuit.ops:
                    if isinstance(op, Measure):
                        y = 0
                        for name in op.store:
                            y = (y << 1) | record.bits[name]
                        tables[",".join(op.store)].counts[y] += 1
    estimates: dict[str, tuple[float, float]] = {}
    for label, (total, total_sq) in value_sums.items():
        mean = total / exp.shots
        var = max(0.0, total_sq / exp.shots - mean * mean)
        stderr = math.sqrt(var / exp.shots)
        estimates[label] = (mean, stderr)
    return estimates


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

def run_experiment(doc, shots: int | None = None, seed: int | None = None) -> dict:
    """Execute an experiment document and return the result report."""
    exp = parse_experiment(doc, shots=shots, seed=seed)
    tables = _tables_for(exp)
    expectations_exact: dict[str, float] = {}
    estimates: dict[str, tuple[float, float]] = {}
    final = None
    if exp.mode in ("exact", "both"):
        expectations_exact, final = _run_exact(exp, tables)
    if exp.mode in ("sample", "both"):
        estimates = _run_sampled(exp, tables)

    measurements = []
    divergences = []
    for t in tables.values():
        rows = []
        for j, name in enumerate(t.outcome_names):
            exact = float(t.exact[j]) if t.exact is not None else None
            count = int(t.counts[j]) if t.counts is not None else None
            freq = count / exp.shots if count is not None else None
            rows.append({
                "label": name,
                "exact_probability": exact,
                "sampled_frequency": freq,
                "count": count,
            })
            if exact is not None and freq is not None:
                sigma = math.sqrt(max(exact * (1.0 - exact), 0.0) / exp.shots)
                off = abs(freq - exact)
                if (sigma == 0.0 and off > 0.0) or (sigma > 0.0 and off > DIVERGENCE_SIGMAS * sigma):
                    divergences.append({
                        "measurement": t.label,
                        "outcome": name,
                        "exact": exact,
                        "frequency": freq,
                        "sigma": sigma,
                    })
        measurements.append({"label": t.label, "outcomes": rows})

    expectation_rows = []
    for stage in exp.stages:
        if isinstance(stage, MeasurementStage) and stage.values is not None:
            est = estimates.get(stage.label)
            expectation_rows.append({
                "label": stage.label,
                "exact": expectations_exact.get(stage.label),
                "sampled_estimate": est[0] if est else None,
                "standard_error": est[1] if est else None,
            })

    final_state = None
    if final is not None:
        final_state = {"density_diagonal": [float(v) for v in np.diag(final).real]}

    return {
        "qubits": exp.qubits,
        "mode": exp.mode,
        "shots": exp.shots,
        "seed": exp.seed if exp.mode in ("sample", "both") else None,
        "measurements": measurements,
        "expectations": expectation_rows,
        "final_state": final_state,
        "divergences": divergences,
    }


# ---------------------------------------------------------------------------
# Structural validation report
# ---------------------------------------------------------------------------

def _check_row(target: str, name: str, deviation: float, tol: float) -> dict:
    return {
        "target": target,
        "name": name,
        "deviation": float(deviation),
        "tol": float(tol),
        "passed": bool(deviation <= tol),
    }


def _component_checks(target: str, build) -> list[dict]:
    """Run a component constructor, mapping failures onto report rows."""
    try:
        build()
        return [_check_row(target, "structure", 0.0, 0.0)]
    except QmeasError as exc:
        row = _check_row(target, "structure", math.inf, 0.0)
        row["message"] = str(exc)
        return [row]


def validate_experiment(doc) -> dict:
    """Structural validation of an experiment document.

    Reports completeness, unitarity, and normalization deviations for
    every stage without executing anything.
    """
    checks: list[dict] = []
    try:
        qubits = int(doc["qubits"])
        cap = max_register()
        checks.append(_check_row("qubits", "register cap",
                                 max(0, qubits - cap), 0.0))
    except (KeyError, TypeError, ValueError):
        row = _check_row("qubits", "structure", math.inf, 0.0)
        row["message"] = "experiment needs an integer 'qubits'"
        return {"ok": False, "checks": [row]}

    checks += _component_checks("initial", lambda: parse_state(
        doc.get("initial", {"basis": "0" * qubits}), "initial"))

    raw_stages = doc.get("stages", [])
    if not isinstance(raw_stages, list):
        row = _check_row("stages", "structure", math.inf, 0.0)
        row["message"] = "'stages' must be a list"
        return {"ok": False, "checks": checks + [row]}

    for i, raw in enumerate(raw_stages):
        where = f"stages[{i}]"
        kind = raw.get("type") if isinstance(raw, dict) else None
        if kind == "measurement":
            spec = raw.get("measurement", raw)
            checks += _measurement_checks(where, spec, qubits)
        elif kind == "channel":
            spec = raw.get("channel", raw)
            checks += _channel_checks(where, spec, qubits)
        elif kind == "circuit":
            spec = raw.get("circuit", raw)
            checks += _circuit_checks(where, spec)
        else:
            row = _check_row(where, "structure", math.inf, 0.0)
            row["message"] = f"unknown stage type {kind!r}"
            checks.append(row)

    checks += _component_checks("experiment", lambda: parse_experiment(doc))
    return {"ok": all(c["passed"] for c in checks), "checks": checks}


def _measurement_checks(where: str, spec, qubits: int) -> list[dict]:
    rows: list[dict] = []
    tol = 1e-10
    if isinstance(spec, dict) and spec.get("type") in ("projective", "povm"):
        key = "projectors" if spec["type"] == "projective" else "effects"
        try:
            mats = [matrix_from_json(m, where) for m in spec.get(key, [])]
        except QmeasError as exc:
            row = _check_row(where, "structure", math.inf, 0.0)
            row["message"] = str(exc)
            return [row]
        if mats:
            d = mats[0].shape[0]
            total = np.zeros((d, d), dtype=complex)
            for j, m in enumerate(mats):
                kind = "projector" if spec["type"] == "projective" else "psd"
                for c in validate(m, kind, tol).checks:
                    rows.append(_check_row(f"{where}.{key}[{j}]", c.name, c.deviation, c.tol))
                total += m
            dev = float(np.max(np.abs(total - np.eye(d))))
            rows.append(_check_row(where, "completeness", dev, tol))
            return rows
    if isinstance(spec, dict) and spec.get("type") == "observable":
        try:
            mat = matrix_from_json(spec.get("matrix"), where)
        except QmeasError as exc:
            row = _check_row(where, "structure", math.inf, 0.0)
            row["message"] = str(exc)
            return [row]
        for c in validate(mat, "hermitian", tol).checks:
            rows.append(_check_row(where, c.name, c.deviation, c.tol))
        return rows
    return _component_checks(where, lambda: parse_measurement(spec, where))


def _channel_checks(where: str, spec, qubits: int) -> list[dict]:
    tol = 1e-10
    if isinstance(spec, dict) and spec.get("type") == "kraus":
        try:
            mats = [matrix_from_json(m, where) for m in spec.get("matrices", [])]
        except QmeasError as exc:
            row = _check_row(where, "structure", math.inf, 0.0)
            row["message"] = str(exc)
            return [row]
        if mats:
            d = mats[0].shape[1]
            total = np.zeros((d, d), dtype=complex)
            for m in mats:
                total += m.conj().T @ m
            dev = float(np.max(np.abs(total - np.eye(d))))
            return [_check_row(where, "completeness", dev, tol)]
    return _component_checks(where, lambda: parse_channel(spec, qubits, where))


def _circuit_checks(where: str, spec) -> list[dict]:
    rows: list[dict] = []
    tol = 1e-10
    ops = spec.get("ops", []) if isinstance(spec, dict) else []
    for j, entry in enumerate(ops):
        if isinstance(entry, dict) and "unitary" in entry:
            try:
                mat = matrix_from_json(entry["unitary"], f"{where}.ops[{j}]")
            except QmeasError as exc:
                row = _check_row(f"{where}.ops[{j}]", "structure", math.inf, 0.0)
                row["message"] = str(exc)
                rows.append(row)
                continue
            for c in validate(mat, "unitary", tol).checks:
                rows.append(_check_row(f"{where}.ops[{j}]", c.name, c.deviation, c.tol))
    rows += _component_checks(where, lambda: circuit_from_dict(spec))
    return rows
