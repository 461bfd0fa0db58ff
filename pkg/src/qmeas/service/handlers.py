"""Service operations shared by the HTTP endpoints and the in-process CLI.

Each handler takes the already-decoded request payload as a dict and
returns a JSON-ready dict, raising ExperimentValidationError for bad
inputs so both transports map errors the same way.
"""

from __future__ import annotations

import numpy as np

from .. import channels as channels_mod
from .. import qec as qec_mod
from ..errors import ExperimentValidationError, QmeasError
from ..experiments import (
    matrix_to_json,
    parse_channel,
    parse_state,
    run_experiment,
    validate_experiment,
)
from ..rng import seeded_rng
from ..states import PureState, fidelity, purity, to_density


def handle_run(payload: dict) -> dict:
    doc = payload.get("experiment")
    if not isinstance(doc, dict):
        raise ExperimentValidationError("request needs an 'experiment' object")
    mode = payload.get("mode")
    if mode is not None:
        doc = {**doc, "mode": mode}
    return run_experiment(doc, shots=payload.get("shots"), seed=payload.get("seed"))


def handle_validate(payload: dict) -> dict:
    doc = payload.get("experiment")
    if not isinstance(doc, dict):
        raise ExperimentValidationError("request needs an 'experiment' object")
    return validate_experiment(doc)


_ERROR_NAMES = {None: "none", 0: "flip0", 1: "flip1", 2: "flip2"}


def _random_logical(seed: int) -> PureState:
    rng = seeded_rng(seed)
    vec = rng.normal(size=2) + 1j * rng.normal(size=2)
    return PureState(n=1, amplitudes=vec / np.linalg.norm(vec))


def handle_qec(payload: dict) -> dict:
    kind = payload.get("kind", "bit-flip")
    seed = int(payload.get("seed", 0))
    try:
        code = qec_mod.RepetitionCode(kind=kind)
    except QmeasError as exc:
        raise ExperimentValidationError(str(exc))
    p = payload.get("p")
    if p is not None:
        try:
            result = qec_mod.logical_error_rate(
                code, float(p), int(payload.get("shots", 10000)), seed,
                noise=payload.get("noise", "independent"))
        except (QmeasError, ValueError) as exc:
            raise ExperimentValidationError(str(exc))
        return {"kind": kind, "mode": "monte_carlo", **result}

    selector = payload.get("error")
    if selector in (None, "all"):
        cases = [None, 0, 1, 2]
    elif str(selector) == "none":
        cases = [None]
    elif str(selector) in ("0", "1", "2"):
        cases = [int(selector)]
    else:
        raise ExperimentValidationError(f"error selector must be none/0/1/2, got {selector!r}")

    logical = _random_logical(seed)
    clean = qec_mod.encode(logical, code)
    rows = []
    for case in cases:
        corrupted = qec_mod.apply_error(clean, case, code)
        syndrome, corrected = qec_mod.decode_projective(corrupted, code)
        rows.append({
            "error": _ERROR_NAMES[case],
            "syndrome": f"{syndrome[0]}{syndrome[1]}",
            "fidelity": fidelity(corrected, clean),
        })
    return {"kind": kind, "mode": "deterministic", "seed": seed, "rows": rows}


def handle_usd(payload: dict) -> dict:
    for key in ("psi0", "psi1"):
        if not isinstance(payload.get(key), dict):
            raise ExperimentValidationError(f"request needs a state literal {key!r}")
    true_state = payload.get("true_state", "psi0")
    if true_state not in ("psi0", "psi1"):
        raise ExperimentValidationError(f"true_state must be psi0 or psi1, got {true_state!r}")
    psi0 = parse_state(payload["psi0"], "psi0")
    psi1 = parse_state(payload["psi1"], "psi1")
    overlap = float(abs(np.vdot(psi0.amplitudes, psi1.amplitudes)))
    doc = {
        "qubits": psi0.n,
        "initial": payload[true_state],
        "stages": [{
            "type": "measurement",
            "label": "usd",
            "measurement": {"type": "usd", "psi0": payload["psi0"], "psi1": payload["psi1"]},
        }],
        "shots": int(payload.get("shots", 100000)),
        "seed": int(payload.get("seed", 0)),
        "mode": payload.get("mode", "both"),
    }
    report = run_experiment(doc)
    report["usd"] = {"overlap": overlap, "true_state": true_state}
    return report


def handle_channel(payload: dict) -> dict:
    if not isinstance(payload.get("state"), dict) or not isinstance(payload.get("channel"), dict):
        raise ExperimentValidationError("request needs 'channel' and 'state' objects")
    psi = parse_state(payload["state"], "state")
    channel = parse_channel(payload["channel"], psi.n, "channel")
    if channel.n_in != psi.n:
        raise ExperimentValidationError(
            f"channel input is {channel.n_in} qubits, state has {psi.n}")
    out = channels_mod.apply(channel, to_density(psi))
    return {
        "qubits": out.n,
        "purity": purity(out),
        "output_density": matrix_to_json(out.rho),
    }
