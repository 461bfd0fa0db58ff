"""Request and response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


# -- requests ------------------------------------------------------------------

class RunRequest(BaseModel):
    experiment: dict
    shots: int | None = None
    seed: int | None = None
    mode: str | None = None


class ValidateRequest(BaseModel):
    experiment: dict


class QecRequest(BaseModel):
    kind: str = "bit-flip"
    p: float | None = None
    error: str | None = None
    shots: int = 10000
    seed: int = 0
    noise: str = "independent"


class UsdRequest(BaseModel):
    psi0: dict
    psi1: dict
    true_state: str = "psi0"
    shots: int = 100000
    seed: int = 0
    mode: str = "both"


class ChannelRequest(BaseModel):
    channel: dict
    state: dict


# -- responses -----------------------------------------------------------------

class OutcomeRow(BaseModel):
    label: str
    exact_probability: float | None
    sampled_frequency: float | None
    count: int | None


class MeasurementTable(BaseModel):
    label: str
    outcomes: list[OutcomeRow]


class ExpectationRow(BaseModel):
    label: str
    exact: float | None
    sampled_estimate: float | None
    standard_error: float | None


class DivergenceRow(BaseModel):
    measurement: str
    outcome: str
    exact: float
    frequency: float
    sigma: float


class RunReport(BaseModel):
    qubits: int
    mode: str
    shots: int | None
    seed: int | None
    measurements: list[MeasurementTable]
    expectations: list[ExpectationRow]
    final_state: dict | None
    divergences: list[DivergenceRow]


class CheckRow(BaseModel):
    target: str
    name: str
    deviation: float
    tol: float
    passed: bool
    message: str | None = None


class ValidationReport(BaseModel):
    ok: bool
    checks: list[CheckRow]


class QecRow(BaseModel):
    error: str
    syndrome: str
    fidelity: float


class QecReport(BaseModel):
    kind: str
    mode: str
    seed: int
    rows: list[QecRow] | None = None
    p: float | None = None
    shots: int | None = None
    noise_model: str | None = None
    failures: int | None = None
    logical_error_rate: float | None = None
    majority_vote_rate: float | None = None


class UsdInfo(BaseModel):
    overlap: float
    true_state: str


class UsdReport(RunReport):
    usd: UsdInfo


class ChannelReport(BaseModel):
    qubits: int
    purity: float
    output_density: list[list[list[float]]]


class HealthReport(BaseModel):
    status: str = Field(default="ok")
    version: str
