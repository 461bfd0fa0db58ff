"""Simulation of generalized quantum measurements and channels.

Core surface: dense linear algebra (``linalg``), states (``states``),
projective/POVM measurements and observables (``measure``), Kraus
channels (``channels``), a gate-level circuit simulator (``circuit``),
the three-qubit repetition code (``qec``), experiment files
(``experiments``), plus an HTTP service (``service``) and a CLI.
"""

from . import channels, circuit, errors, experiments, linalg, measure, qec, rng, states

__all__ = [
    "channels",
    "circuit",
    "errors",
    "experiments",
    "linalg",
    "measure",
    "qec",
    "rng",
    "states",
]
