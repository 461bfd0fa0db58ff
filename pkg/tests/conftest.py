"""Shared randomized fixtures. Everything is seeded for reproducibility."""

import numpy as np
import pytest

from qmeas.states import DensityState, PureState


def random_state(n: int, rng: np.random.Generator) -> PureState:
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return PureState(n=n, amplitudes=vec / np.linalg.norm(vec))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    # fix the phase ambiguity of QR so the distribution is Haar
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_orthonormal_basis(dim: int, rng: np.random.Generator) -> list[np.ndarray]:
    u = random_unitary(dim, rng)
    return [u[:, k] for k in range(dim)]


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_density(n: int, rng: np.random.Generator) -> DensityState:
    d = 1 << n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return DensityState(n=n, rho=rho / np.trace(rho).real)


def random_psd(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a.conj().T @ a


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)
