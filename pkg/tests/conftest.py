"""Shared helpers: seeded random boundary-condition generators."""

import numpy as np
import pytest

from qgraph import BoundaryConditions, from_cayley


def random_bc(rng, d) -> BoundaryConditions:
    """Generic complex pair; almost surely dim M = d and regular."""
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return BoundaryConditions(A, B)


def random_unitary(rng, d) -> np.ndarray:
    M = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(M)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_selfadjoint_bc(rng, d, k: float = 1.0) -> BoundaryConditions:
    """Pair with AB* = BA* built from a Haar-ish unitary at real k."""
    return from_cayley(random_unitary(rng, d), k)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
