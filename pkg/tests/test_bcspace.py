import numpy as np
import pytest

import qgraph
from qgraph import (
    AntiLinearSymmetry,
    BoundaryConditionError,
    BoundaryConditions,
    SectorialPair,
    adjoint,
    adjoint_subspace,
    cayley,
    check_antilinear_symmetry,
    classify,
    dim_M,
    equivalent,
    from_cayley,
    is_regular,
    is_self_adjoint,
    m_sectorial,
    projector_distance,
    projector_onto_M,
    regularize,
)
from qgraph.presets import (
    delta_local,
    empty_spectrum_pair,
    gsgnsgn_pair,
    intermediate_pair,
    residual_example_sectorial,
    sgnsgn_pair,
    standard_local,
    tau_pair,
)

from conftest import random_bc, random_selfadjoint_bc


# ---------------------------------------------------------------------------
# dim M
# ---------------------------------------------------------------------------

def test_dim_M_dirichlet():
    assert dim_M(qgraph.dirichlet(2)) == 2


def test_dim_M_sgnsgn():
    assert dim_M(sgnsgn_pair()) == 2


def test_dim_M_zero_pair():
    assert dim_M(BoundaryConditions(np.zeros((2, 2)), np.zeros((2, 2)))) == 4


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------

def test_sgnsgn_irregular():
    res = is_regular(sgnsgn_pair())
    assert not res.regular


def test_tau_quarter_pi_regular():
    res = is_regular(tau_pair(np.pi / 4))
    assert res.regular
    assert res.witness_k is not None


def test_gsgnsgn_regular_iff_unbalanced():
    assert not is_regular(gsgnsgn_pair(2, 2)).regular
    assert not is_regular(gsgnsgn_pair(1, 1)).regular
    assert is_regular(gsgnsgn_pair(2, 1)).regular
    assert is_regular(gsgnsgn_pair(3, 1)).regular


def test_regularity_requires_dim_d():
    with pytest.raises(BoundaryConditionError):
        is_regular(BoundaryConditions(np.zeros((2, 2)), np.zeros((2, 2))))


# ---------------------------------------------------------------------------
# self-adjointness
# ---------------------------------------------------------------------------

def test_dirichlet_self_adjoint():
    assert is_self_adjoint(qgraph.dirichlet(3))


def test_tau_not_self_adjoint():
    assert not is_self_adjoint(tau_pair(np.pi / 4))
    assert is_self_adjoint(tau_pair(0.0))


def test_standard_self_adjoint():
    assert is_self_adjoint(standard_local(4))


# ---------------------------------------------------------------------------
# Cayley transform
# ---------------------------------------------------------------------------

def test_cayley_tau_closed_form():
    tau = 0.3
    for k in (1.0, 2j, 0.7 + 0.2j):
        S = cayley(tau_pair(tau), k)
        expect = (1 / np.cos(tau)) * np.array(
            [[1j * np.sin(tau), 1.0], [1.0, -1j * np.sin(tau)]]
        )
        assert np.abs(S - expect).max() < 1e-12


def test_cayley_standard_vertex():
    for nu in (2, 3, 5):
        S = cayley(standard_local(nu), 1.3j)
        expect = 2.0 / nu - np.eye(nu)
        assert np.abs(S - expect).max() < 1e-12


def test_cayley_dirichlet_neumann():
    assert np.abs(cayley(qgraph.dirichlet(3), 2.0) + np.eye(3)).max() < 1e-14
    assert np.abs(cayley(qgraph.neumann(3), 2.0) - np.eye(3)).max() < 1e-14


def test_cayley_singular_raises():
    with pytest.raises(BoundaryConditionError):
        cayley(sgnsgn_pair(), 1j)


def test_from_cayley_minus_one_is_dirichlet():
    bc = from_cayley(-np.eye(2), 0.7)
    assert equivalent(bc, qgraph.dirichlet(2))


def test_from_cayley_plus_one_is_neumann():
    bc = from_cayley(np.eye(2), 1j)
    assert equivalent(bc, qgraph.neumann(2))


def test_from_cayley_tau_round_trip():
    tau = 0.45
    S = cayley(tau_pair(tau), 1j)
    bc = from_cayley(S, 1j)
    assert projector_distance(bc, tau_pair(tau)) < 1e-12


def test_cayley_round_trip_random(rng):
    for _ in range(25):
        d = rng.integers(1, 5)
        bc = random_bc(rng, d)
        k = complex(rng.uniform(0.3, 2), rng.uniform(0.2, 2))
        S = cayley(bc, k)
        assert projector_distance(from_cayley(S, k), bc) < 1e-9


# ---------------------------------------------------------------------------
# adjoints
# ---------------------------------------------------------------------------

def test_adjoint_dirichlet_is_itself():
    bc = qgraph.dirichlet(2)
    assert projector_distance(adjoint(bc), bc) < 1e-12


def test_adjoint_of_sectorial_conjugates_L(rng):
    P = np.zeros((3, 3))
    L = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    bc = SectorialPair(P, L).boundary_conditions()
    expected = SectorialPair(P, L.conj().T).boundary_conditions()
    assert projector_distance(adjoint(bc), expected) < 1e-10


def test_adjoint_residual_example_matches_listed_conditions():
    bc = residual_example_sectorial().boundary_conditions()
    L = residual_example_sectorial().L
    expected = SectorialPair(np.zeros((3, 3)), L.conj().T).boundary_conditions()
    assert projector_distance(adjoint(bc), expected) < 1e-10


def test_adjoint_dimension_sum(rng):
    for _ in range(20):
        d = int(rng.integers(1, 4))
        bc = random_bc(rng, d)
        n = dim_M(bc)
        assert n + adjoint_subspace(bc).shape[1] == 2 * d
    # degenerate inputs as well
    z = BoundaryConditions(np.zeros((2, 2)), np.zeros((2, 2)))
    assert dim_M(z) + adjoint_subspace(z).shape[1] == 4


def test_adjoint_involution(rng):
    for _ in range(12):
        bc = random_bc(rng, 3)
        assert projector_distance(adjoint(adjoint(bc)), bc) < 1e-9


def test_adjoint_irregular_subspace_path():
    bc = sgnsgn_pair()
    adj = adjoint(bc)
    assert dim_M(adj) == 2
    # M* = (J M)^perp, checked through the projector identity
    d = 2
    J = np.block([[np.zeros((d, d)), np.eye(d)], [-np.eye(d), np.zeros((d, d))]])
    M = qgraph.bcspace.subspace_M(bc)
    Mstar = qgraph.bcspace.subspace_M(adj)
    assert np.abs((J @ M).conj().T @ Mstar).max() < 1e-12


# ---------------------------------------------------------------------------
# m-sectorial parametrization
# ---------------------------------------------------------------------------

def test_complex_delta_sectorial_formula():
    for m in (2, 3, 5):
        for gamma in (1.0, -2.0, 0.5 + 1.5j):
            pair = m_sectorial(delta_local(m, gamma))
            assert pair is not None
            Pperp = np.full((m, m), 1.0 / m)
            assert np.abs(pair.L + (gamma / m) * Pperp).max() < 1e-10
            assert np.abs(pair.P - (np.eye(m) - Pperp)).max() < 1e-10


def test_tau_not_sectorial():
    for tau in (0.2, 1.0, np.pi / 2):
        assert m_sectorial(tau_pair(tau)) is None
    assert m_sectorial(tau_pair(0.0)) is not None  # Kirchhoff is sectorial


def test_tau_qap_matrix():
    # Q A Pperp has the listed closed form for tau in (0, pi/2]
    tau = 0.7
    bc = tau_pair(tau)
    Q = np.eye(2) - qgraph.bcspace.orth_projector(bc.B)
    Pperp = qgraph.bcspace.orth_projector(bc.B.conj().T)
    got = Q @ bc.A @ Pperp
    expect = 0.5 * np.array(
        [[1 - np.exp(2j * tau), np.exp(-1j * tau) - np.exp(1j * tau)], [0, 0]]
    )
    assert np.abs(got - expect).max() < 1e-12


def test_intermediate_not_sectorial():
    bc = intermediate_pair()
    assert m_sectorial(bc) is None
    Q = np.eye(2) - qgraph.bcspace.orth_projector(bc.B)
    Pperp = qgraph.bcspace.orth_projector(bc.B.conj().T)
    assert np.abs(Q @ bc.A @ Pperp - np.diag([1.0, 0.0])).max() < 1e-12


def test_sectorial_pair_reproduces_subspace(rng):
    for _ in range(10):
        d = 4
        q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        P = q[:, :2] @ q[:, :2].conj().T
        Pp = np.eye(d) - P
        L = Pp @ (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) @ Pp
        bc = SectorialPair(P, L).boundary_conditions()
        pair = m_sectorial(bc)
        assert pair is not None
        assert projector_distance(pair.boundary_conditions(), bc) < 1e-9


# ---------------------------------------------------------------------------
# projectors and distances
# ---------------------------------------------------------------------------

def test_projector_dirichlet_neumann_blocks():
    P_dir = projector_onto_M(qgraph.dirichlet(2))
    assert np.abs(P_dir - np.diag([0, 0, 1, 1])).max() < 1e-14
    P_neu = projector_onto_M(qgraph.neumann(2))
    assert np.abs(P_neu - np.diag([1, 1, 0, 0])).max() < 1e-14


def test_projector_distance_examples(rng):
    bc = tau_pair(0.3)
    assert projector_distance(bc, bc) == 0.0
    C = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    scaled = BoundaryConditions(C @ bc.A, C @ bc.B)
    assert projector_distance(bc, scaled) < 1e-12
    assert abs(projector_distance(qgraph.dirichlet(2), qgraph.neumann(2)) - 1.0) < 1e-12
    assert projector_distance(tau_pair(0.0), tau_pair(0.3)) > 1e-3


def test_projector_distance_dim_mismatch():
    with pytest.raises(BoundaryConditionError):
        projector_distance(
            qgraph.dirichlet(2), BoundaryConditions(np.zeros((2, 2)), np.zeros((2, 2)))
        )


def test_projector_is_hermitian_idempotent_rank_d(rng):
    bc = random_bc(rng, 3)
    P = projector_onto_M(bc)
    assert np.abs(P - P.conj().T).max() < 1e-12
    assert np.abs(P @ P - P).max() < 1e-11
    assert abs(np.trace(P).real - 3) < 1e-9


# ---------------------------------------------------------------------------
# regularization
# ---------------------------------------------------------------------------

def test_regularize_sgnsgn():
    out = regularize(sgnsgn_pair(), 0.1)
    assert is_regular(out).regular


def test_regularize_keeps_regular(rng):
    bc = tau_pair(0.4)
    for eps in (1.0, 0.01, 1e-6):
        assert is_regular(regularize(bc, eps)).regular


def test_regularize_distance_decreases_to_zero():
    bc = sgnsgn_pair()
    dists = []
    for l in range(1, 101):
        out = regularize(bc, 1.0 / l)
        dists.append(projector_distance(out, bc))
    assert all(b < a + 1e-15 for a, b in zip(dists, dists[1:]))
    assert dists[-1] < 2e-2
    assert dists[-1] < dists[0] / 10


def test_regularize_random_inputs(rng):
    for _ in range(20):
        bc = random_bc(rng, 3)
        assert is_regular(regularize(bc, 0.05)).regular


# ---------------------------------------------------------------------------
# antilinear symmetries
# ---------------------------------------------------------------------------

def test_complex_delta_T_self_adjoint():
    for gamma in (2.0, 1.0 - 3.0j, 0.3j):
        bc = delta_local(3, gamma)
        assert check_antilinear_symmetry(bc, AntiLinearSymmetry(np.eye(3)), 2.0)


def test_dirichlet_T_self_adjoint():
    assert check_antilinear_symmetry(qgraph.dirichlet(2), AntiLinearSymmetry(np.eye(2)), 1.0)


def test_asymmetric_cayley_not_T_self_adjoint():
    S = np.array([[0.5, 1.0], [0.0, -0.5]])  # S^T != S
    bc = from_cayley(S, 1j)
    assert not check_antilinear_symmetry(bc, AntiLinearSymmetry(np.eye(2)), 1.0)


def test_nontrivial_symmetry_matrix(rng):
    # S = M + C M^T C^{-1} with symmetric C satisfies C S^T C^{-1} = S,
    # so the model is J-self-adjoint for the edge swap but not for C = 1
    C = np.array([[0.0, 1.0], [1.0, 0.0]])
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    S = M + C @ M.T @ np.linalg.inv(C)
    bc = from_cayley(S, 1j)
    assert check_antilinear_symmetry(bc, AntiLinearSymmetry(C), 1.0)
    assert not check_antilinear_symmetry(bc, AntiLinearSymmetry(np.eye(2)), 1.0)


# ---------------------------------------------------------------------------
# property suites
# ---------------------------------------------------------------------------

def test_self_adjoint_cayley_unitary(rng):
    for _ in range(20):
        d = int(rng.integers(1, 5))
        bc = random_selfadjoint_bc(rng, d, k=float(rng.uniform(0.5, 2)))
        k = float(rng.uniform(0.3, 3.0))
        S = cayley(bc, k)
        assert np.abs(S @ S.conj().T - np.eye(d)).max() < 1e-9


def test_classification_whole_plane_flag():
    cls = classify(BoundaryConditions(np.zeros((2, 2)), np.zeros((2, 2))))
    assert cls.spectrum_is_whole_plane and cls.dim_M == 4
    cls2 = classify(sgnsgn_pair())
    assert not cls2.spectrum_is_whole_plane and cls2.irregular_dim_d


def test_classification_of_presets():
    assert classify(tau_pair(0.3)).regular
    assert not classify(tau_pair(np.pi / 2)).regular
    assert classify(empty_spectrum_pair()).irregular_dim_d
    assert classify(standard_local(3)).self_adjoint
    assert classify(delta_local(3, 1 + 1j)).m_sectorial
    assert classify(delta_local(3, 1 + 1j)).t_self_adjoint
