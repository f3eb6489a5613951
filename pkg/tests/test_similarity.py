import math

import numpy as np
import pytest

import qgraph
from qgraph import (
    BlockTransform,
    BoundaryConditions,
    Region,
    SecularSystem,
    SimilarityError,
    cayley,
    decouple_symmetric_graph,
    find_eigenvalues,
    find_similarity_to_selfadjoint,
    from_cayley,
    metric_operator,
    projector_distance,
    verify_similarity,
)
from qgraph.presets import (
    assemble_local_bc,
    build_preset,
    gsgnsgn_pair,
    scaled_delta_pair,
    sgnsgn_pair,
    standard_local,
    tau_pair,
)


# ---------------------------------------------------------------------------
# verify_similarity
# ---------------------------------------------------------------------------

def test_identity_transform_trivial_certificate():
    g = qgraph.star_graph(2)
    bc = tau_pair(0.3)
    cert = verify_similarity(g, bc, bc, BlockTransform(np.eye(2), np.zeros((0, 0))))
    assert cert.residual < 1e-12
    assert not cert.target_self_adjoint


def test_tau_conjugation_to_kirchhoff():
    # S_tau = (Q G_tau)^{-1} S_0 (Q G_tau): conjugating the Kirchhoff pair by
    # G = Q G_tau lands on the tau pair
    tau = 0.35
    g = qgraph.star_graph(2)
    Q = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
    G_tau = (1j / math.sqrt(2 * math.cos(tau))) * np.array(
        [[-np.exp(1j * tau), -1.0], [-np.exp(-1j * tau), 1.0]]
    )
    G = Q @ G_tau
    kirchhoff = standard_local(2)
    cert = verify_similarity(
        g, kirchhoff, tau_pair(tau), BlockTransform(G, np.zeros((0, 0)))
    )
    assert cert.residual < 1e-10
    assert not cert.target_self_adjoint

    # and the inverse transform carries the tau pair to Kirchhoff
    cert2 = verify_similarity(
        g, tau_pair(tau), kirchhoff,
        BlockTransform(np.linalg.inv(G), np.zeros((0, 0))),
    )
    assert cert2.residual < 1e-10
    assert cert2.target_self_adjoint
    assert cert2.metric_matrix is not None


def test_gsgnsgn_diagonalization():
    g = qgraph.star_graph(3)
    bc = gsgnsgn_pair(2, 1)
    G = np.array([[1, -1, 1], [1, 1, 0], [1, 0, 1]], dtype=complex)
    lam = np.diag([1.0, -1.0, -1.0]).astype(complex)
    S = cayley(bc, 2j)
    assert np.abs(S - G @ lam @ np.linalg.inv(G)).max() < 1e-12
    target = from_cayley(lam, 2j)
    cert = verify_similarity(g, bc, target, BlockTransform(G, np.zeros((0, 0))))
    assert cert.residual < 1e-10
    assert cert.target_self_adjoint


def test_verify_requires_equal_lengths():
    g = qgraph.metric_graph(
        ["a", "b"], internal_edges=[("a", "b", 1.0), ("a", "b", 2.0)]
    )
    bc = qgraph.dirichlet(4)
    with pytest.raises(SimilarityError):
        verify_similarity(g, bc, bc, BlockTransform(np.zeros((0, 0)), np.eye(2)))


def test_verify_rejects_wrong_target(rng):
    g = qgraph.star_graph(2)
    with pytest.raises(SimilarityError):
        verify_similarity(
            g, tau_pair(0.3), tau_pair(0.7), BlockTransform(np.eye(2), np.zeros((0, 0)))
        )


# ---------------------------------------------------------------------------
# find_similarity_to_selfadjoint
# ---------------------------------------------------------------------------

def test_tau_certificate_with_closed_form_metric():
    tau = 0.3
    g, bc, _ = build_preset("tau", {"tau": tau})
    cert = find_similarity_to_selfadjoint(g, bc)
    assert cert is not None
    assert cert.target_self_adjoint
    expect = (1 / math.cos(tau)) * np.array(
        [[1.0, 1j * math.sin(tau)], [-1j * math.sin(tau), 1.0]]
    )
    assert np.abs(cert.metric_matrix - expect).max() < 1e-10
    assert cert.quasi_self_adjoint_residual < 1e-10
    assert not cert.single_k
    # target is Kirchhoff
    assert projector_distance(cert.target_bc, standard_local(2)) < 1e-10


def test_tau_family_certificates():
    g = qgraph.star_graph(2)
    for tau in (0.0, 0.5, 1.0, 1.4):
        cert = find_similarity_to_selfadjoint(g, tau_pair(tau))
        assert cert is not None
    with pytest.raises(SimilarityError):
        find_similarity_to_selfadjoint(g, tau_pair(math.pi / 2))  # irregular


def test_scaled_delta_certificate_and_spectrum():
    g, bc, _ = build_preset("scaled_delta")
    cert = find_similarity_to_selfadjoint(g, bc)
    assert cert is not None and cert.target_self_adjoint
    # diagonal metric from the diag(2, 4) scaling
    off = cert.metric_matrix - np.diag(np.diag(cert.metric_matrix))
    assert np.abs(off).max() < 1e-10
    assert cert.quasi_self_adjoint_residual < 1e-10
    pts = find_eigenvalues(SecularSystem(g, bc), Region.quadrant(3.0, 3.0))
    assert len(pts) == 1
    assert abs(pts[0].lam - (-1.0)) < 1e-8
    # continuous spectrum [0, inf) plus that isolated point
    assert qgraph.essential_spectrum(qgraph.classify(bc), g) == "half_line"


def test_metric_operator_pair_properties():
    g, bc, _ = build_preset("tau", {"tau": 0.8})
    cert = find_similarity_to_selfadjoint(g, bc)
    theta, theta_inv = metric_operator(cert)
    d = theta.shape[0]
    assert np.abs(theta @ theta_inv - np.eye(d)).max() < 1e-10
    assert np.linalg.eigvalsh(theta).min() > 0
    assert np.linalg.eigvalsh(theta_inv).min() > 0
    assert np.abs(theta - theta.conj().T).max() < 1e-12
    # matrix-level quasi-self-adjointness at the certificate wavenumber
    S = cayley(bc, cert.k_used)
    assert np.abs(S.conj().T - theta_inv @ S @ theta).max() < 1e-10


def test_metric_requires_self_adjoint_target():
    g = qgraph.star_graph(2)
    bc = tau_pair(0.3)
    cert = verify_similarity(g, bc, bc, BlockTransform(np.eye(2), np.zeros((0, 0))))
    with pytest.raises(SimilarityError):
        metric_operator(cert)


def test_self_adjoint_input_identity_metric():
    g, bc, _ = build_preset("standard", {"edges": 3})
    cert = find_similarity_to_selfadjoint(g, bc)
    assert cert is not None
    assert np.abs(cert.metric_matrix - np.eye(3)).max() < 1e-9


def test_non_similar_input_returns_none():
    # complex delta coupling: T-self-adjoint but complex eigenvalues of S
    g, bc, _ = build_preset("delta", {"gamma": [0.0, 2.0], "edges": 3})
    cert = find_similarity_to_selfadjoint(g, bc)
    assert cert is None
    reason = find_similarity_to_selfadjoint.last_diagnostic["reason"]
    assert "non-real" in reason


def test_eigenvalue_multisets_match_compact_tau_star():
    # two-edge compact star, tau at the center, Dirichlet at the pendants:
    # similar to the Kirchhoff-center version for tau < pi/2
    tau = 0.6
    g = qgraph.compact_star(2, 1.0)
    dirichlet_end = BoundaryConditions(np.eye(1), np.zeros((1, 1)))
    bc_tau = assemble_local_bc(
        g, {"c": tau_pair(tau), "p0": dirichlet_end, "p1": dirichlet_end}
    )
    bc_kirch = assemble_local_bc(
        g, {"c": standard_local(2), "p0": dirichlet_end, "p1": dirichlet_end}
    )
    region = Region.quadrant(8.0, 2.0)
    pts_tau = find_eigenvalues(SecularSystem(g, bc_tau), region)
    pts_kirch = find_eigenvalues(SecularSystem(g, bc_kirch), region)
    assert len(pts_tau) == len(pts_kirch)
    for p, q in zip(pts_tau, pts_kirch):
        assert abs(p.k - q.k) < 1e-8
        assert p.geometric_multiplicity == q.geometric_multiplicity


# ---------------------------------------------------------------------------
# decoupling
# ---------------------------------------------------------------------------

def test_decouple_compact_star():
    g = qgraph.compact_star(3, 1.0)
    dec = decouple_symmetric_graph(g, standard_local(3), endpoint_condition=(1.0, 0.0))
    labels = sorted((p.labels, p.count) for p in dec.problems)
    assert labels == [
        (("dirichlet", "dirichlet"), 2),
        (("neumann", "dirichlet"), 1),
    ]
    got = dec.eigenvalue_multiset(5.2 * math.pi)
    direct = find_eigenvalues(
        SecularSystem(g, build_preset("star", {"edges": 3})[1]),
        Region.quadrant(5.2 * math.pi, 1.5),
    )
    direct_ms = [(p.k.real, p.geometric_multiplicity) for p in direct]
    assert len(got) == len(direct_ms)
    for (k1, m1), (k2, m2) in zip(got, direct_ms):
        assert abs(k1 - k2) < 1e-8
        assert m1 == m2
    assert dec.zero_mode_count() == 0


def test_decouple_tau_loop_is_circle():
    # two-edge loop with the tau interaction at both vertices: the circle of
    # arc length 2a, eigenvalues (n pi / a)^2 twice plus a simple zero mode
    g = qgraph.loop_graph(2, 1.0)
    dec = decouple_symmetric_graph(g, tau_pair(0.3))
    labels = sorted((p.labels, p.count) for p in dec.problems)
    assert labels == [
        (("dirichlet", "dirichlet"), 1),
        (("neumann", "neumann"), 1),
    ]
    assert dec.zero_mode_count() == 1
    ms = dec.eigenvalue_multiset(3.5 * math.pi)
    assert [(round(k / math.pi, 9), c) for k, c in ms] == [(1.0, 2), (2.0, 2), (3.0, 2)]
    # direct solver on the loop graph agrees
    bc = assemble_local_bc(g, {"v0": tau_pair(0.3), "v1": tau_pair(0.3)})
    sys_ = SecularSystem(g, bc)
    pts = find_eigenvalues(sys_, Region.quadrant(3.5 * math.pi, 1.5))
    assert [(round(p.k.real / math.pi, 9), p.geometric_multiplicity) for p in pts] == [
        (1.0, 2), (2.0, 2), (3.0, 2)
    ]
    zm = qgraph.zero_mode_point(sys_)
    assert zm is not None and zm.geometric_multiplicity == 1


def test_decouple_cube_reports_obstruction():
    # the cube's bond spectrum contains phases outside {+-1}, so no pairing
    # of scalar endpoint types reproduces it: the reduction must refuse
    g = qgraph.cube_graph(1.0)
    with pytest.raises(SimilarityError):
        decouple_symmetric_graph(g, standard_local(3))


def test_decouple_hypothesis_checks():
    with pytest.raises(SimilarityError):
        decouple_symmetric_graph(qgraph.star_graph(2), tau_pair(0.3))  # not compact
    g = qgraph.metric_graph(
        ["a", "b"], internal_edges=[("a", "b", 1.0), ("b", "a", 1.0)]
    )
    with pytest.raises(SimilarityError):
        # vertex with mixed orientation
        decouple_symmetric_graph(g, standard_local(2))


def test_decouple_delta_loop_robin_intervals():
    # complex delta at both loop vertices: k-uniform scalar types exist only
    # for the +-1 eigenvalues of the local S; gamma != 0 makes them k-dependent
    g = qgraph.loop_graph(2, 1.0)
    from qgraph.presets import delta_local

    with pytest.raises(SimilarityError):
        decouple_symmetric_graph(g, delta_local(2, 1.0 + 0.5j))


def test_block_transform_from_matrix_round_trip(rng):
    g = qgraph.metric_graph(
        ["a", "b"], internal_edges=[("a", "b", 1.0), ("a", "b", 1.0)],
        external_edges=["a"],
    )
    GE = rng.standard_normal((1, 1)) + 1j * rng.standard_normal((1, 1))
    GI = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    t = BlockTransform(GE, GI)
    t2 = BlockTransform.from_matrix(t.assembled(g), g)
    assert np.abs(t2.G_I - GI).max() < 1e-12
    bad = t.assembled(g)
    bad[0, 1] = 0.5  # off-block entry
    with pytest.raises(SimilarityError):
        BlockTransform.from_matrix(bad, g)


def test_random_conjugations_verify(rng):
    # for any invertible block transform, the conjugated pair must certify
    g = qgraph.metric_graph(
        ["a", "b"], internal_edges=[("a", "b", 0.7), ("a", "b", 0.7)],
        external_edges=["a", "b"],
    )
    from conftest import random_bc

    for _ in range(10):
        bc = random_bc(rng, g.d)
        GE = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        GI = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        t = BlockTransform(GE, GI)
        G = t.assembled(g)
        target = qgraph.BoundaryConditions(
            np.linalg.inv(G) @ bc.A @ G, np.linalg.inv(G) @ bc.B @ G
        )
        cert = verify_similarity(g, bc, target, t)
        assert cert.residual < 1e-8
