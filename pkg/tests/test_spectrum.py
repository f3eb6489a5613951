import math

import numpy as np
import pytest

import qgraph
from qgraph import (
    IrregularBCError,
    Region,
    SecularSystem,
    SolverOptions,
    adjoint,
    classify,
    compute_spectrum,
    eigenfunction,
    essential_spectrum,
    find_eigenvalues,
    real_axis_scan,
    residual_spectrum,
    secular_zeros,
    weyl_count_check,
    zero_mode_point,
)
from qgraph.presets import build_preset

from conftest import random_selfadjoint_bc


def scalar_roots_sin_minus_id(region):
    """Independent oracle: roots of sin k - k by dense Newton with cos k - 1."""
    roots = []
    for x0 in np.linspace(region.re_min + 0.2, region.re_max, 160):
        for y0 in np.linspace(max(region.im_min, 0.1), region.im_max, 40):
            z = complex(x0, y0)
            for _ in range(60):
                if abs(z.imag) > 700:  # sin overflows; this start diverged
                    break
                d = np.cos(z) - 1.0
                if abs(d) < 1e-18:
                    break
                step = (np.sin(z) - z) / d
                z -= step
                if abs(step) < 1e-13:
                    break
            if (
                abs(z.imag) < 700
                and abs(np.sin(z) - z) < 1e-10
                and region.contains(z, 1e-9)
                and abs(z) > 1e-2  # keep clear of the triple root at 0
                and not any(abs(z - r) < 1e-8 for r in roots)
            ):
                roots.append(z)
    return sorted(roots, key=lambda z: (z.real, z.imag))


# ---------------------------------------------------------------------------
# interval oracle
# ---------------------------------------------------------------------------

def test_interval_dirichlet_spectrum():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
    pts = find_eigenvalues(sys_, Region.quadrant(10.4, 1.0))
    assert len(pts) == 10
    for n, p in enumerate(pts, start=1):
        assert p.status == "eigenvalue"
        assert abs(p.lam - n * n) < 1e-8
        assert p.winding_multiplicity == 1
        assert p.geometric_multiplicity == 1


def test_interval_dirichlet_eigenfunctions():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
    pts = find_eigenvalues(sys_, Region.quadrant(3.5, 1.0))
    efs = eigenfunction(sys_, pts[0])
    assert len(efs) == 1
    ef = efs[0]
    assert ef.residual < 1e-8
    # alpha = -beta reproduces sin(x)
    assert abs(ef.alpha[0] + ef.beta[0]) < 1e-8
    xs = np.linspace(0, math.pi, 7)
    vals = ef.evaluate(0, xs)
    ratio = vals[3] / math.sin(xs[3])
    assert np.abs(vals - ratio * np.sin(xs)).max() < 1e-8


def test_interval_dirichlet_real_axis_scan():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
    pts = real_axis_scan(sys_, 4.3)
    assert [round(p.k.real) for p in pts] == [1, 2, 3, 4]
    assert all(p.status == "eigenvalue" for p in pts)


def test_cube_zero_mode_is_constants_only():
    """A piecewise-affine harmonic function on the cube is constant.

    The slopes form a divergence-free edge field whose line integrals
    around every cycle vanish; on the cube that forces zero slopes, so
    the kernel is the one-dimensional space of constants.
    """
    g, bc, _ = build_preset("cube")
    sys_ = SecularSystem(g, bc)
    zm = zero_mode_point(sys_)
    assert zm is not None
    assert zm.geometric_multiplicity == 1
    efs = eigenfunction(sys_, zm)
    assert len(efs) == 1
    assert np.abs(efs[0].beta).max() < 1e-10  # no slope part
    assert np.std(efs[0].alpha) < 1e-10       # one constant across edges


def test_interval_neumann_real_scan_and_zero_mode():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.neumann(2))
    pts = real_axis_scan(sys_, 5.2)
    assert [round(p.k.real) for p in pts] == [1, 2, 3, 4, 5]
    zm = zero_mode_point(sys_)
    assert zm is not None and zm.geometric_multiplicity == 1
    efs = eigenfunction(sys_, zm)
    assert len(efs) == 1 and efs[0].polynomial
    assert efs[0].residual < 1e-12


# ---------------------------------------------------------------------------
# intermediate conditions: nonreal eigenvalues against the scalar oracle
# ---------------------------------------------------------------------------

def test_intermediate_matches_scalar_oracle():
    g, bc, _ = build_preset("intermediate")
    sys_ = SecularSystem(g, bc)
    region = Region.quadrant(30.0, 30.0)
    pts = find_eigenvalues(sys_, region)
    oracle = scalar_roots_sin_minus_id(region)
    assert len(pts) == len(oracle) == 4
    for p, r in zip(sorted(pts, key=lambda p: p.k.real), oracle):
        assert abs(p.k - r) < 1e-8
        assert p.geometric_multiplicity == 1
    # conjugate-family members live in the mirrored quadrant
    pts_m = find_eigenvalues(sys_, Region(-30.0, 0.0, 0.0, 30.0))
    assert len(pts_m) == 4
    for p, r in zip(sorted(pts_m, key=lambda q: q.k.real), sorted(oracle, key=lambda z: -z.real)):
        assert abs(p.k + np.conj(r)) < 1e-8


def test_intermediate_zero_mode():
    g, bc, _ = build_preset("intermediate")
    zm = zero_mode_point(SecularSystem(g, bc))
    assert zm is not None
    assert zm.geometric_multiplicity == 1
    assert zm.winding_multiplicity == 3  # triple root of sin k = k at the origin


# ---------------------------------------------------------------------------
# compact star multiplicities
# ---------------------------------------------------------------------------

def test_compact_star_multiplicities():
    g, bc, _ = build_preset("star", {"edges": 3, "length": 1.0})
    sys_ = SecularSystem(g, bc)
    pts = find_eigenvalues(sys_, Region.quadrant(5.2 * math.pi, 1.5))
    expected = []
    for n in range(1, 6):
        expected.append(((n - 0.5) * math.pi, 1))
        expected.append((n * math.pi, 2))
    got = sorted((p.k.real, p.geometric_multiplicity) for p in pts)
    assert len(got) == len(expected)
    for (k_got, m_got), (k_want, m_want) in zip(got, sorted(expected)):
        assert abs(k_got - k_want) < 1e-8
        assert m_got == m_want
    assert zero_mode_point(sys_) is None


# ---------------------------------------------------------------------------
# spectral singularities and embedded eigenvalues
# ---------------------------------------------------------------------------

def test_half_line_spectral_singularity():
    # -i psi(0) + psi'(0) = 0 on one half line: det(A + ikB) = 0 at k = 1
    g = qgraph.star_graph(1)
    bc = qgraph.BoundaryConditions(np.array([[-1j]]), np.array([[1.0]]))
    sys_ = SecularSystem(g, bc)
    pts = real_axis_scan(sys_, 3.0)
    assert len(pts) == 1
    p = pts[0]
    assert abs(p.k - 1.0) < 1e-10
    assert p.status == "spectral_singularity_candidate"
    with pytest.raises(ValueError):
        eigenfunction(sys_, p)


def test_residual_example_embedded_eigenvalue():
    g, bc, _ = build_preset("residual_example")
    sys_ = SecularSystem(g, bc)
    pts = real_axis_scan(sys_, 2.5)
    ks = [p for p in pts if abs(p.k - 1.0) < 1e-8]
    assert len(ks) == 1
    p = ks[0]
    assert p.status == "eigenvalue"  # upgraded: kernel vector with s = 0
    efs = eigenfunction(sys_, p)
    assert len(efs) == 1
    ef = efs[0]
    assert abs(ef.s[0]) < 1e-10
    # internal profile proportional to e^{ix}
    assert abs(ef.beta[0]) < 1e-8
    assert abs(abs(ef.alpha[0]) - 1.0) < 1e-8
    assert ef.residual < 1e-10


def test_residual_spectrum_of_adjoint_system():
    g, bc, _ = build_preset("residual_example")
    adj = adjoint(bc)
    sys_adj = SecularSystem(g, adj)
    res = residual_spectrum(sys_adj, 2.5)
    assert any(abs(lam - 1.0) < 1e-8 for lam in res)
    # and the original operator has no residual spectrum at lambda = 1
    res0 = residual_spectrum(SecularSystem(g, bc), 2.5)
    assert not any(abs(lam - 1.0) < 1e-8 for lam in res0)


def test_residual_spectrum_empty_cases(rng):
    # compact graph
    g, bc, _ = build_preset("star", {"edges": 3})
    assert residual_spectrum(SecularSystem(g, bc), 4.0) == []
    # star graph without internal edges
    g2, bc2, _ = build_preset("tau", {"tau": 0.3})
    assert residual_spectrum(SecularSystem(g2, bc2), 4.0) == []
    # self-adjoint mixed graph
    g3 = qgraph.metric_graph(
        ["a", "b"], internal_edges=[("a", "b", 1.0)], external_edges=["a"]
    )
    from qgraph.presets import assemble_local_bc, standard_local

    bc3 = assemble_local_bc(g3, {"a": standard_local(2), "b": standard_local(1)})
    assert residual_spectrum(SecularSystem(g3, bc3), 4.0) == []


# ---------------------------------------------------------------------------
# essential spectrum tags
# ---------------------------------------------------------------------------

def test_essential_spectrum_tags():
    g, bc, _ = build_preset("cube")
    assert essential_spectrum(classify(bc), g) == "empty"
    g2, bc2, _ = build_preset("tau", {"tau": 0.5})
    assert essential_spectrum(classify(bc2), g2) == "half_line"
    g3, bc3, _ = build_preset("sgnsgn")
    assert essential_spectrum(classify(bc3), g3) == "undefined_irregular"
    bad = qgraph.BoundaryConditions(np.zeros((2, 2)), np.zeros((2, 2)))
    assert essential_spectrum(classify(bad), qgraph.star_graph(2)) == "whole_plane"


def test_irregular_refused():
    g, bc, _ = build_preset("sgnsgn")
    with pytest.raises(IrregularBCError):
        find_eigenvalues(SecularSystem(g, bc), Region.quadrant(5, 5))
    rep = compute_spectrum(SecularSystem(g, bc), Region.quadrant(5, 5))
    assert rep.diagnostics["refused"]
    assert "C minus [0, inf)" in rep.diagnostics["reason"]


def test_empty_spectrum_preset_runs_ungated():
    g, bc, _ = build_preset("empty_spectrum")
    sys_ = SecularSystem(g, bc)
    assert classify(bc).irregular_dim_d
    zeros = secular_zeros(sys_, Region.quadrant(50.0, 50.0))
    assert zeros == []
    assert sys_.zero_mode_kernel().shape[1] == 0


# ---------------------------------------------------------------------------
# Weyl counting
# ---------------------------------------------------------------------------

def test_weyl_interval():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
    pts = find_eigenvalues(sys_, Region.quadrant(50.5, 1.0))
    rep = weyl_count_check(pts, math.pi)
    assert rep.n_points == 50
    assert rep.relative_error < 1e-6


def test_weyl_star():
    g, bc, _ = build_preset("star", {"edges": 3, "length": 1.0})
    sys_ = SecularSystem(g, bc)
    pts = find_eigenvalues(sys_, Region.quadrant(17.2 * math.pi / 3 * 3, 1.5))
    rep = weyl_count_check(pts, 3.0)
    assert rep.n_points >= 50
    assert rep.relative_error < 0.01


def test_weyl_cube_density():
    # eigenvalue density 12 a / pi per unit k: 6 at n pi plus two families
    # of 3 at the adjacency wavenumbers
    g, bc, _ = build_preset("cube")
    sys_ = SecularSystem(g, bc)
    pts = find_eigenvalues(sys_, Region.quadrant(4.6 * math.pi, 1.2))
    rep = weyl_count_check(pts, 12.0)
    assert rep.n_points >= 50
    assert rep.relative_error < 0.01


def test_weyl_needs_points():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
    pts = find_eigenvalues(sys_, Region.quadrant(3.5, 1.0))
    with pytest.raises(ValueError):
        weyl_count_check(pts, math.pi)


# ---------------------------------------------------------------------------
# walker properties
# ---------------------------------------------------------------------------

def test_completeness_under_subdivision():
    g, bc, _ = build_preset("intermediate")
    sys_ = SecularSystem(g, bc)
    big = Region(2.0, 28.0, 0.5, 28.0)
    whole = secular_zeros(sys_, big)
    pieces = []
    xm, ym = 15.0, 14.0
    for rgn in (
        Region(2.0, xm, 0.5, ym),
        Region(xm, 28.0, 0.5, ym),
        Region(2.0, xm, ym, 28.0),
        Region(xm, 28.0, ym, 28.0),
    ):
        pieces.extend(secular_zeros(sys_, rgn))
    assert len(whole) == len(pieces)
    for (k1, m1), (k2, m2) in zip(
        sorted(whole, key=lambda t: (t[0].real, t[0].imag)),
        sorted(pieces, key=lambda t: (t[0].real, t[0].imag)),
    ):
        assert abs(k1 - k2) < 1e-9 * (1 + abs(k1))
        assert m1 == m2


def test_conjugate_pairing_on_found_eigenvalues(rng):
    # lambda in sigma_p iff conj(lambda) in sigma_p of the adjoint system
    g, bc, _ = build_preset("intermediate")
    sys_ = SecularSystem(g, bc)
    pts = find_eigenvalues(sys_, Region.quadrant(15.0, 15.0))
    adj_sys = SecularSystem(g, adjoint(bc))
    adj_pts = find_eigenvalues(adj_sys, Region(-15.0, 0.0, 0.0, 15.0))
    paired = {round(-np.conj(p.k).real, 7) + 1j * round(-np.conj(p.k).imag, 7) for p in pts}
    got = {round(p.k.real, 7) + 1j * round(p.k.imag, 7) for p in adj_pts}
    assert paired == got


def test_self_adjoint_implies_real_spectrum(rng):
    # lambda real: k sits on the real or the imaginary axis
    g = qgraph.interval(1.0)
    for _ in range(6):
        bc = random_selfadjoint_bc(rng, 2, k=1.0)
        sys_ = SecularSystem(g, bc)
        pts = find_eigenvalues(sys_, Region.quadrant(9.0, 3.0), SolverOptions())
        assert pts, "a self-adjoint interval problem has eigenvalues in this range"
        for p in pts:
            assert abs(p.lam.imag) < 1e-8 * (1 + abs(p.lam))


def test_boundary_winding_equals_multiplicity_sum():
    g, bc, _ = build_preset("star", {"edges": 3, "length": 1.0})
    sys_ = SecularSystem(g, bc)
    region = Region.quadrant(2.2 * math.pi, 1.0)
    zeros = secular_zeros(sys_, region)
    assert sum(m for _, m in zeros) == qgraph.boundary_winding(sys_, region)


def test_overflow_guard():
    sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
    with pytest.raises(qgraph.WalkerError):
        secular_zeros(sys_, Region.quadrant(3.0, 400.0))


def test_threaded_run_matches_serial():
    g, bc, _ = build_preset("intermediate")
    sys_ = SecularSystem(g, bc)
    region = Region.quadrant(16.0, 16.0)
    serial = find_eigenvalues(sys_, region, SolverOptions(threads=1))
    threaded = find_eigenvalues(sys_, region, SolverOptions(threads=4))
    assert len(serial) == len(threaded)
    for p, q in zip(serial, threaded):
        assert abs(p.k - q.k) < 1e-12
        assert p.winding_multiplicity == q.winding_multiplicity
