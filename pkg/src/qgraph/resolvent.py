"""Explicit resolvent kernels, their identity checks, and kernel distances.

On the resolvent set the inverse of (-Laplacian - k^2) is an integral
operator whose kernel splits as r = r0 + r1: a free part

    r0_{jj'}(x, y) = delta_{jj'} (i/2k) e^{ik|x_j - y_j|}

independent of the boundary condition, plus a rank-finite correction

    r1(x, y) = (i/2k) Phi(x, k) W Phi(y, k)^T,
    W = R_plus^{-1} [1 - S T]^{-1} S R_plus^{-1},

so two realizations on the same graph differ only through the d x d
middle factor W.  Hilbert-Schmidt distances between kernels therefore
reduce to a trace formula over closed-form Gram integrals of the
exponential profiles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .bcspace import adjoint, cayley, cond2, is_regular, dim_M, operator_norm
from .secular import SecularSystem


class ResolventError(ValueError):
    pass


class NearPoleError(ResolventError):
    """k is too close to a spectral point for the kernel formula."""


def middle_factor(sys: SecularSystem, k: complex, cond_cap: float = 1e12) -> np.ndarray:
    """W = R_plus^{-1} [1 - S T]^{-1} S R_plus^{-1} with conditioning checks."""
    bc = sys.bc
    for sign in (+1, -1):
        c = cond2(bc.A + sign * 1j * k * bc.B)
        if c > cond_cap:
            raise NearPoleError(f"A {'+' if sign > 0 else '-'} ikB ill-conditioned at k={k} (cond={c:.2e})")
    S = cayley(bc, k)
    core = np.eye(bc.d) - S @ sys.T(k)
    c = cond2(core)
    if c > cond_cap:
        raise NearPoleError(
            f"resolvent near pole: cond(1 - S T) = {c:.2e} at k={k}; "
            f"distance to spectrum is roughly {1.0 / c:.2e} in the secular scale"
        )
    Rinv = sys.R_plus(-k)  # R_plus(k)^{-1} = R_plus(-k), diagonal exponentials
    return Rinv @ sla.solve(core, S) @ Rinv


class ResolventKernel:
    """Evaluator of the resolvent kernel of one graph realization at one k."""

    def __init__(self, sys: SecularSystem, k: complex, cond_cap: float = 1e12):
        k = complex(k)
        graph = sys.graph
        if k == 0:
            raise ResolventError("k must be nonzero")
        if k.imag <= 0 and not (graph.compact and k.real > 0 and abs(k.imag) < 1e-14):
            raise ResolventError(
                "kernel requires Im k > 0 (or real k > 0 on a compact graph)"
            )
        if dim_M(sys.bc) != sys.bc.d or not is_regular(sys.bc).regular:
            raise ResolventError("resolvent formula requires regular boundary conditions")
        self.sys = sys
        self.k = k
        self.W = middle_factor(sys, k, cond_cap)

    @property
    def n_lines(self) -> int:
        return self.sys.graph.n_edge_lines

    def _check_coords(self, x):
        g = self.sys.graph
        x = np.asarray(x, dtype=float)
        if x.shape != (g.n_edge_lines,):
            raise ResolventError(f"expected {g.n_edge_lines} per-edge coordinates")
        for i, a in enumerate(g.lengths):
            xi = x[g.n_external + i]
            if xi < -1e-12 or xi > a + 1e-12:
                raise ResolventError(f"coordinate {xi} outside internal edge of length {a}")
        return x

    def at(self, x, y) -> np.ndarray:
        """Kernel matrix r(x, y; k) at per-edge coordinate vectors x, y."""
        x = self._check_coords(x)
        y = self._check_coords(y)
        k = self.k
        pref = 1j / (2.0 * k)
        free = np.diag([pref * cmath.exp(1j * k * abs(xj - yj)) for xj, yj in zip(x, y)])
        Phix = self.sys.Phi(x, k)
        Phiy = self.sys.Phi(y, k)
        return free + pref * (Phix @ self.W @ Phiy.T)

    def entry(self, j: int, xj: float, jp: int, yjp: float) -> complex:
        """Scalar kernel value between point xj on line j and yjp on line jp."""
        x = np.zeros(self.n_lines)
        y = np.zeros(self.n_lines)
        x[j], y[jp] = xj, yjp
        return complex(self.at(x, y)[j, jp])

    # -- pieces used by the identity checks --------------------------------
    def _column_traces(self, j_src: int, y_nodes, weights):
        """Traces of psi = integral of column j_src against a source profile.

        Returns (psi_trace, dpsi_trace) in the signed boundary convention,
        assuming the source support stays away from the edge endpoints.
        """
        g = self.sys.graph
        k = self.k
        pref = 1j / (2.0 * k)
        d = g.d
        psi = np.zeros(d, dtype=complex)
        dpsi = np.zeros(d, dtype=complex)

        def free_part(x, deriv_sign):
            # r0 column at endpoint x of the source line; source strictly inside
            vals = pref * np.exp(1j * k * np.abs(x - y_nodes))
            if deriv_sign == 0:
                return np.sum(weights * vals)
            # d/dx e^{ik|x-y|} with x at the endpoint side of the support
            sgn = np.sign(x - y_nodes)
            return np.sum(weights * vals * 1j * k * sgn)

        # profile row of the source line at the quadrature nodes
        rows_y = np.zeros((len(y_nodes), d), dtype=complex)
        for m, yv in enumerate(y_nodes):
            coords = np.zeros(g.n_edge_lines)
            coords[j_src] = yv
            rows_y[m] = self.sys.Phi(coords, k)[j_src]
        integ = weights @ rows_y                       # integral of Phi(y) row
        corr = pref * (self.W @ integ)                 # column correction coefficients

        nE, nI = g.n_external, g.n_internal
        # value and derivative traces of x -> Phi(x)[line] dot corr
        for e in range(nE):
            amp = corr[e]
            psi[e] += amp                               # e^{ik*0}
            dpsi[e] += 1j * k * amp
        for i in range(nI):
            a = g.lengths[i]
            cp, cm = corr[nE + i], corr[nE + nI + i]
            ep, em = cmath.exp(1j * k * a), cmath.exp(-1j * k * a)
            psi[nE + i] += cp + cm
            psi[nE + nI + i] += cp * ep + cm * em
            dpsi[nE + i] += 1j * k * (cp - cm)
            dpsi[nE + nI + i] += -1j * k * (cp * ep - cm * em)
        # free part lives on the source line only
        if j_src < nE:
            psi[j_src] += free_part(0.0, 0)
            dpsi[j_src] += free_part(0.0, 1)
        else:
            i = j_src - nE
            a = g.lengths[i]
            psi[nE + i] += free_part(0.0, 0)
            dpsi[nE + i] += free_part(0.0, 1)
            psi[nE + nI + i] += free_part(a, 0)
            dpsi[nE + nI + i] += -free_part(a, 1)       # signed convention at x = a
        return psi, dpsi

    def apply_to_bump(self, j_src: int, center: float, width: float):
        """psi(x) on line of index j of the resolvent applied to a C^2 bump.

        The bump ((y-l)(r-y))^3, normalized in L^2, is supported on
        [center-width, center+width] of line j_src.  Returns a callable
        psi(line, x) evaluated by fixed Gauss-Legendre quadrature.
        """
        lo, hi = center - width, center + width
        nodes, weights = np.polynomial.legendre.leggauss(80)
        y = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * weights
        phi = ((y - lo) * (hi - y)) ** 3
        phi /= math.sqrt(float(np.sum(w * phi ** 2)))
        wphi = w * phi

        def psi(line: int, xv: float) -> complex:
            g = self.sys.graph
            coords = np.zeros(g.n_edge_lines)
            coords[line] = xv
            rowx = self.sys.Phi(coords, self.k)[line]
            k = self.k
            pref = 1j / (2.0 * k)
            val = pref * complex(rowx @ (self.W @ (wphi @ self._rows_cache(j_src, y))))
            if line == j_src:
                val += pref * complex(np.sum(wphi * np.exp(1j * k * np.abs(xv - y))))
            return val

        return psi, (y, wphi)

    def _rows_cache(self, j_src, y_nodes):
        key = (j_src, y_nodes.tobytes())
        cache = getattr(self, "_rc", None)
        if cache is None:
            cache = {}
            self._rc = cache
        if key not in cache:
            g = self.sys.graph
            rows = np.zeros((len(y_nodes), g.d), dtype=complex)
            for m, yv in enumerate(y_nodes):
                coords = np.zeros(g.n_edge_lines)
                coords[j_src] = yv
                rows[m] = self.sys.Phi(coords, self.k)[j_src]
            cache[key] = rows
        return cache[key]


@dataclass(frozen=True)
class IdentityReport:
    bc_residual: float       # (i)  kernel image satisfies the boundary conditions
    ode_residual: float      # (ii) (-d^2/dx^2 - k^2) R phi = phi away from support
    symmetry_residual: float  # (iii) r_M(y,x;k)* = r_{M*}(x,y;-conj k)
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.bc_residual, self.ode_residual, self.symmetry_residual) <= self.tolerance

    def as_dict(self):
        return {
            "bc_residual": self.bc_residual,
            "ode_residual": self.ode_residual,
            "symmetry_residual": self.symmetry_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _bump_spots(length: float | None):
    """Three interior (center, width) pairs; half-line sources sit in [0.3, 2.8]."""
    if length is None:
        return [(0.5, 0.18), (1.3, 0.3), (2.3, 0.4)]
    return [(f * length, 0.09 * length) for f in (0.25, 0.5, 0.75)]


def verify_resolvent_identity(res: ResolventKernel, tolerance: float = 1e-7, seed: int = 5):
    """Numerical check of the three defining identities of the kernel."""
    sys_ = res.sys
    g = sys_.graph
    k = res.k
    bc_res = 0.0
    ode_res = 0.0

    for j_src in range(g.n_edge_lines):
        length = None if j_src < g.n_external else float(g.lengths[j_src - g.n_external])
        for center, width in _bump_spots(length):
            lo, hi = center - width, center + width
            nodes, weights = np.polynomial.legendre.leggauss(80)
            y = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            w = 0.5 * (hi - lo) * weights
            phi = ((y - lo) * (hi - y)) ** 3
            phi /= math.sqrt(float(np.sum(w * phi ** 2)))
            psi_tr, dpsi_tr = res._column_traces(j_src, y, w * phi)
            resid = np.linalg.norm(sys_.bc.A @ psi_tr + sys_.bc.B @ dpsi_tr)
            scale = max(np.linalg.norm(psi_tr), np.linalg.norm(dpsi_tr), 1e-30)
            bc_res = max(bc_res, float(resid / scale / sys_.bc.scale()))

            psi, _ = res.apply_to_bump(j_src, center, width)
            for line in range(g.n_edge_lines):
                if line < g.n_external:
                    xs = [0.35, 3.1] if line != j_src else [hi + 0.4, hi + 1.5]
                    h = 1e-4
                else:
                    a = float(g.lengths[line - g.n_external])
                    h = 1e-4 * a
                    xs = [0.2 * a, 0.8 * a]
                    if line == j_src:
                        xs = [x for x in xs if not (lo - 0.05 * a <= x <= hi + 0.05 * a)]
                        if not xs:
                            xs = [lo / 2 if lo > 0.1 * a else hi + 0.5 * (a - hi)]
                for x0 in xs:
                    vals = [psi(line, x0 - h), psi(line, x0), psi(line, x0 + h)]
                    second = (vals[0] - 2 * vals[1] + vals[2]) / h ** 2
                    ode_res = max(ode_res, abs(-second - k * k * vals[1]))

    # (iii) adjoint symmetry at sample point pairs
    adj_sys = SecularSystem(g, adjoint(sys_.bc))
    adj_res = ResolventKernel(adj_sys, -np.conj(k))
    rng = np.random.default_rng(seed)
    sym_res = 0.0
    for _ in range(5):
        x = _random_coords(g, rng)
        y = _random_coords(g, rng)
        lhs = res.at(y, x).conj().T
        rhs = adj_res.at(x, y)
        sym_res = max(sym_res, float(np.abs(lhs - rhs).max()))
    return IdentityReport(bc_res, ode_res, sym_res, tolerance)


def _random_coords(g, rng) -> np.ndarray:
    out = np.zeros(g.n_edge_lines)
    for j in range(g.n_external):
        out[j] = rng.uniform(0.1, 2.5)
    for i, a in enumerate(g.lengths):
        out[g.n_external + i] = rng.uniform(0.05 * a, 0.95 * a)
    return out


# ---------------------------------------------------------------------------
# Hilbert-Schmidt distance between two kernels on the same graph
# ---------------------------------------------------------------------------

def _profile_gram(sys: SecularSystem, k: complex) -> np.ndarray:
    """Gram matrix of the rows of Phi(., k), integrated edge by edge.

    Entry (a, c) is sum_j int Phi_row_j(x)_a conj(Phi_row_j(x))_c dx; the
    integrals of e^{i(k - conj k) x} and e^{i(k + conj k) x} are closed
    form.  Requires Im k > 0 so half-line integrals converge.
    """
    g = sys.graph
    if k.imag <= 0:
        raise ResolventError("Hilbert-Schmidt Gram integrals need Im k > 0")
    d = g.d
    nE, nI = g.n_external, g.n_internal
    G = np.zeros((d, d), dtype=complex)
    two_im = 2.0 * k.imag
    two_re = 2.0 * k.real
    for e in range(nE):
        G[e, e] = 1.0 / two_im
    for i in range(nI):
        a = float(g.lengths[i])
        p, q = nE + i, nE + nI + i
        G[p, p] = (1.0 - math.exp(-two_im * a)) / two_im
        G[q, q] = (math.exp(two_im * a) - 1.0) / two_im
        if abs(two_re) < 1e-300:
            cross = complex(a, 0.0)
        else:
            cross = (cmath.exp(1j * two_re * a) - 1.0) / (1j * two_re)
        G[p, q] = cross
        G[q, p] = np.conj(cross)
    return G


def hs_distance(res1: ResolventKernel, res2: ResolventKernel) -> float:
    """Hilbert-Schmidt norm of the kernel difference, in closed form."""
    if res1.sys.graph is not res2.sys.graph and not _same_graph(res1.sys.graph, res2.sys.graph):
        raise ResolventError("kernels live on different graphs")
    if res1.k != res2.k:
        raise ResolventError("kernels evaluated at different k")
    k = res1.k
    D = res1.W - res2.W
    G = _profile_gram(res1.sys, k)
    val = np.trace(D @ G @ D.conj().T @ G.conj()).real / (4.0 * abs(k) ** 2)
    return math.sqrt(max(val, 0.0))


def _same_graph(g1, g2) -> bool:
    return (
        g1.n_external == g2.n_external
        and g1.n_internal == g2.n_internal
        and np.allclose(g1.lengths, g2.lengths)
    )


def kernel_grid_csv(res: ResolventKernel, path, j: int = 0, jp: int | None = None,
                    n: int = 50, x_max: float = 3.0):
    """Write a kernel sample grid as CSV rows (x, y, Re r, Im r).

    Points run over line j for x and line jp for y; internal edges are
    sampled across their full length, external edges up to x_max.
    """
    import csv

    if jp is None:
        jp = j
    g = res.sys.graph

    def axis(line):
        if line < g.n_external:
            return np.linspace(0.0, x_max, n)
        return np.linspace(0.0, float(g.lengths[line - g.n_external]), n)

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "re_r", "im_r"])
        for x in axis(j):
            for y in axis(jp):
                v = res.entry(j, float(x), jp, float(y))
                w.writerow([repr(float(x)), repr(float(y)), repr(v.real), repr(v.imag)])
    return path


def singularity_diagnostic(sys: SecularSystem, k_real: float, depth: int = 6):
    """Size and conditioning of the kernel factors at k + i 10^-j, j = 1..depth.

    Rapid growth of the middle factor [1 - S T]^{-1} S flags a
    spectral-singularity candidate; the criterion of unboundedness itself
    is left open, only the numbers are reported.
    """
    out = []
    for j in range(1, depth + 1):
        k = complex(k_real, 10.0 ** (-j))
        bc = sys.bc
        c1 = cond2(bc.A + 1j * k * bc.B)
        try:
            S = cayley(bc, k, cond_cap=np.inf)
            core = np.eye(bc.d) - S @ sys.T(k)
            c2 = cond2(core)
            mid = operator_norm(sla.solve(core, S))
        except Exception:
            c2 = np.inf
            mid = np.inf
        out.append({
            "imag": 10.0 ** (-j),
            "cond_A_ikB": c1,
            "cond_core": c2,
            "middle_norm": mid,
        })
    return out
