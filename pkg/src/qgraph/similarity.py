"""Similarity transforms between Laplacian realizations on one graph.

On graphs whose internal edges share one length, an invertible
block-diagonal matrix G = diag(G_E, G_I, G_I) acting on the trace space
conjugates one realization into another: the pair (G^{-1} A G, G^{-1} B G)
describes a similar operator.  A realization is similar to a self-adjoint
one exactly when such a G conjugates its Cayley transform to that of a
self-adjoint pair (a unitary matrix at real k, a Hermitian one at
imaginary k); the certificate then carries the metric factor (G* G)^{-1},
whose function-space counterpart intertwines the operator with its
adjoint.

The structured search looks for a positive-definite, block-structured
solution Theta of the intertwiner equation S* Theta = Theta S at an
imaginary-axis wavenumber (where self-adjoint pairs have Hermitian
Cayley matrices); then G = Theta^{1/2} works, G S G^{-1} is Hermitian
and S* = Theta S Theta^{-1}.  This replaces an explicit recombination
of eigenvector columns: every admissible recombination corresponds to a
point of the solution space, and the search is a least-squares
projection into that space.

The decoupling of vertex-transitive graphs with one local condition per
vertex reduces the spectrum to a union of interval problems; the pairing
of endpoint types is reconstructed from the spectrum of S J_swap, where
J_swap exchanges the two endpoint blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .bcspace import (
    BoundaryConditions,
    cayley,
    cond2,
    dim_M,
    from_cayley,
    is_regular,
    is_self_adjoint,
    operator_norm,
    projector_distance,
    witness_k,
)
from .graph import MetricGraph, degree
from .secular import SecularSystem


class SimilarityError(ValueError):
    pass


@dataclass(frozen=True)
class BlockTransform:
    """Invertible blocks (G_E on externals, G_I repeated on both internal blocks)."""

    G_E: np.ndarray
    G_I: np.ndarray

    def __post_init__(self):
        GE = np.atleast_2d(np.asarray(self.G_E, dtype=complex)) if np.size(self.G_E) else np.zeros((0, 0), complex)
        GI = np.atleast_2d(np.asarray(self.G_I, dtype=complex)) if np.size(self.G_I) else np.zeros((0, 0), complex)
        for M, name in ((GE, "G_E"), (GI, "G_I")):
            if M.size and cond2(M) > 1e14:
                raise SimilarityError(f"{name} is numerically singular")
        object.__setattr__(self, "G_E", GE)
        object.__setattr__(self, "G_I", GI)

    def assembled(self, graph: MetricGraph) -> np.ndarray:
        nE, nI = graph.n_external, graph.n_internal
        if self.G_E.shape != (nE, nE) or self.G_I.shape != (nI, nI):
            raise SimilarityError(
                f"block sizes {self.G_E.shape}, {self.G_I.shape} do not match graph ({nE}, {nI})"
            )
        G = np.zeros((graph.d, graph.d), dtype=complex)
        G[:nE, :nE] = self.G_E
        G[nE:nE + nI, nE:nE + nI] = self.G_I
        G[nE + nI:, nE + nI:] = self.G_I
        return G

    @classmethod
    def from_matrix(cls, G: np.ndarray, graph: MetricGraph, tol: float = 1e-9) -> "BlockTransform":
        """Split a full d x d matrix, verifying the block structure."""
        G = np.asarray(G, dtype=complex)
        nE, nI = graph.n_external, graph.n_internal
        GE = G[:nE, :nE]
        GI1 = G[nE:nE + nI, nE:nE + nI]
        GI2 = G[nE + nI:, nE + nI:]
        t = cls(GE, GI1)
        off = operator_norm(G - t.assembled(graph))
        same = operator_norm(GI1 - GI2)
        scale = max(operator_norm(G), 1e-300)
        if off > tol * scale or same > tol * scale:
            raise SimilarityError("matrix does not have the diag(G_E, G_I, G_I) structure")
        return t


@dataclass
class SimilarityCertificate:
    """Witness that G^{-1} (source) G is equivalent to the target pair."""

    transform: BlockTransform
    source_bc: BoundaryConditions
    target_bc: BoundaryConditions
    target_self_adjoint: bool
    residual: float
    k_used: Optional[complex] = None
    metric_matrix: Optional[np.ndarray] = None       # (G* G)^{-1} of the similarity factor
    metric_inverse: Optional[np.ndarray] = None      # G* G
    quasi_self_adjoint_residual: Optional[float] = None
    single_k: bool = False
    diagnostics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class IntervalProblem:
    """Interval [0, a] with scalar endpoint conditions in trace convention.

    left/right are (alpha, beta) with alpha psi + beta psi' = 0 at the
    endpoint, psi' taken in the signed trace convention.  label is
    'dirichlet', 'neumann' or 'robin'.
    """

    left: tuple
    right: tuple
    count: int

    @staticmethod
    def label_of(pair) -> str:
        a, b = pair
        scale = max(abs(a), abs(b))
        if abs(b) <= 1e-9 * scale:
            return "dirichlet"
        if abs(a) <= 1e-9 * scale:
            return "neumann"
        return "robin"

    @property
    def labels(self) -> tuple:
        return (self.label_of(self.left), self.label_of(self.right))


@dataclass
class DecoupledSpectrum:
    a: float
    problems: list
    diagnostics: dict = field(default_factory=dict)

    def eigenvalue_multiset(self, k_max: float) -> list:
        """Sorted (k, multiplicity) pairs of the decoupled union, k in (0, k_max]."""
        acc: list = []
        for prob in self.problems:
            for k in _interval_spectrum(prob, self.a, k_max):
                for entry in acc:
                    if abs(entry[0] - k) <= 1e-9 * (1 + abs(k)):
                        entry[1] += prob.count
                        break
                else:
                    acc.append([k, prob.count])
        return sorted((k, c) for k, c in acc)

    def zero_mode_count(self) -> int:
        total = 0
        for prob in self.problems:
            if _interval_has_zero_mode(prob, self.a):
                total += prob.count
        return total


# ---------------------------------------------------------------------------
# similarity verification and search
# ---------------------------------------------------------------------------

def conjugated(bc: BoundaryConditions, G: np.ndarray) -> BoundaryConditions:
    Ginv = np.linalg.inv(G)
    return BoundaryConditions(Ginv @ bc.A @ G, Ginv @ bc.B @ G)


def verify_similarity(
    g: MetricGraph,
    bc: BoundaryConditions,
    bc_target: BoundaryConditions,
    t: BlockTransform,
    tol: float = 1e-8,
) -> SimilarityCertificate:
    """Certify G^{-1} (A, B) G ~ (A', B') via projector distance.

    Only defined when all internal edge lengths agree.  Raises
    SimilarityError when the distance exceeds tol.
    """
    if not g.equal_lengths:
        raise SimilarityError("similarity transforms require equal internal edge lengths")
    G = t.assembled(g)
    moved = conjugated(bc, G)
    dist = projector_distance(moved, bc_target)
    if not dist <= tol:
        raise SimilarityError(f"projector distance {dist:.3e} exceeds tolerance {tol:.1e}")
    target_sa = is_self_adjoint(bc_target)
    cert = SimilarityCertificate(
        transform=t, source_bc=bc, target_bc=bc_target,
        target_self_adjoint=target_sa, residual=float(dist),
    )
    if target_sa:
        # with S_target Hermitian (imaginary k), conjugation by (G G*)^{-1}
        # carries S_source to S_source*; the metric matrix is its inverse
        gg = G @ G.conj().T
        cert.metric_matrix = _hermitize(gg)
        cert.metric_inverse = _hermitize(np.linalg.inv(gg))
    return cert


def _hermitize(M):
    return 0.5 * (M + M.conj().T)


def _hermitian_basis(n: int):
    """Real basis of n x n Hermitian matrices (n^2 members)."""
    out = []
    for i in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[i, i] = 1.0
        out.append(E)
    for i in range(n):
        for j in range(i + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = E[j, i] = 1.0
            out.append(E)
            E = np.zeros((n, n), dtype=complex)
            E[i, j] = 1j
            E[j, i] = -1j
            out.append(E)
    return out


def _structured_basis(graph: MetricGraph):
    """Hermitian block matrices diag(H_E, H_I, H_I) as d x d arrays."""
    nE, nI = graph.n_external, graph.n_internal
    d = graph.d
    basis = []
    for H in _hermitian_basis(nE):
        M = np.zeros((d, d), dtype=complex)
        M[:nE, :nE] = H
        basis.append(M)
    for H in _hermitian_basis(nI):
        M = np.zeros((d, d), dtype=complex)
        M[nE:nE + nI, nE:nE + nI] = H
        M[nE + nI:, nE + nI:] = H
        basis.append(M)
    return basis


def _intertwiner_solution_space(S: np.ndarray, basis, rtol: float = 1e-8):
    """Orthonormal combinations of basis elements solving S* Theta = Theta S.

    A Hermitian positive-definite solution Theta makes
    Theta^{1/2} S Theta^{-1/2} Hermitian, and conjugation by Theta carries
    S to S*.
    """
    cols = []
    for Th in basis:
        F = S.conj().T @ Th - Th @ S
        cols.append(np.concatenate([F.real.ravel(), F.imag.ravel()]))
    Fmat = np.array(cols).T
    u, sig, vh = sla.svd(Fmat, full_matrices=True)
    if sig.size == 0:
        return []
    cut = rtol * max(sig[0], 1.0)
    null = vh[np.sum(sig > cut):]
    out = []
    for coeffs in null:
        Th = sum(c * B for c, B in zip(coeffs, basis))
        out.append(_hermitize(Th))
    return out


def _project_to_span(M: np.ndarray, space) -> np.ndarray:
    """Orthogonal projection of Hermitian M onto the real span of `space`."""
    if not space:
        return np.zeros_like(M)
    flat = np.array([np.concatenate([B.real.ravel(), B.imag.ravel()]) for B in space]).T
    q, _ = np.linalg.qr(flat)
    v = np.concatenate([M.real.ravel(), M.imag.ravel()])
    proj = q @ (q.T @ v)
    n = M.shape[0]
    re = proj[: n * n].reshape(n, n)
    im = proj[n * n:].reshape(n, n)
    return _hermitize(re + 1j * im)


def _positive_definite_element(space, seed_candidate=None, attempts: int = 64):
    """Search the real span of `space` for a positive-definite element."""
    candidates = []
    if seed_candidate is not None:
        candidates.append(seed_candidate)
    for B in space:
        candidates.append(B)
        candidates.append(-B)
    rng = np.random.default_rng(11)
    for _ in range(attempts):
        coeffs = rng.standard_normal(len(space))
        Th = sum(c * B for c, B in zip(coeffs, space))
        candidates.append(Th)
        candidates.append(-Th)
    best, best_margin = None, 0.0
    for Th in candidates:
        Th = _hermitize(Th)
        w = np.linalg.eigvalsh(Th)
        if w[0] > 0:
            margin = w[0] / w[-1]
            if margin > best_margin:
                best, best_margin = Th, margin
    return best


def _geo_normalize(Th: np.ndarray) -> np.ndarray:
    """Scale a positive matrix so its determinant is one."""
    w = np.linalg.eigvalsh(Th)
    return Th * math.exp(-float(np.mean(np.log(w))))


def find_similarity_to_selfadjoint(
    g: MetricGraph,
    bc: BoundaryConditions,
    k: complex | None = None,
    tol: float = 1e-8,
    cond_cap: float = 1e8,
) -> Optional[SimilarityCertificate]:
    """Certificate of similarity to a self-adjoint realization, or None.

    The wavenumber k defaults to the best-conditioned point on the
    positive imaginary axis; certificates are issued at imaginary k,
    where the Cayley matrix of a self-adjoint pair is Hermitian.  The
    matrix-level test is therefore real eigenvalues of S(i kappa) plus a
    positive-definite block-structured solution of S* Theta = Theta S
    (the same S would have unimodular eigenvalues at real k).  The metric
    identity S* = Theta S Theta^{-1} then holds exactly.  On failure
    returns None and records the obstruction in
    `find_similarity_to_selfadjoint.last_diagnostic`.
    """
    def fail(reason, **extra):
        find_similarity_to_selfadjoint.last_diagnostic = {"reason": reason, **extra}
        return None

    if g.n_internal and not g.equal_lengths:
        raise SimilarityError("similarity search requires equal internal edge lengths")
    if dim_M(bc) != bc.d or not is_regular(bc).regular:
        raise SimilarityError("irregular boundary conditions admit no similarity certificate")
    if k is None:
        k = witness_k(bc)
        if k is None:
            raise SimilarityError("no well-conditioned imaginary witness k found")
    k = complex(k)
    if abs(k.real) > 1e-12 or k.imag <= 0:
        raise SimilarityError("certificates are issued at k on the positive imaginary axis")

    S = cayley(bc, k)
    w, V = np.linalg.eig(S)
    imag_dev = float(np.max(np.abs(w.imag)))
    if imag_dev > 1e-8 * (1.0 + float(np.max(np.abs(w)))):
        return fail(
            "non-real eigenvalue at imaginary k (non-unimodular at real k)",
            deviation=imag_dev,
        )
    if cond2(V) > cond_cap:
        return fail("defective", eigenvector_condition=cond2(V))

    # orthonormalize eigenvectors inside eigenvalue clusters, then the
    # unstructured canonical metric is (V V*)^{-1}
    Vhat = V.copy()
    unassigned = list(range(len(w)))
    while unassigned:
        i0 = unassigned[0]
        cluster = [i for i in unassigned if abs(w[i] - w[i0]) <= 1e-7]
        unassigned = [i for i in unassigned if i not in cluster]
        q, _ = np.linalg.qr(V[:, cluster])
        Vhat[:, cluster] = q
    theta_raw = _hermitize(np.linalg.inv(Vhat @ Vhat.conj().T))

    space = _intertwiner_solution_space(S, _structured_basis(g))
    if not space:
        return fail("block-structure obstruction", note="structured intertwiner equation has no solution")
    seed = _project_to_span(theta_raw, space)
    w_eig = np.linalg.eigvalsh(seed)
    theta = seed if w_eig[0] > 1e-10 * max(w_eig[-1], 1e-300) else None
    if theta is None:
        theta = _positive_definite_element(space, seed)
    if theta is None:
        return fail(
            "obstruction (inconclusive)",
            note="no positive-definite element found in the structured solution space",
        )
    theta = _geo_normalize(theta)
    eq_res = operator_norm(S.conj().T @ theta - theta @ S) / max(operator_norm(theta), 1e-300)
    if eq_res > 1e-7:
        return fail("obstruction (inconclusive)", intertwiner_residual=eq_res)

    nE, nI = g.n_external, g.n_internal
    GE = _matrix_sqrt(theta[:nE, :nE])
    GI = _matrix_sqrt(theta[nE:nE + nI, nE:nE + nI])
    t_sqrt = BlockTransform(GE, GI)
    G = t_sqrt.assembled(g)
    Ginv = np.linalg.inv(G)
    U = G @ S @ Ginv
    herm_res = operator_norm(U.conj().T - U)
    if herm_res > 1e-7:
        return fail("obstruction (inconclusive)", hermiticity_residual=herm_res)
    target = from_cayley(U, k)

    # certificate orientation: transform carries the source into the target
    t_cert = BlockTransform(
        np.linalg.inv(GE) if GE.size else GE,
        np.linalg.inv(GI) if GI.size else GI,
    )
    cert = verify_similarity(g, bc, target, t_cert, tol=max(tol, 1e-8))
    cert.k_used = k
    cert.metric_matrix = _hermitize(np.linalg.inv(theta))
    cert.metric_inverse = _hermitize(theta)
    cert.quasi_self_adjoint_residual = float(
        operator_norm(S.conj().T - theta @ S @ np.linalg.inv(theta))
    )
    # sample further imaginary-axis wavenumbers: does the same G work there?
    single_k = False
    for factor in (2.0, 0.5):
        k2 = k * factor
        try:
            S2 = cayley(bc, k2)
        except Exception:
            continue
        U2 = G @ S2 @ Ginv
        if operator_norm(U2.conj().T - U2) > 1e-6:
            single_k = True
    cert.single_k = single_k
    cert.diagnostics["intertwiner_residual"] = eq_res
    cert.diagnostics["hermiticity_residual"] = herm_res
    return cert


find_similarity_to_selfadjoint.last_diagnostic = None


def _matrix_sqrt(H: np.ndarray) -> np.ndarray:
    if H.size == 0:
        return H
    w, U = np.linalg.eigh(_hermitize(H))
    if w[0] <= 0:
        raise SimilarityError("matrix square root of a non-positive matrix")
    return U @ np.diag(np.sqrt(w)) @ U.conj().T


def metric_operator(cert: SimilarityCertificate):
    """Metric pair (Theta, Theta^{-1}) of a self-adjoint-target certificate.

    Theta is the edge-mixing matrix (G* G)^{-1} of the similarity factor;
    the conjugation by its inverse realizes S* = Theta^{-1} S Theta at the
    certificate's wavenumber.
    """
    if not cert.target_self_adjoint:
        raise SimilarityError("metric operator requires a self-adjoint target")
    if cert.metric_matrix is None or cert.metric_inverse is None:
        raise SimilarityError("certificate carries no metric data")
    return cert.metric_matrix, cert.metric_inverse


# ---------------------------------------------------------------------------
# decoupling of symmetric compact graphs
# ---------------------------------------------------------------------------

def _scalar_conditions_from_cayley(sigma: complex, k: complex):
    """Scalar (alpha, beta) with Cayley value sigma at wavenumber k, tidied."""
    alpha = -0.5 * (sigma - 1.0)
    beta = (sigma + 1.0) / (2j * k)
    scale = max(abs(alpha), abs(beta))
    alpha, beta = alpha / scale, beta / scale
    if abs(beta) <= 1e-9:
        return (1.0 + 0j, 0j)
    if abs(alpha) <= 1e-9:
        return (0j, 1.0 + 0j)
    return (alpha / beta, 1.0 + 0j)


def _local_types(bc_vertex: BoundaryConditions, k: complex, k2: complex):
    """Eigen-decoupled scalar endpoint conditions of one local vertex pair.

    Returns a list of (alpha, beta) pairs (with multiplicity, one entry
    per eigenvalue) and raises when the local Cayley matrix is not
    diagonalizable or the scalar conditions drift with k.
    """
    S = cayley(bc_vertex, k)
    wv, V = np.linalg.eig(S)
    if cond2(V) > 1e8:
        raise SimilarityError("local scattering matrix is numerically defective")
    types = [_scalar_conditions_from_cayley(s, k) for s in wv]
    # k-uniformity: the scalar pairs must reproduce the eigenvalues at k2
    expect = [_sigma_of(t, k2) for t in types]
    got = [complex(z) for z in np.linalg.eigvals(cayley(bc_vertex, k2))]
    for e in expect:
        hit = next((i for i, g_ in enumerate(got) if abs(e - g_) <= 1e-6 * (1 + abs(e))), None)
        if hit is None:
            raise SimilarityError(
                "local conditions do not decouple uniformly in k; "
                "scalar endpoint conditions would be k-dependent"
            )
        got.pop(hit)
    return types


def _orientation_classes(g: MetricGraph):
    """(sources, sinks) when every vertex has only outgoing or only incoming edges."""
    sources, sinks = set(), set()
    for e in g.internal_edges:
        sources.add(e.tail)
        sinks.add(e.head)
    if sources & sinks:
        raise SimilarityError(
            "graph orientation mixes incoming and outgoing edges at a vertex"
        )
    return sources, sinks


def decouple_symmetric_graph(
    g: MetricGraph,
    bc_vertex: BoundaryConditions,
    endpoint_condition: tuple | None = None,
    k_probe: complex = 2j,
) -> DecoupledSpectrum:
    """Reduce a symmetric compact graph to decoupled interval problems.

    Star mode: `bc_vertex` is the condition at the center (degree nu) and
    `endpoint_condition` the identical scalar pair at every pendant
    vertex.  General mode: every vertex carries `bc_vertex` (all degrees
    equal) and the orientation splits vertices into sources and sinks;
    the pairing of endpoint types is reconstructed from the spectrum of
    S J_swap and cross-checkable against the direct solver.
    """
    if not g.compact:
        raise SimilarityError("decoupling requires a compact graph")
    if not g.equal_lengths or g.n_internal == 0:
        raise SimilarityError("decoupling requires equal internal edge lengths")
    a = float(g.lengths[0])
    sources, sinks = _orientation_classes(g)

    pendant_mode = endpoint_condition is not None
    if pendant_mode:
        center = [v for v in g.vertices if degree(g, v) > 1]
        if len(center) != 1 or degree(g, center[0]) != g.n_internal:
            raise SimilarityError("endpoint_condition given but the graph is not a star")
        nu = g.n_internal
        if bc_vertex.d != nu:
            raise SimilarityError(f"central condition must be {nu} x {nu}")
        types = _local_types(bc_vertex, k_probe, 2 * k_probe)
        pend = _tidy_scalar(complex(endpoint_condition[0]), complex(endpoint_condition[1]))
        if center[0] in sinks:
            # edges run pendant -> center, so the center types sit on the right
            problems = [IntervalProblem(left=pend, right=t, count=1) for t in types]
        else:
            problems = [IntervalProblem(left=t, right=pend, count=1) for t in types]
        return DecoupledSpectrum(a, _merge_problems(problems), {"mode": "star"})

    degs = {degree(g, v) for v in g.vertices}
    if len(degs) != 1:
        raise SimilarityError("general decoupling requires all vertex degrees equal")
    nu = degs.pop()
    if bc_vertex.d != nu:
        raise SimilarityError(f"local condition must be {nu} x {nu}")
    types = _local_types(bc_vertex, k_probe, 2 * k_probe)

    # global Cayley matrix is block diagonal over vertices; eigenvalues of
    # S J_swap pin down the pairing counts
    from .presets import assemble_local_bc  # deferred: presets imports this module

    bc_glob = assemble_local_bc(g, {v: bc_vertex for v in g.vertices})
    S_glob = cayley(bc_glob, k_probe)
    nI = g.n_internal
    J = np.zeros((2 * nI, 2 * nI), dtype=complex)
    J[:nI, nI:] = np.eye(nI)
    J[nI:, :nI] = np.eye(nI)
    mu = np.linalg.eigvals(S_glob @ J)
    mu2 = np.sort_complex(mu ** 2)
    # each interval contributes a +/- pair of mu, i.e. two equal mu^2 values
    products = _cluster_values([1.0 / m2 for m2 in mu2], tol=1e-6)
    if any(c % 2 for _, c in products) or sum(c for _, c in products) != 2 * nI:
        raise SimilarityError("mu spectrum does not split into +/- pairs (inconclusive)")
    pair_counts = {v: c // 2 for v, c in products}
    sig = {i: _sigma_of(t, k_probe) for i, t in enumerate(types)}
    counts = _match_pairing(types, sig, pair_counts, len(sources), len(sinks))
    problems = _merge_problems(
        [IntervalProblem(left=types[i], right=types[j], count=c)
         for (i, j), c in counts.items() if c > 0]
    )
    return DecoupledSpectrum(a, problems, {"mode": "general", "mu_squared": [(str(v), c) for v, c in products]})


def _tidy_scalar(alpha: complex, beta: complex):
    scale = max(abs(alpha), abs(beta))
    if scale == 0:
        raise SimilarityError("endpoint condition cannot be (0, 0)")
    alpha, beta = alpha / scale, beta / scale
    if abs(beta) <= 1e-12:
        return (1.0 + 0j, 0j)
    if abs(alpha) <= 1e-12:
        return (0j, 1.0 + 0j)
    return (alpha / beta, 1.0 + 0j)


def _sigma_of(t, k):
    a, b = t
    return complex(-(a - 1j * k * b) / (a + 1j * k * b))


def _cluster_values(values, tol):
    out = []
    for v in values:
        for i, (c, n) in enumerate(out):
            if abs(v - c) <= tol * (1 + abs(c)):
                out[i] = ((c * n + v) / (n + 1), n + 1)
                break
        else:
            out.append((v, 1))
    return out


def _match_pairing(types, sig, pair_counts, n_src, n_snk):
    """Integer assignment of interval endpoint types matching all counts."""
    m = len(types)
    left_quota = {i: n_src for i in range(m)}
    right_quota = {j: n_snk for j in range(m)}
    # admissible (i, j) pairs per clustered product value
    slots = []
    for value, cnt in pair_counts.items():
        admissible = [
            (i, j) for i in range(m) for j in range(m)
            if abs(sig[i] * sig[j] - value) <= 1e-5 * (1 + abs(value))
        ]
        if not admissible:
            raise SimilarityError(
                f"no endpoint-type pair matches the secular product {value}"
            )
        slots.append((int(round(cnt)), admissible))
    assignment: dict = {}

    def backtrack(idx):
        if idx == len(slots):
            return all(v == 0 for v in left_quota.values()) and all(
                v == 0 for v in right_quota.values()
            )
        cnt, admissible = slots[idx]
        return place(idx, cnt, admissible, 0)

    def place(idx, remaining, admissible, start):
        if remaining == 0:
            return backtrack(idx + 1)
        for pos in range(start, len(admissible)):
            i, j = admissible[pos]
            take = min(remaining, left_quota[i], right_quota[j])
            for use in range(take, 0, -1):
                left_quota[i] -= use
                right_quota[j] -= use
                assignment[(i, j)] = assignment.get((i, j), 0) + use
                if place(idx, remaining - use, admissible, pos + 1):
                    return True
                assignment[(i, j)] -= use
                left_quota[i] += use
                right_quota[j] += use
        return False

    if not backtrack(0):
        raise SimilarityError("endpoint-type pairing is infeasible (inconclusive)")
    return assignment


def _merge_problems(problems):
    merged: dict = {}
    for p in problems:
        key = (_round_pair(p.left), _round_pair(p.right))
        if key in merged:
            merged[key] = IntervalProblem(p.left, p.right, merged[key].count + p.count)
        else:
            merged[key] = p
    return sorted(merged.values(), key=lambda p: (str(p.labels), -p.count))


def _round_pair(t):
    return (round(complex(t[0]).real, 9), round(complex(t[0]).imag, 9),
            round(complex(t[1]).real, 9), round(complex(t[1]).imag, 9))


def _interval_spectrum(prob: IntervalProblem, a: float, k_max: float):
    """Positive real eigen-wavenumbers of one decoupled interval in (0, k_max]."""
    la, lb = prob.labels
    labels = {la, lb}
    out = []
    if labels == {"dirichlet"} or labels == {"neumann"}:
        n = 1
        while n * math.pi / a <= k_max + 1e-12:
            out.append(n * math.pi / a)
            n += 1
        return out
    if labels == {"dirichlet", "neumann"}:
        n = 1
        while (n - 0.5) * math.pi / a <= k_max + 1e-12:
            out.append((n - 0.5) * math.pi / a)
            n += 1
        return out
    # general scalar conditions: solve the 2 x 2 secular problem numerically
    from .graph import interval as interval_graph
    from .spectrum import SolverOptions, real_axis_scan

    (al, bl), (ar, br) = prob.left, prob.right
    bc = BoundaryConditions(np.diag([al, ar]), np.diag([bl, br]))
    sys_ = SecularSystem(interval_graph(a), bc)
    pts = real_axis_scan(sys_, k_max, SolverOptions())
    return [p.k.real for p in pts for _ in range(p.geometric_multiplicity)]


def _interval_has_zero_mode(prob: IntervalProblem, a: float) -> bool:
    from .graph import interval as interval_graph

    (al, bl), (ar, br) = prob.left, prob.right
    bc = BoundaryConditions(np.diag([al, ar]), np.diag([bl, br]))
    sys_ = SecularSystem(interval_graph(a), bc)
    return sys_.zero_mode_kernel().shape[1] > 0
