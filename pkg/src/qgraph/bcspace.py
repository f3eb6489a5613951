"""Boundary conditions A psi + B psi' = 0 and their classification.

A boundary condition is a pair of d x d complex matrices (A, B); its
semantic content is the subspace M(A, B) = Ker (A, B) of the doubled
trace space.  Two pairs are equivalent when the subspaces agree, which
happens exactly when (A', B') = (CA, CB) for an invertible C.  All
equivalence tests in this module therefore go through orthogonal
projectors onto M(A, B), never through matrix entries.

The module also hosts the small dense-linear-algebra helpers (numerical
rank, nullspaces, orthogonal projectors) shared by the rest of the
package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

# Singular values below max(shape) * eps * sigma_max * RANK_SAFETY count as
# zero.  The extra factor keeps classification answers stable for inputs
# assembled from floating-point formulas.
RANK_SAFETY = 1e3

# Witness wavenumbers for the Cayley transform are scanned on the positive
# imaginary axis; det(A + ikB) is a polynomial in k, so it can vanish at
# finitely many points only and the scan misses them almost surely.
_WITNESS_EXPONENTS = range(-4, 9)


class BoundaryConditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# dense linear algebra helpers
# ---------------------------------------------------------------------------

def rank_tolerance(sigmas: np.ndarray, shape, rtol: float | None = None) -> float:
    if sigmas.size == 0:
        return 0.0
    if rtol is None:
        rtol = max(shape) * np.finfo(float).eps * RANK_SAFETY
    return rtol * sigmas[0]


def svd_rank(M: np.ndarray, rtol: float | None = None):
    """Numerical rank of M with the singular-value gap around the cutoff.

    Returns (rank, sigmas, gap) where gap is the ratio between the smallest
    kept and the largest dropped singular value (inf when nothing is
    dropped or everything is zero).
    """
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if min(M.shape) == 0:
        return 0, np.zeros(0), np.inf
    sigmas = sla.svdvals(M)
    cut = rank_tolerance(sigmas, M.shape, rtol)
    rank = int(np.sum(sigmas > cut))
    if rank == 0 or rank == len(sigmas) or sigmas[rank] == 0.0:
        gap = np.inf
    else:
        gap = float(sigmas[rank - 1] / sigmas[rank])
    return rank, sigmas, gap


def nullspace(M: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the right nullspace, columns of the result."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    rows, cols = M.shape
    if rows == 0:
        return np.eye(cols, dtype=complex)
    _, sigmas, vh = sla.svd(M, full_matrices=True)
    cut = rank_tolerance(sigmas, M.shape, rtol)
    rank = int(np.sum(sigmas > cut))
    return vh[rank:].conj().T


def column_space(M: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the column space, columns of the result."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[1] == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, sigmas, _ = sla.svd(M, full_matrices=False)
    cut = rank_tolerance(sigmas, M.shape, rtol)
    rank = int(np.sum(sigmas > cut))
    return u[:, :rank]


def orth_projector(V: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span of V."""
    Q = column_space(V)
    return Q @ Q.conj().T


def operator_norm(M: np.ndarray) -> float:
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if min(M.shape) == 0:
        return 0.0
    return float(sla.svdvals(M)[0])


def cond2(M: np.ndarray) -> float:
    """2-norm condition number; inf for singular matrices."""
    s = sla.svdvals(np.asarray(M, dtype=complex))
    if s.size == 0 or s[-1] == 0.0:
        return np.inf
    return float(s[0] / s[-1])


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BoundaryConditions:
    """Pair of d x d matrices; the subspace Ker (A, B) is the content."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        B = np.atleast_2d(np.asarray(self.B, dtype=complex))
        if A.shape != B.shape or A.shape[0] != A.shape[1]:
            raise BoundaryConditionError(
                f"A and B must be square of equal size, got {A.shape} and {B.shape}"
            )
        A.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    def scale(self) -> float:
        return max(operator_norm(self.A), operator_norm(self.B), 1e-300)


@dataclass(frozen=True)
class SectorialPair:
    """Projector P and operator L with L = Pperp L Pperp acting in Ker P."""

    P: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=complex)
        L = np.asarray(self.L, dtype=complex)
        scale = max(operator_norm(L), 1.0)
        if operator_norm(P @ P - P) > 1e-10 or operator_norm(P - P.conj().T) > 1e-10:
            raise BoundaryConditionError("P must be an orthogonal projector")
        Pp = np.eye(P.shape[0]) - P
        if operator_norm(Pp @ L @ Pp - L) > 1e-10 * scale:
            raise BoundaryConditionError("L must satisfy L = Pperp L Pperp")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "L", L)

    def boundary_conditions(self) -> BoundaryConditions:
        Pp = np.eye(self.P.shape[0]) - self.P
        return BoundaryConditions(self.L + self.P, Pp)


@dataclass(frozen=True)
class AntiLinearSymmetry:
    """Anti-linear boundary map v -> C conj(v) with invertible C."""

    C: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.C, dtype=complex)
        if cond2(C) == np.inf:
            raise BoundaryConditionError("symmetry matrix must be invertible")
        object.__setattr__(self, "C", C)


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    witness_k: Optional[complex]
    margin: float  # singular-value gap of the stacked [A; B] rank decision


@dataclass(frozen=True)
class Classification:
    dim_M: int
    regular: bool
    self_adjoint: bool
    m_sectorial: bool
    sectorial_pair: Optional[SectorialPair]
    spectrum_is_whole_plane: bool
    irregular_dim_d: bool
    t_self_adjoint: Optional[bool]

    def as_dict(self) -> dict:
        return {
            "dim_M": self.dim_M,
            "regular": self.regular,
            "self_adjoint": self.self_adjoint,
            "m_sectorial": self.m_sectorial,
            "spectrum_is_whole_plane": self.spectrum_is_whole_plane,
            "irregular_dim_d": self.irregular_dim_d,
            "t_self_adjoint": self.t_self_adjoint,
        }


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def dim_M(bc: BoundaryConditions) -> int:
    """Dimension of Ker (A, B) inside the doubled trace space."""
    stacked = np.hstack([bc.A, bc.B])
    rank, _, _ = svd_rank(stacked)
    return 2 * bc.d - rank


def subspace_M(bc: BoundaryConditions) -> np.ndarray:
    """Orthonormal basis (columns) of M(A, B) in C^{2d}."""
    return nullspace(np.hstack([bc.A, bc.B]))


def witness_k(bc: BoundaryConditions) -> Optional[complex]:
    """Best-conditioned k on the positive imaginary axis with A+ikB invertible."""
    best, best_cond = None, np.inf
    for j in _WITNESS_EXPONENTS:
        k = 1j * (2.0 ** j)
        c = cond2(bc.A + 1j * k * bc.B)
        if c < best_cond:
            best, best_cond = k, c
    if best_cond > 1e13:
        return None
    return best


def is_regular(bc: BoundaryConditions) -> RegularityResult:
    """Regularity test via Ker A cap Ker B (requires dim M = d).

    Regular means A + ikB is invertible for some k, equivalently the
    stacked 2d x d matrix [A; B] has full column rank.
    """
    if dim_M(bc) != bc.d:
        raise BoundaryConditionError(
            "regularity is only defined for dim M(A,B) = d; "
            "classify() reports such inputs as whole-plane spectrum"
        )
    stacked = np.vstack([bc.A, bc.B])
    rank, _, gap = svd_rank(stacked)
    if rank < bc.d:
        return RegularityResult(False, None, gap)
    return RegularityResult(True, witness_k(bc), gap)


def is_self_adjoint(bc: BoundaryConditions, rtol: float = 1e-10) -> bool:
    """AB* = BA* together with dim M(A,B) = d."""
    herm_defect = operator_norm(bc.A @ bc.B.conj().T - bc.B @ bc.A.conj().T)
    return herm_defect <= rtol * bc.scale() ** 2 and dim_M(bc) == bc.d


def cayley(bc: BoundaryConditions, k: complex, cond_cap: float = 1e13) -> np.ndarray:
    """Cayley transform S(k) = -(A + ikB)^{-1} (A - ikB)."""
    if k == 0:
        raise BoundaryConditionError("Cayley transform requires k != 0")
    lhs = bc.A + 1j * k * bc.B
    if cond2(lhs) > cond_cap:
        raise BoundaryConditionError(f"A + ikB is numerically singular at k={k}")
    return -sla.solve(lhs, bc.A - 1j * k * bc.B)


def from_cayley(S: np.ndarray, k: complex) -> BoundaryConditions:
    """Boundary conditions with Cayley transform S at wavenumber k."""
    S = np.asarray(S, dtype=complex)
    eye = np.eye(S.shape[0])
    A = -0.5 * (S - eye)
    B = (S + eye) / (2j * k)
    return BoundaryConditions(A, B)


def adjoint_subspace(bc: BoundaryConditions) -> np.ndarray:
    """Orthonormal basis of M* = (J M)^perp, valid for any dim M."""
    d = bc.d
    basis = subspace_M(bc)
    J = np.block([
        [np.zeros((d, d)), np.eye(d)],
        [-np.eye(d), np.zeros((d, d))],
    ]).astype(complex)
    JM = J @ basis
    return nullspace(JM.conj().T)


def adjoint(bc: BoundaryConditions) -> BoundaryConditions:
    """Boundary conditions of the adjoint Laplacian.

    Regular pairs go through the Cayley transform: the adjoint is
    represented by A' = -(S(k)* - 1)/2 and B' = (S(k)* + 1)/(-2i conj(k)).
    Otherwise M* = (J M)^perp is computed directly, which requires
    dim M <= d so that M* is representable by a d x d pair.
    """
    d = bc.d
    n = dim_M(bc)
    if n == d:
        k = witness_k(bc)
        if k is not None:
            S = cayley(bc, k)
            Sh = S.conj().T
            eye = np.eye(d)
            Ap = -0.5 * (Sh - eye)
            Bp = (Sh + eye) / (-2j * np.conj(k))
            return BoundaryConditions(Ap, Bp)
    if n > d:
        raise BoundaryConditionError(
            f"dim M = {n} > d = {d}: the adjoint subspace has dimension {2*d - n} < d "
            "and admits no d x d representation; use adjoint_subspace()"
        )
    basis = adjoint_subspace(bc)  # 2d x (2d - n) with 2d - n >= d
    complement = nullspace(basis.conj().T)  # basis of (M*)^perp, dimension n <= d
    mat = np.zeros((d, 2 * d), dtype=complex)
    mat[: complement.shape[1], :] = complement.conj().T
    return BoundaryConditions(mat[:, :d], mat[:, d:])


def m_sectorial(bc: BoundaryConditions, rtol: float = 1e-10) -> Optional[SectorialPair]:
    """Equivalent (P, L) parametrization when one exists, else None.

    The criterion is dim M = d together with Q A Pperp = 0, where Q
    projects onto (Ran B)^perp and Pperp onto (Ker B)^perp.  The operator
    is L = (B restricted to Ran B*)^{-1} A Pperp.
    """
    if dim_M(bc) != bc.d:
        return None
    d = bc.d
    Q = np.eye(d) - orth_projector(bc.B)
    Pperp = orth_projector(bc.B.conj().T)
    P = np.eye(d) - Pperp
    if operator_norm(Q @ bc.A @ Pperp) > rtol * bc.scale():
        return None
    L = np.linalg.pinv(bc.B) @ bc.A @ Pperp
    L = Pperp @ L @ Pperp
    pair = SectorialPair(0.5 * (P + P.conj().T), L)
    # paranoia: the parametrization must reproduce the same subspace
    if projector_distance(bc, pair.boundary_conditions()) > 1e-7:
        return None
    return pair


def projector_onto_M(bc: BoundaryConditions) -> np.ndarray:
    """Hermitian idempotent of rank d projecting onto M(A, B).

    Uses 1 - (A*; B*)(AA* + BB*)^{-1}(A, B), which requires dim M = d.
    """
    gram = bc.A @ bc.A.conj().T + bc.B @ bc.B.conj().T
    if cond2(gram) > 1e14:
        raise BoundaryConditionError(
            "AA* + BB* is singular, dim M(A,B) != d"
        )
    stacked = np.hstack([bc.A, bc.B])
    P_perp = stacked.conj().T @ sla.solve(gram, stacked, assume_a="pos")
    P = np.eye(2 * bc.d) - P_perp
    return 0.5 * (P + P.conj().T)


def projector_distance(bc1: BoundaryConditions, bc2: BoundaryConditions) -> float:
    """Operator norm of the difference of the projectors onto M1, M2."""
    if bc1.d != bc2.d:
        raise BoundaryConditionError("boundary conditions live on different trace spaces")
    n1, n2 = dim_M(bc1), dim_M(bc2)
    if n1 != n2:
        raise BoundaryConditionError(f"dim M mismatch: {n1} vs {n2}")
    if n1 == bc1.d:
        P1, P2 = projector_onto_M(bc1), projector_onto_M(bc2)
    else:
        P1 = orth_projector(subspace_M(bc1))
        P2 = orth_projector(subspace_M(bc2))
    return operator_norm(P1 - P2)


def equivalent(bc1: BoundaryConditions, bc2: BoundaryConditions, tol: float = 1e-9) -> bool:
    try:
        return projector_distance(bc1, bc2) <= tol
    except BoundaryConditionError:
        return False


def regularize(bc: BoundaryConditions, eps: float) -> BoundaryConditions:
    """Regularizing perturbation (A, B + eps P), P the projector onto Ker B."""
    if eps <= 0:
        raise BoundaryConditionError("eps must be positive")
    if dim_M(bc) != bc.d:
        raise BoundaryConditionError("regularize requires dim M(A,B) = d")
    P = orth_projector(nullspace(bc.B))
    return BoundaryConditions(bc.A, bc.B + eps * P)


def check_antilinear_symmetry(
    bc: BoundaryConditions,
    sym: AntiLinearSymmetry,
    kappa: float,
    rtol: float = 1e-9,
) -> bool:
    """Test S(i kappa)* = conj(C^{-1} S(i kappa) C).

    With C = 1 this is the T-self-adjointness test, i.e. S symmetric.
    Requires A - kappa B invertible.
    """
    if kappa <= 0:
        raise BoundaryConditionError("kappa must be a positive real number")
    S = cayley(bc, 1j * kappa)
    C = sym.C
    conjugated = np.conj(sla.solve(C, S @ C))
    return operator_norm(S.conj().T - conjugated) <= rtol * max(operator_norm(S), 1.0)


def classify(bc: BoundaryConditions) -> Classification:
    """Full classification record for one boundary-condition pair."""
    n = dim_M(bc)
    d = bc.d
    if n != d:
        return Classification(
            dim_M=n,
            regular=False,
            self_adjoint=False,
            m_sectorial=False,
            sectorial_pair=None,
            spectrum_is_whole_plane=True,
            irregular_dim_d=False,
            t_self_adjoint=None,
        )
    reg = is_regular(bc)
    pair = m_sectorial(bc)
    t_sa: Optional[bool] = None
    for j in _WITNESS_EXPONENTS:
        kappa = 2.0 ** j
        if cond2(bc.A - kappa * bc.B) < 1e12:
            t_sa = check_antilinear_symmetry(bc, AntiLinearSymmetry(np.eye(d)), kappa)
            break
    return Classification(
        dim_M=n,
        regular=reg.regular,
        self_adjoint=is_self_adjoint(bc),
        m_sectorial=pair is not None,
        sectorial_pair=pair,
        spectrum_is_whole_plane=False,
        irregular_dim_d=not reg.regular,
        t_self_adjoint=t_sa,
    )


# ---------------------------------------------------------------------------
# common constant pairs
# ---------------------------------------------------------------------------

def dirichlet(d: int) -> BoundaryConditions:
    return BoundaryConditions(np.eye(d), np.zeros((d, d)))


def neumann(d: int) -> BoundaryConditions:
    return BoundaryConditions(np.zeros((d, d)), np.eye(d))
