"""k-parameterized secular matrices for one graph plus boundary condition.

For the eigenfunction ansatz

    psi(x) = s_e e^{ikx}                     on external edges,
    psi(x) = alpha_i e^{ikx} + beta_i e^{-ikx}  on internal edges,

the trace vectors are psi = X(k) c and psi' = ik Y(k) c with the
coefficient vector c = (s, alpha, beta).  The boundary condition turns
into Z(k) c = 0 with Z(k) = A X(k) + ik B Y(k), an entire function of k.
With S(k) the Cayley transform this factorizes as

    Z(k) = (A + ikB) [1 - S(k) T(k)] R_plus(k),

which the resolvent and similarity modules rely on.  Zero-energy modes
use the piecewise-affine ansatz alpha_i + beta_i x with the matrices
X0, Y0 instead.
"""

from __future__ import annotations

import cmath
import math
import warnings

import numpy as np
import scipy.linalg as sla

from .bcspace import BoundaryConditions, cayley, nullspace, operator_norm
from .graph import MetricGraph


class SecularError(ValueError):
    pass


def _block(nE, nI, EE=None, LL=None, LR=None, RL=None, RR=None):
    """Assemble a d x d matrix from the E, I-left, I-right block pattern."""
    d = nE + 2 * nI
    M = np.zeros((d, d), dtype=complex)
    if EE is not None:
        M[:nE, :nE] = EE
    sl_l = slice(nE, nE + nI)
    sl_r = slice(nE + nI, d)
    for sl_row, sl_col, val in (
        (sl_l, sl_l, LL),
        (sl_l, sl_r, LR),
        (sl_r, sl_l, RL),
        (sl_r, sl_r, RR),
    ):
        if val is not None:
            M[sl_row, sl_col] = val
    return M


class SecularSystem:
    """Evaluators for X, Y, Z, T, R_plus, Phi and the zero-mode matrices."""

    def __init__(self, graph: MetricGraph, bc: BoundaryConditions):
        if bc.d != graph.d:
            raise SecularError(
                f"boundary condition size {bc.d} does not match graph d = {graph.d}"
            )
        self.graph = graph
        self.bc = bc
        self.a = graph.lengths

    # -- trace matrices of the oscillatory ansatz ------------------------
    def X(self, k: complex) -> np.ndarray:
        nE, nI = self.graph.n_external, self.graph.n_internal
        ep = np.exp(1j * k * self.a)
        em = np.exp(-1j * k * self.a)
        return _block(
            nE, nI,
            EE=np.eye(nE),
            LL=np.eye(nI), LR=np.eye(nI),
            RL=np.diag(ep), RR=np.diag(em),
        )

    def Y(self, k: complex) -> np.ndarray:
        nE, nI = self.graph.n_external, self.graph.n_internal
        ep = np.exp(1j * k * self.a)
        em = np.exp(-1j * k * self.a)
        return _block(
            nE, nI,
            EE=np.eye(nE),
            LL=np.eye(nI), LR=-np.eye(nI),
            RL=-np.diag(ep), RR=np.diag(em),
        )

    def T(self, k: complex) -> np.ndarray:
        nE, nI = self.graph.n_external, self.graph.n_internal
        e = np.exp(1j * k * self.a)
        return _block(nE, nI, LR=np.diag(e), RL=np.diag(e))

    def R_plus(self, k: complex) -> np.ndarray:
        nE, nI = self.graph.n_external, self.graph.n_internal
        return _block(
            nE, nI,
            EE=np.eye(nE), LL=np.eye(nI),
            RR=np.diag(np.exp(-1j * k * self.a)),
        )

    def Z(self, k: complex) -> np.ndarray:
        return self.bc.A @ self.X(k) + 1j * k * self.bc.B @ self.Y(k)

    def Phi(self, x: np.ndarray, k: complex) -> np.ndarray:
        """Profile matrix, one row per edge line, at per-edge coordinates x."""
        nE, nI = self.graph.n_external, self.graph.n_internal
        x = np.asarray(x, dtype=float)
        if x.shape != (nE + nI,):
            raise SecularError(f"expected {nE + nI} per-edge coordinates")
        out = np.zeros((nE + nI, self.graph.d), dtype=complex)
        for j in range(nE):
            out[j, j] = cmath.exp(1j * k * x[j])
        for i in range(nI):
            out[nE + i, nE + i] = cmath.exp(1j * k * x[nE + i])
            out[nE + i, nE + nI + i] = cmath.exp(-1j * k * x[nE + i])
        return out

    # -- zero-energy ansatz ----------------------------------------------
    def X0(self) -> np.ndarray:
        nE, nI = self.graph.n_external, self.graph.n_internal
        return _block(nE, nI, LL=np.eye(nI), RL=np.eye(nI), RR=np.diag(self.a))

    def Y0(self) -> np.ndarray:
        nE, nI = self.graph.n_external, self.graph.n_internal
        return _block(nE, nI, LR=np.eye(nI), RR=-np.eye(nI))

    def zero_mode_matrix(self) -> np.ndarray:
        """Columns of A X0 + B Y0 acting on the (alpha, beta) coordinates.

        Zero is an eigenvalue exactly when this d x 2|I| matrix has a
        nontrivial kernel; kernel vectors give the piecewise-affine
        eigenfunctions alpha_i + beta_i x (zero on external edges).
        """
        full = self.bc.A @ self.X0() + self.bc.B @ self.Y0()
        return full[:, self.graph.n_external:]

    def zero_mode_kernel(self) -> np.ndarray:
        if self.graph.n_internal == 0:
            return np.zeros((0, 0), dtype=complex)
        return nullspace(self.zero_mode_matrix())

    # -- determinant machinery --------------------------------------------
    def log_det_Z(self, k: complex) -> complex:
        """log|det Z(k)| + i arg(det Z(k)) via pivoted LU.

        The real part is -inf when Z(k) is exactly singular in floating
        point.  The imaginary part is a sum of per-factor principal
        arguments; callers track continuity along paths themselves.
        """
        Z = self.Z(k)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu, piv = sla.lu_factor(Z, check_finite=False)
        diag = np.diag(lu)
        if np.any(diag == 0.0):
            return complex(-math.inf, 0.0)
        logabs = float(np.sum(np.log(np.abs(diag))))
        phase = float(np.sum(np.angle(diag)))
        swaps = int(np.sum(piv != np.arange(len(piv))))
        if swaps % 2:
            phase += math.pi
        return complex(logabs, phase)

    def det_Z(self, k: complex) -> complex:
        v = self.log_det_Z(k)
        if v.real == -math.inf:
            return 0.0
        return cmath.exp(v)

    def factorization_residual(self, k: complex) -> float:
        """Frobenius residual of Z = (A+ikB)(1 - S T) R_plus, relative to |Z|."""
        S = cayley(self.bc, k)
        lhs = self.bc.A + 1j * k * self.bc.B
        eye = np.eye(self.graph.d)
        rebuilt = lhs @ (eye - S @ self.T(k)) @ self.R_plus(k)
        Z = self.Z(k)
        scale = max(operator_norm(Z), 1e-300)
        return float(np.linalg.norm(Z - rebuilt) / scale)

    def det_identically_zero(self, probes: int = 12) -> bool:
        """Sampled test for det Z == 0 as an entire function of k."""
        rng = np.random.default_rng(7)
        for _ in range(probes):
            k = complex(rng.uniform(0.3, 3.0), rng.uniform(0.1, 1.5))
            v = self.log_det_Z(k)
            if v.real != -math.inf and v.real > -34 + self._scale_log(k):
                return False
        return True

    def _scale_log(self, k: complex) -> float:
        """Crude log-scale of det Z used for relative smallness decisions."""
        Z = self.Z(k)
        norms = np.linalg.norm(Z, axis=1)
        norms = np.where(norms == 0, 1.0, norms)
        return float(np.sum(np.log(norms)))
