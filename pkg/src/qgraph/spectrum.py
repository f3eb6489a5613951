"""Eigenvalue search for the secular determinant and spectral classification.

det Z(k) is entire in k, so zeros inside a rectangle are located by the
argument principle: the boundary winding number equals the number of
enclosed zeros with multiplicity, and recursive subdivision isolates
them.  Zeros sitting exactly on the real or imaginary axis (where search
rectangles have their edges) are found first by a one-dimensional scan
and then divided out of the determinant, which keeps every contour
winding integral without indenting the path.

Wavenumber conventions: eigenvalues are lambda = k^2 for zeros with
Im k > 0; on compact graphs positive real zeros are eigenvalues too; for
graphs without internal edges real zeros are spectral-singularity
candidates, and in the mixed case a real zero is upgraded to an
eigenvalue exactly when Z(k) has a kernel vector with vanishing external
coefficients.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bcspace import classify, nullspace, svd_rank
from .graph import MetricGraph
from .secular import SecularSystem

_TWO_PI = 2.0 * math.pi


class WalkerError(RuntimeError):
    """Contour walker could not certify the zero count."""


class IrregularBCError(ValueError):
    """Spectral task refused: boundary conditions are not regular."""


class _PanelError(Exception):
    def __init__(self, z, message="phase tracking failed"):
        super().__init__(f"{message} near k = {z}")
        self.z = z


# ---------------------------------------------------------------------------
# options and result types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Axis-aligned search rectangle in the k plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate region {self}")

    @classmethod
    def quadrant(cls, re_max: float, im_max: float | None = None) -> "Region":
        return cls(0.0, float(re_max), 0.0, float(im_max if im_max is not None else re_max))

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)

    def corners(self):
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )

    def contains(self, k: complex, margin: float = 0.0) -> bool:
        return (
            self.re_min - margin <= k.real <= self.re_max + margin
            and self.im_min - margin <= k.imag <= self.im_max + margin
        )

    def as_list(self):
        return [self.re_min, self.re_max, self.im_min, self.im_max]


@dataclass
class SolverOptions:
    phase_cap: float = math.pi / 2      # max phase increment per accepted step
    mag_cap: float = 1.5                # max log-magnitude increment per step
    max_depth: int = 48
    newton_iters: int = 60
    newton_step: float = 1e-7           # finite-difference step scale for log det
    merge_scale: float = 1e-9           # duplicate-merging radius scale
    geometric_rtol: float = 1e-8        # rank cutoff for dim Ker Z at a zero
    axis_tol: float = 1e-8              # |off-axis| below this counts as on-axis
    scan_retries: int = 3
    threads: int = 1
    scan_density: float | None = None   # samples per unit k on axis scans


@dataclass(frozen=True)
class SpectralPoint:
    k: complex
    lam: complex
    winding_multiplicity: int
    geometric_multiplicity: int
    status: str                          # eigenvalue | real_k_candidate |
    #                                      spectral_singularity_candidate | zero_mode
    sv_gap: float = math.inf

    def as_dict(self) -> dict:
        return {
            "k": [self.k.real, self.k.imag],
            "lambda": [self.lam.real, self.lam.imag],
            "winding_multiplicity": self.winding_multiplicity,
            "geometric_multiplicity": self.geometric_multiplicity,
            "status": self.status,
            "sv_gap": self.sv_gap,
        }


@dataclass(frozen=True)
class Eigenfunction:
    """Edgewise coefficients of one eigenfunction.

    For oscillatory modes (polynomial=False) the profile is
    s_e e^{ikx} on external edges and alpha_i e^{ikx} + beta_i e^{-ikx}
    on internal ones.  Zero modes (polynomial=True, k=0) are read as
    alpha_i + beta_i x on internal edges and zero on external edges.
    """

    k: complex
    s: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    residual: float
    polynomial: bool = False

    def evaluate(self, line_index: int, x):
        x = np.asarray(x, dtype=float)
        nE = len(self.s)
        if line_index < nE:
            if self.polynomial:
                return np.zeros_like(x, dtype=complex)
            return self.s[line_index] * np.exp(1j * self.k * x)
        i = line_index - nE
        if self.polynomial:
            return self.alpha[i] + self.beta[i] * x
        return self.alpha[i] * np.exp(1j * self.k * x) + self.beta[i] * np.exp(-1j * self.k * x)


@dataclass(frozen=True)
class WeylReport:
    slope: float
    intercept: float
    relative_error: float
    n_points: int

    def as_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "relative_error": self.relative_error,
            "n_points": self.n_points,
        }


@dataclass
class SpectrumReport:
    points: list
    essential: str
    residual_candidates: list
    region: Optional[Region]
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "points": [p.as_dict() for p in self.points],
            "essential": self.essential,
            "residual_candidates": list(self.residual_candidates),
            "region": self.region.as_list() if self.region else None,
            "diagnostics": dict(self.diagnostics),
        }


# ---------------------------------------------------------------------------
# the deflated log-determinant and phase tracking
# ---------------------------------------------------------------------------

class _LogDet:
    """Cached log det Z with known zeros divided out.

    `rate` bounds the phase speed |d arg det / dk| away from zeros:
    det Z is a finite combination of e^{ik sigma} with |sigma| bounded by
    the total internal length, plus polynomial factors and the deflation
    terms.  Phase trackers seed their sampling from it.
    """

    def __init__(self, sys: SecularSystem, deflations=()):
        self._sys = sys
        self._cache: dict[complex, complex] = {}
        # (center, order, frozen radius): inside the frozen disk the raw
        # determinant is cancellation noise (true value ~ rho^order), so
        # all queries there collapse to one representative sample
        self.deflations = [
            (c, m, min(1e-3, max(1e-8, 10.0 * (2.2e-16) ** (1.0 / max(m, 1)))))
            for c, m in deflations
        ]
        self.rate = (
            float(sys.graph.total_length)
            + 1.0
            + 0.5 * sum(m for _, m, _ in self.deflations)
        )

    def raw(self, k: complex) -> complex:
        v = self._cache.get(k)
        if v is None:
            v = self._sys.log_det_Z(k)
            self._cache[k] = v
        return v

    def __call__(self, k: complex) -> complex:
        for c, _, rho in self.deflations:
            if abs(k - c) < rho:
                k = c + rho * (0.6 + 0.8j)
                break
        v = self.raw(k)
        if not math.isfinite(v.real):
            return v
        for c, m, _ in self.deflations:
            v = v - m * cmath.log(k - c)
        return v


def _wrap(x: float) -> float:
    return (x + math.pi) % _TWO_PI - math.pi


def _segment_phase(f: _LogDet, z0: complex, z1: complex, opts: SolverOptions) -> float:
    """Continuous phase change of det along [z0, z1] by adaptive bisection.

    Initial samples are spaced below pi / (2 rate) so that no accepted
    step can hide a full phase turn; the caps then trigger bisection.
    """
    length = abs(z1 - z0)
    n0 = max(1, int(math.ceil(length * f.rate * 2.0 / math.pi)))
    knots = [z0 + (z1 - z0) * j / n0 for j in range(n0 + 1)]
    vals = [f(z) for z in knots]
    total = 0.0
    stack = [
        (knots[j], vals[j], knots[j + 1], vals[j + 1], 0) for j in range(n0)
    ]
    while stack:
        a, fa, b, fb, depth = stack.pop()
        if not (math.isfinite(fa.real) and math.isfinite(fb.real)):
            raise _PanelError(a if not math.isfinite(fa.real) else b, "determinant vanishes on path")
        dphi = _wrap(fb.imag - fa.imag)
        dmag = abs(fb.real - fa.real)
        if abs(dphi) <= opts.phase_cap and dmag <= opts.mag_cap:
            total += dphi
            continue
        if depth >= opts.max_depth or abs(b - a) < 1e-13 * (1.0 + abs(a)):
            raise _PanelError(0.5 * (a + b))
        mid = 0.5 * (a + b)
        fm = f(mid)
        stack.append((mid, fm, b, fb, depth + 1))
        stack.append((a, fa, mid, fm, depth + 1))
    return total


def _rect_winding(f: _LogDet, rect: Region, opts: SolverOptions) -> int:
    c = rect.corners()
    total = 0.0
    for i in range(4):
        total += _segment_phase(f, c[i], c[(i + 1) % 4], opts)
    w = total / _TWO_PI
    if abs(w - round(w)) > 0.25:
        raise _PanelError(rect.center, "non-integral rectangle winding")
    return int(round(w))


def _circle_winding(f: _LogDet, center: complex, radius: float, opts: SolverOptions) -> int:
    """Winding around a circle, with doubling until two passes agree.

    The phase turns m times for an order-m zero regardless of radius, so
    a fixed sample count could alias large multiplicities.
    """
    prev = None
    n = 32
    while n <= 4096:
        pts = [center + radius * cmath.exp(2j * math.pi * j / n) for j in range(n)]
        vals = [f(z) for z in pts]
        total = 0.0
        aliased = False
        for j in range(n):
            fa, fb = vals[j], vals[(j + 1) % n]
            if not (math.isfinite(fa.real) and math.isfinite(fb.real)):
                raise _PanelError(center, "determinant vanishes on circle")
            d = _wrap(fb.imag - fa.imag)
            if abs(d) > opts.phase_cap:
                aliased = True
            total += d
        w = total / _TWO_PI
        if not aliased and abs(w - round(w)) <= 0.25 and prev == round(w):
            return int(round(w))
        prev = round(w) if abs(w - round(w)) <= 0.25 else None
        n *= 2
    raise _PanelError(center, "circle winding did not stabilize")


def _log_derivative(f: _LogDet, k: complex, h: float) -> Optional[complex]:
    """det'(k)/det(k) from determinant ratios, branch-insensitive."""
    fk = f(k)
    if not math.isfinite(fk.real):
        return None
    fp, fm = f(k + h), f(k - h)
    if not (math.isfinite(fp.real) and math.isfinite(fm.real)):
        return None
    dp, dm = fp - fk, fm - fk
    if max(dp.real, dm.real) > 200.0:
        return complex(math.inf, 0.0)  # k sits deep inside a zero's basin
    return (cmath.exp(dp) - cmath.exp(dm)) / (2.0 * h)


def _newton_polish(
    f: _LogDet, k0: complex, mult: int | None, opts: SolverOptions
) -> Optional[complex]:
    """Newton iteration on det with known or unknown zero order.

    With `mult` given, the step -mult / (det'/det) converges quadratically
    to an order-`mult` zero.  With `mult` None, Newton runs on
    u = det/det', which has a simple zero at a zero of any order.
    """
    k = k0
    last_step = math.inf
    for _ in range(opts.newton_iters):
        scale = 1.0 + abs(k)
        # the difference step must shrink with the remaining distance to the
        # root, else the logarithmic derivative of high-order zeros stalls
        h = opts.newton_step * scale
        if last_step < math.inf:
            h = min(h, max(0.3 * last_step, 1e-12 * scale))
        D = _log_derivative(f, k, h)
        if D is None:
            k += 1e-9 * scale * (1 + 1j)
            continue
        if D == complex(math.inf, 0.0):
            return k
        if D == 0:
            return None
        if mult is not None:
            step = -mult / D
        else:
            Dp = _log_derivative(f, k + h, h)
            Dm = _log_derivative(f, k - h, h)
            if Dp is None or Dm is None or Dp in (0, complex(math.inf, 0.0)) \
                    or Dm in (0, complex(math.inf, 0.0)):
                step = -1.0 / D
            else:
                u0, up, um = 1.0 / D, 1.0 / Dp, 1.0 / Dm
                du = (up - um) / (2.0 * h)
                step = -u0 / du if du != 0 else -u0
        if abs(step) > 0.3 * scale:
            step *= 0.3 * scale / abs(step)
        k = k + step
        if abs(step) < 1e-13 * scale and last_step < 1e-10 * scale:
            return k
        last_step = abs(step)
    return k if last_step < 1e-9 * (1.0 + abs(k)) else None


# ---------------------------------------------------------------------------
# recursive rectangle subdivision
# ---------------------------------------------------------------------------

_SPLIT_FRACTIONS = (0.5, 0.55, 0.45, 0.6, 0.4, 0.52, 0.48)


def _children(rect: Region, fx: float, fy: float):
    xm = rect.re_min + fx * (rect.re_max - rect.re_min)
    ym = rect.im_min + fy * (rect.im_max - rect.im_min)
    return (
        Region(rect.re_min, xm, rect.im_min, ym),
        Region(xm, rect.re_max, rect.im_min, ym),
        Region(rect.re_min, xm, ym, rect.im_max),
        Region(xm, rect.re_max, ym, rect.im_max),
    )


def _attempt_polish(f: _LogDet, rect: Region, w: int, opts: SolverOptions):
    root = _newton_polish(f, rect.center, w, opts)
    if root is None or not rect.contains(root, margin=-1e-12):
        return None
    scale = 1.0 + abs(root)
    try:
        if _circle_winding(f, root, 2e-7 * scale, opts) == w:
            return root
    except _PanelError:
        return None
    return None


def _rect_zeros(f: _LogDet, rect: Region, opts: SolverOptions, depth: int = 0,
                w: Optional[int] = None, pool: Optional[ThreadPoolExecutor] = None):
    if w is None:
        w = _rect_winding(f, rect, opts)
    if w == 0:
        return []
    if w < 0:
        raise WalkerError(f"negative winding {w} in {rect}: inconsistent deflation")
    scale = 1.0 + abs(rect.center)
    if w <= 8:
        root = _attempt_polish(f, rect, w, opts)
        if root is not None:
            return [(root, w)]
    if rect.diameter < 1e-9 * scale:
        # unresolved cluster below the duplicate-merging radius
        return [(rect.center, w)]
    if depth >= opts.max_depth:
        raise WalkerError(f"subdivision depth exceeded in {rect}")
    last_err: Exception | None = None
    for frac in _SPLIT_FRACTIONS:
        kids = _children(rect, frac, frac)
        try:
            if pool is not None and depth == 0:
                ws = list(pool.map(lambda r: _rect_winding(f, r, opts), kids))
            else:
                ws = [_rect_winding(f, k_, opts) for k_ in kids]
            if sum(ws) != w:
                raise _PanelError(rect.center, "child windings do not sum to parent")
            out = []
            for kid, kw in zip(kids, ws):
                out.extend(_rect_zeros(f, kid, opts, depth + 1, kw, pool))
            return out
        except _PanelError as err:  # zero too close to a split line: nudge and retry
            last_err = err
            continue
    raise WalkerError(
        f"zero too close to panel boundary after max subdivisions in {rect}: {last_err}"
    )


# ---------------------------------------------------------------------------
# axis scans
# ---------------------------------------------------------------------------

def _axis_points(sys: SecularSystem, lo: float, hi: float, opts: SolverOptions) -> np.ndarray:
    if opts.scan_density is not None:
        density = opts.scan_density
    else:
        density = 8.0 * (sys.graph.total_length + 1.0) / math.pi
    n = max(96, int(math.ceil((hi - lo) * density)))
    return np.linspace(lo, hi, n)


def _scan_axis(sys: SecularSystem, f: _LogDet, lo: float, hi: float, axis: str,
               opts: SolverOptions, density_boost: float = 1.0):
    """Zeros of det Z on a segment of the real or imaginary axis.

    `f` must be an undeflated evaluator (it doubles as the sample cache).
    Returns a list of (k, multiplicity).  Off-axis roots reached by the
    polish step are discarded; the rectangle walker finds those.
    """
    if hi <= lo:
        return []
    ts = _axis_points(sys, lo, hi, opts)
    if density_boost != 1.0:
        ts = np.linspace(lo, hi, int(len(ts) * density_boost))
    embed = (lambda t: complex(t, 0.0)) if axis == "re" else (lambda t: complex(0.0, t))
    vals = np.array([f.raw(embed(t)).real for t in ts])
    candidates = []
    for i in range(len(ts)):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i + 1 < len(ts) else math.inf
        if vals[i] <= left and vals[i] <= right:
            candidates.append(ts[i])
    roots: list[complex] = []
    for t in candidates:
        root = _newton_polish(f, embed(t), None, opts)
        if root is None:
            continue
        scale = 1.0 + abs(root)
        off = abs(root.imag) if axis == "re" else abs(root.real)
        t_found = root.real if axis == "re" else root.imag
        if off > opts.axis_tol * scale:
            continue
        # |k| below the origin guard is indistinguishable from the k = 0
        # determinant zero at double precision; the origin order covers it
        if not (lo - 1e-7 * scale <= t_found <= hi + 1e-7 * scale) or abs(t_found) < 1e-4:
            continue
        k = embed(t_found)
        if all(abs(k - r) > opts.merge_scale * scale for r in roots):
            roots.append(k)
    roots.sort(key=lambda z: (z.real, z.imag))
    out = []
    plain = f
    for i, k in enumerate(roots):
        scale = 1.0 + abs(k)
        gap = min(
            [abs(k - roots[j]) for j in range(len(roots)) if j != i] or [math.inf]
        )
        radius = min(1e-4 * scale, gap / 3.0, abs(k) / 2.0)
        try:
            m = _circle_winding(plain, k, radius, opts)
        except _PanelError:
            continue  # noise-floor artifact, not a zero
        if m > 0:
            out.append((k, m))
    return out


def _origin_order(sys: SecularSystem, axis_zeros, opts: SolverOptions) -> int:
    nearest = min([abs(k) for k, _ in axis_zeros] or [math.inf])
    radius = min(5e-4, nearest / 3.0)
    for _ in range(3):
        try:
            return _circle_winding(_LogDet(sys), 0.0 + 0.0j, radius, opts)
        except _PanelError:
            radius *= 3.0  # noise floor: zoom out, staying below nearest/3
            if radius > nearest / 3.0:
                break
    raise WalkerError("could not certify the determinant order at k = 0")


# ---------------------------------------------------------------------------
# public zero finding
# ---------------------------------------------------------------------------

def secular_zeros(sys: SecularSystem, region: Region, opts: SolverOptions | None = None):
    """All zeros of det Z in the region, as (k, winding multiplicity) pairs.

    Zeros on the real or imaginary axis are supported when the axis
    carries a boundary edge of the region (im_min = 0 or re_min = 0); the
    total count is certified against the boundary winding number.  Raises
    WalkerError when certification fails.
    """
    opts = opts or SolverOptions()
    a_max = float(sys.a.max()) if sys.a.size else 0.0
    if a_max * max(abs(region.im_min), abs(region.im_max)) > 600.0:
        raise WalkerError(
            "requested region exceeds the |Im k| * a_max < 600 overflow contract"
        )
    if sys.det_identically_zero():
        raise WalkerError(
            "det Z vanishes identically; every non-positive lambda is an eigenvalue "
            "and root search is meaningless"
        )

    touches_imag = region.re_min == 0.0 or region.re_max == 0.0
    for attempt in range(opts.scan_retries):
        boost = 2.0 ** attempt
        axis_zeros = []
        if region.im_min == 0.0:
            lo, hi = region.re_min, region.re_max
            if hi > 1e-6:
                axis_zeros += _scan_axis(sys, _LogDet(sys), max(lo, 1e-6), hi, "re", opts, boost)
            if lo < -1e-6:
                axis_zeros += _scan_axis(sys, _LogDet(sys), lo, min(hi, -1e-6), "re", opts, boost)
        if touches_imag:
            axis_zeros += _scan_axis(
                sys, _LogDet(sys), max(region.im_min, 1e-6), region.im_max, "im", opts, boost
            )
        deflations = list(axis_zeros)
        if touches_imag and region.im_min == 0.0:
            m0 = _origin_order(sys, axis_zeros, opts)
            if m0 > 0:
                deflations.append((0.0 + 0.0j, m0))
        f = _LogDet(sys, deflations)
        pool = ThreadPoolExecutor(opts.threads) if opts.threads > 1 else None
        try:
            interior = _rect_zeros(f, region, opts, pool=pool)
        except _PanelError:
            continue  # likely a missed axis zero: rescan denser
        finally:
            if pool is not None:
                pool.shutdown()
        zeros = [(k, m) for k, m in axis_zeros if region.contains(k, 1e-9)]
        zeros += interior
        zeros.sort(key=lambda km: (km[0].real, km[0].imag))
        return zeros
    raise WalkerError("axis rescan retries exhausted; zero too close to region boundary")


def boundary_winding(sys: SecularSystem, region: Region, opts: SolverOptions | None = None) -> int:
    """Winding count of the region boundary (axis zeros included by deflation)."""
    opts = opts or SolverOptions()
    zeros = secular_zeros(sys, region, opts)
    return int(sum(m for _, m in zeros))


# ---------------------------------------------------------------------------
# eigenvalue classification on top of raw zeros
# ---------------------------------------------------------------------------

def _require_regular(sys: SecularSystem):
    cls = classify(sys.bc)
    if cls.dim_M != sys.bc.d:
        raise IrregularBCError(
            f"dim M(A,B) = {cls.dim_M} != d = {sys.bc.d}: spectrum is the whole plane"
        )
    if not cls.regular:
        if sys.det_identically_zero():
            raise IrregularBCError(
                "irregular boundary conditions; det Z vanishes identically and the "
                "point spectrum is C minus [0, inf)"
            )
        raise IrregularBCError(
            "irregular boundary conditions; the resolvent set may be empty and "
            "det-zero search does not report eigenvalues"
        )
    return cls


def _geometric_data(sys: SecularSystem, k: complex, opts: SolverOptions):
    Z = sys.Z(k)
    rank, sigmas, gap = svd_rank(Z, rtol=opts.geometric_rtol)
    return sys.bc.d - rank, gap


def _external_vanishing_dim(sys: SecularSystem, k: complex, opts: SolverOptions) -> int:
    """dim of Ker Z(k) restricted to vanishing external coefficients."""
    V = nullspace(sys.Z(k), rtol=opts.geometric_rtol)
    if V.shape[1] == 0:
        return 0
    Vs = V[: sys.graph.n_external, :]
    W = nullspace(Vs, rtol=1e-10)
    return W.shape[1]


def _point_from_zero(sys: SecularSystem, k: complex, mult: int, opts: SolverOptions) -> SpectralPoint:
    scale = 1.0 + abs(k)
    geo, gap = _geometric_data(sys, k, opts)
    nE, nI = sys.graph.n_external, sys.graph.n_internal
    if k.imag > opts.axis_tol * scale:
        status = "eigenvalue"
    elif nE == 0:
        status = "eigenvalue"
    elif nI == 0:
        status = "spectral_singularity_candidate"
    else:
        vdim = _external_vanishing_dim(sys, k, opts)
        if vdim > 0:
            status = "eigenvalue"
            geo = vdim
        else:
            status = "real_k_candidate"
    return SpectralPoint(
        k=k, lam=k * k, winding_multiplicity=mult,
        geometric_multiplicity=geo, status=status, sv_gap=gap,
    )


def find_eigenvalues(sys: SecularSystem, region: Region, opts: SolverOptions | None = None):
    """Classified zeros of det Z in the region; refuses irregular pairs."""
    opts = opts or SolverOptions()
    _require_regular(sys)
    return [_point_from_zero(sys, k, m, opts) for k, m in secular_zeros(sys, region, opts)]


def real_axis_scan(sys: SecularSystem, k_max: float, opts: SolverOptions | None = None):
    """Zeros of det Z on (0, k_max] with embedded-eigenvalue classification."""
    opts = opts or SolverOptions()
    _require_regular(sys)
    zeros = _scan_axis(sys, _LogDet(sys), 1e-6, float(k_max), "re", opts)
    return [_point_from_zero(sys, k, m, opts) for k, m in zeros]


def zero_mode_point(sys: SecularSystem, opts: SolverOptions | None = None) -> Optional[SpectralPoint]:
    """SpectralPoint for lambda = 0 when the zero mode exists, else None."""
    opts = opts or SolverOptions()
    if sys.graph.n_internal == 0:
        return None
    kernel = sys.zero_mode_kernel()
    g = kernel.shape[1]
    if g == 0:
        return None
    try:
        m0 = _circle_winding(_LogDet(sys), 0.0 + 0.0j, 1e-4, opts)
    except _PanelError:
        m0 = g
    return SpectralPoint(0.0 + 0.0j, 0.0 + 0.0j, m0, g, "zero_mode")


def eigenfunction(sys: SecularSystem, point: SpectralPoint, opts: SolverOptions | None = None):
    """Basis of eigenfunctions attached to a located spectral point."""
    opts = opts or SolverOptions()
    nE = sys.graph.n_external
    nI = sys.graph.n_internal
    if point.status == "zero_mode":
        kernel = sys.zero_mode_kernel()
        mat = sys.zero_mode_matrix()
        out = []
        for v in kernel.T:
            res = float(np.linalg.norm(mat @ v))
            out.append(Eigenfunction(
                k=0j, s=np.zeros(nE, dtype=complex),
                alpha=v[:nI].copy(), beta=v[nI:].copy(),
                residual=res, polynomial=True,
            ))
        return out
    if point.status not in ("eigenvalue",):
        raise ValueError(f"no eigenfunction for status {point.status!r}")
    Z = sys.Z(point.k)
    V = nullspace(Z, rtol=opts.geometric_rtol)
    scale = 1.0 + abs(point.k)
    if nE and abs(point.k.imag) <= opts.axis_tol * scale and nI:
        # embedded eigenvalue: restrict to kernel vectors with s = 0
        W = nullspace(V[:nE, :], rtol=1e-10)
        V = V @ W
        if V.shape[1]:
            V, _ = np.linalg.qr(V)
        V[:nE, :] = 0.0
    out = []
    for v in V.T:
        res = float(np.linalg.norm(Z @ v) / max(np.linalg.norm(v), 1e-300))
        out.append(Eigenfunction(
            k=point.k, s=v[:nE].copy(), alpha=v[nE:nE + nI].copy(),
            beta=v[nE + nI:].copy(), residual=res,
        ))
    return out


# ---------------------------------------------------------------------------
# residual and essential spectrum, Weyl counting
# ---------------------------------------------------------------------------

def residual_spectrum(sys: SecularSystem, k_max: float, opts: SolverOptions | None = None):
    """Real lambda in the residual spectrum, scanned up to k = sqrt(lambda) <= k_max.

    Empty for compact graphs and for graphs without internal edges.
    """
    from .bcspace import adjoint  # local import to avoid cycle at module load

    opts = opts or SolverOptions()
    _require_regular(sys)
    g = sys.graph
    if g.n_external == 0 or g.n_internal == 0:
        return []
    adj = SecularSystem(g, adjoint(sys.bc))
    adj_eigs = [p for p in real_axis_scan(adj, k_max, opts) if p.status == "eigenvalue"]
    own_eigs = [p for p in real_axis_scan(sys, k_max, opts) if p.status == "eigenvalue"]
    own_lams = [p.lam.real for p in own_eigs]
    out = []
    for p in adj_eigs:
        lam = p.lam.real
        if all(abs(lam - l0) > 1e-7 * (1 + abs(lam)) for l0 in own_lams):
            out.append(lam)
    # lambda = 0 through the zero modes
    if zero_mode_point(adj) is not None and zero_mode_point(sys) is None:
        out.insert(0, 0.0)
    return out


def essential_spectrum(classification, graph: MetricGraph) -> str:
    """One of empty, half_line, whole_plane, undefined_irregular."""
    if classification.dim_M != graph.d:
        return "whole_plane"
    if not classification.regular:
        return "undefined_irregular"
    return "empty" if graph.compact else "half_line"


def weyl_count_check(points, total_length: float) -> WeylReport:
    """Least-squares slope of k_j against j * pi / total_length.

    Eigenvalues enter with their geometric multiplicity, sorted by |lambda|.
    """
    ks = []
    for p in points:
        if p.status in ("eigenvalue", "zero_mode"):
            ks.extend([math.sqrt(abs(p.lam))] * max(p.geometric_multiplicity, 1))
    ks.sort()
    if len(ks) < 10:
        raise ValueError(f"need at least 10 eigenvalues, got {len(ks)}")
    j = np.arange(1, len(ks) + 1, dtype=float)
    x = j * math.pi / float(total_length)
    slope, intercept = np.polyfit(x, np.array(ks), 1)
    return WeylReport(float(slope), float(intercept), abs(float(slope) - 1.0), len(ks))


def compute_spectrum(
    sys: SecularSystem,
    region: Region | None = None,
    opts: SolverOptions | None = None,
    include_residual: bool = False,
) -> SpectrumReport:
    """Full spectral report: classification gate, zeros, zero mode, tags."""
    opts = opts or SolverOptions()
    cls = classify(sys.bc)
    tag = essential_spectrum(cls, sys.graph)
    if region is None:
        region = Region.quadrant(10.0, 4.0)
    if cls.dim_M != sys.bc.d or not cls.regular:
        note = "dim M(A,B) != d: spectrum is the whole plane" if cls.dim_M != sys.bc.d else (
            "irregular boundary conditions; point spectrum is C minus [0, inf)"
            if sys.det_identically_zero()
            else "irregular boundary conditions; eigenvalue search refused"
        )
        return SpectrumReport([], tag, [], region, {"refused": True, "reason": note})
    points = find_eigenvalues(sys, region, opts)
    zm = zero_mode_point(sys, opts)
    if zm is not None:
        points = [zm] + points
    residual = residual_spectrum(sys, region.re_max, opts) if include_residual else []
    mult_sum = sum(p.winding_multiplicity for p in points if p.status != "zero_mode")
    return SpectrumReport(
        points, tag, residual, region,
        {"refused": False, "boundary_winding": mult_sum},
    )
