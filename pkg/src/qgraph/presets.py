"""Named graph-plus-boundary-condition presets and local-condition assembly.

Presets reproduce the recurring model systems of the package: Dirichlet
and Neumann endpoints, standard (Kirchhoff) and complex delta couplings,
the tau point interaction on the line, the intermediate conditions on
[0, 1], the indefinite sign-flip conditions, the totally degenerate pair
with empty spectrum, the residual-spectrum lasso graph, compact stars
and the cube.
"""

from __future__ import annotations

import numpy as np

from .bcspace import BoundaryConditions, SectorialPair
from .graph import (
    MetricGraph,
    compact_star,
    cube_graph,
    degree,
    interval,
    loop_graph,
    metric_graph,
    star_graph,
)


class PresetError(ValueError):
    pass


# ---------------------------------------------------------------------------
# local vertex conditions and their assembly into a global pair
# ---------------------------------------------------------------------------

def standard_local(nu: int) -> BoundaryConditions:
    """Standard (Kirchhoff) conditions at one vertex of degree nu.

    Continuity across the vertex plus a vanishing sum of outgoing
    derivatives; at a pendant vertex this degenerates to Neumann.
    """
    A = np.zeros((nu, nu), dtype=complex)
    B = np.zeros((nu, nu), dtype=complex)
    for i in range(nu - 1):
        A[i, i], A[i, i + 1] = 1.0, -1.0
    B[nu - 1, :] = 1.0
    return BoundaryConditions(A, B)


def delta_local(nu: int, gamma: complex) -> BoundaryConditions:
    """Complex delta coupling of strength gamma at a degree-nu vertex."""
    A = np.zeros((nu, nu), dtype=complex)
    B = np.zeros((nu, nu), dtype=complex)
    for i in range(nu - 1):
        A[i, i], A[i, i + 1] = 1.0, -1.0
    A[nu - 1, 0] = -gamma
    B[nu - 1, :] = 1.0
    return BoundaryConditions(A, B)


def vertex_coordinate_slots(g: MetricGraph, v) -> list:
    """Trace-space indices of the endpoints incident to v.

    Order: external edges at v, internal edges starting at v, internal
    edges ending at v, each group in global edge order.  Local matrices
    are written against this order.
    """
    nE, nI = g.n_external, g.n_internal
    slots = [j for j, e in enumerate(g.external_edges) if e.tail == v]
    slots += [nE + i for i, e in enumerate(g.internal_edges) if e.tail == v]
    slots += [nE + nI + i for i, e in enumerate(g.internal_edges) if e.head == v]
    return slots


def assemble_local_bc(g: MetricGraph, local: dict) -> BoundaryConditions:
    """Block global pair from per-vertex local pairs.

    ``local`` maps each vertex to a deg(v) x deg(v) BoundaryConditions
    written in the slot order of :func:`vertex_coordinate_slots`.
    """
    d = g.d
    A = np.zeros((d, d), dtype=complex)
    B = np.zeros((d, d), dtype=complex)
    row = 0
    for v in g.vertices:
        nu = degree(g, v)
        if nu == 0:
            continue
        if v not in local:
            raise PresetError(f"no local condition given for vertex {v!r}")
        bc_v = local[v]
        if bc_v.d != nu:
            raise PresetError(
                f"local condition at {v!r} is {bc_v.d} x {bc_v.d}, expected {nu} x {nu}"
            )
        slots = vertex_coordinate_slots(g, v)
        for r in range(nu):
            for c, slot in enumerate(slots):
                A[row + r, slot] = bc_v.A[r, c]
                B[row + r, slot] = bc_v.B[r, c]
        row += nu
    if row != d:
        raise PresetError("local conditions do not fill the trace space")
    return BoundaryConditions(A, B)


# ---------------------------------------------------------------------------
# model example pairs
# ---------------------------------------------------------------------------

def tau_pair(tau: float) -> BoundaryConditions:
    A = np.array([[1.0, -np.exp(1j * tau)], [0.0, 0.0]], dtype=complex)
    B = np.array([[0.0, 0.0], [1.0, np.exp(-1j * tau)]], dtype=complex)
    return BoundaryConditions(A, B)


def sgnsgn_pair() -> BoundaryConditions:
    A = np.array([[1.0, -1.0], [0.0, 0.0]], dtype=complex)
    B = np.array([[0.0, 0.0], [1.0, -1.0]], dtype=complex)
    return BoundaryConditions(A, B)


def gsgnsgn_pair(n_plus: int, n_minus: int) -> BoundaryConditions:
    n = n_plus + n_minus
    A = np.zeros((n, n), dtype=complex)
    B = np.zeros((n, n), dtype=complex)
    for i in range(n - 1):
        A[i, i], A[i, i + 1] = 1.0, -1.0
    B[n - 1, :n_plus] = 1.0
    B[n - 1, n_plus:] = -1.0
    return BoundaryConditions(A, B)


def intermediate_pair() -> BoundaryConditions:
    A = np.eye(2, dtype=complex)
    B = np.array([[0.0, 0.0], [-1.0, 0.0]], dtype=complex)
    return BoundaryConditions(A, B)


def empty_spectrum_pair() -> BoundaryConditions:
    A = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    B = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
    return BoundaryConditions(A, B)


def residual_example_sectorial() -> SectorialPair:
    L = np.array(
        [[0.0, 0.0, 0.0], [0.0, -1j, 0.0], [1.0, 0.0, 1j]], dtype=complex
    )
    return SectorialPair(np.zeros((3, 3), dtype=complex), L)


def scaled_delta_pair() -> BoundaryConditions:
    """Two half-lines with L = [[0, 2], [1/2, 0]], P = 0."""
    L = np.array([[0.0, 2.0], [0.5, 0.0]], dtype=complex)
    return SectorialPair(np.zeros((2, 2), dtype=complex), L).boundary_conditions()


# ---------------------------------------------------------------------------
# named presets for the problem files
# ---------------------------------------------------------------------------

def build_preset(name: str, params: dict | None = None):
    """Resolve a preset name to (graph, boundary conditions, meta).

    Unknown parameters raise; every preset fixes its graph unless noted.
    """
    params = dict(params or {})
    name = name.lower()

    def take(key, default):
        return params.pop(key, default)

    if name == "dirichlet":
        length = float(take("length", 1.0))
        g = interval(length)
        bc = BoundaryConditions(np.eye(2), np.zeros((2, 2)))
    elif name == "neumann":
        length = float(take("length", 1.0))
        g = interval(length)
        bc = BoundaryConditions(np.zeros((2, 2)), np.eye(2))
    elif name in ("standard", "kirchhoff"):
        n = int(take("edges", 3))
        g = star_graph(n)
        bc = standard_local(n)
    elif name == "delta":
        raw = take("gamma", 1.0)
        gamma = complex(raw[0], raw[1]) if isinstance(raw, (list, tuple)) else complex(raw)
        n = int(take("edges", 3))
        g = star_graph(n)
        bc = delta_local(n, gamma)
    elif name == "tau":
        tau = float(take("tau", 0.3))
        g = star_graph(2)
        bc = tau_pair(tau)
    elif name == "intermediate":
        g = interval(1.0)
        bc = intermediate_pair()
    elif name == "sgnsgn":
        g = star_graph(2)
        bc = sgnsgn_pair()
    elif name == "gsgnsgn":
        n_plus = int(take("plus", 2))
        n_minus = int(take("minus", 1))
        g = star_graph(n_plus + n_minus)
        bc = gsgnsgn_pair(n_plus, n_minus)
    elif name == "empty_spectrum":
        g = interval(1.0)
        bc = empty_spectrum_pair()
    elif name == "residual_example":
        a = float(take("length", 1.0))
        g = metric_graph(["v0", "v1"], internal_edges=[("v0", "v1", a)], external_edges=["v0"])
        bc = residual_example_sectorial().boundary_conditions()
    elif name == "scaled_delta":
        g = star_graph(2)
        bc = scaled_delta_pair()
    elif name == "star":
        n = int(take("edges", 3))
        a = float(take("length", 1.0))
        g = compact_star(n, a)
        local = {"c": standard_local(n)}
        for i in range(n):
            local[f"p{i}"] = BoundaryConditions(np.eye(1), np.zeros((1, 1)))
        bc = assemble_local_bc(g, local)
    elif name == "cube":
        a = float(take("length", 1.0))
        g = cube_graph(a)
        bc = assemble_local_bc(g, {v: standard_local(3) for v in g.vertices})
    elif name == "tau_loop":
        tau = float(take("tau", 0.3))
        a = float(take("length", 1.0))
        g = loop_graph(2, a)
        bc = assemble_local_bc(g, {"v0": tau_pair(tau), "v1": tau_pair(tau)})
    else:
        raise PresetError(f"unknown preset {name!r}")
    if params:
        raise PresetError(f"unused preset parameters: {sorted(params)}")
    return g, bc, {"preset": name}


PRESET_NAMES = (
    "dirichlet", "neumann", "standard", "kirchhoff", "delta", "tau",
    "intermediate", "sgnsgn", "gsgnsgn", "empty_spectrum",
    "residual_example", "scaled_delta", "star", "cube", "tau_loop",
)
