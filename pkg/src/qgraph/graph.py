"""Metric-graph data model and the frozen ordering of boundary coordinates.

A finite metric graph consists of vertices, internal edges carrying a
positive length (the edge is identified with the interval [0, a]) and
external edges identified with the half line [0, inf).  The trace space
has dimension d = n_external + 2*n_internal and its coordinates are
ordered as

    external block  : value at 0 of each external edge,
    internal left   : value at 0 of each internal edge,
    internal right  : value at a_i of each internal edge.

The derivative trace uses the signed convention (psi_e'(0), psi_i'(0),
-psi_i'(a_i)).  All matrices in the package depend on this ordering, so
the edge lists are frozen at construction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GraphError(ValueError):
    """Raised when a graph description is inconsistent."""


@dataclass(frozen=True)
class InternalEdge:
    tail: str
    head: str
    length: float


@dataclass(frozen=True)
class ExternalEdge:
    tail: str


@dataclass(frozen=True)
class EdgeIndex:
    """Address of one edge inside its block ('external' or 'internal')."""

    kind: str
    position: int

    def trace_coordinates(self, graph: "MetricGraph") -> tuple[int, ...]:
        """Indices of this edge's endpoint values inside the trace space."""
        if self.kind == "external":
            if not 0 <= self.position < graph.n_external:
                raise GraphError(f"external edge index {self.position} out of range")
            return (self.position,)
        if self.kind == "internal":
            if not 0 <= self.position < graph.n_internal:
                raise GraphError(f"internal edge index {self.position} out of range")
            return (
                graph.n_external + self.position,
                graph.n_external + graph.n_internal + self.position,
            )
        raise GraphError(f"unknown edge kind {self.kind!r}")


@dataclass(frozen=True)
class ValidationReport:
    d: int
    n_external: int
    n_internal: int
    compact: bool
    equal_lengths: bool
    degrees: dict

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "n_external": self.n_external,
            "n_internal": self.n_internal,
            "compact": self.compact,
            "equal_lengths": self.equal_lengths,
            "degrees": dict(self.degrees),
        }


@dataclass(frozen=True)
class MetricGraph:
    """Immutable finite metric graph.

    Loops and multi-edges are allowed; a loop contributes two to the
    degree of its vertex.  Vertex identifiers are opaque strings.
    """

    vertices: tuple
    internal_edges: tuple
    external_edges: tuple

    def __post_init__(self):
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise GraphError("duplicate vertex identifiers")
        for e in self.internal_edges:
            if e.tail not in known or e.head not in known:
                raise GraphError(f"internal edge {e} references unknown vertex")
            if not (np.isfinite(e.length) and e.length > 0):
                raise GraphError(f"internal edge {e} must have positive finite length")
        for e in self.external_edges:
            if e.tail not in known:
                raise GraphError(f"external edge {e} references unknown vertex")

    # -- block sizes ---------------------------------------------------
    @property
    def n_internal(self) -> int:
        return len(self.internal_edges)

    @property
    def n_external(self) -> int:
        return len(self.external_edges)

    @property
    def d(self) -> int:
        return self.n_external + 2 * self.n_internal

    @property
    def compact(self) -> bool:
        return self.n_external == 0

    @property
    def lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.internal_edges], dtype=float)

    @property
    def equal_lengths(self) -> bool:
        a = self.lengths
        if a.size == 0:
            return True
        return bool(np.allclose(a, a[0], rtol=1e-12, atol=0.0))

    @property
    def total_length(self) -> float:
        """Sum of internal edge lengths (infinite edges excluded)."""
        return float(self.lengths.sum())

    @property
    def n_edge_lines(self) -> int:
        """Number of edges as 1d components, n_external + n_internal."""
        return self.n_external + self.n_internal


def metric_graph(vertices, internal_edges=(), external_edges=()) -> MetricGraph:
    """Build a MetricGraph from plain tuples.

    ``internal_edges`` entries are (tail, head, length), ``external_edges``
    entries are vertex names.
    """
    internals = tuple(InternalEdge(t, h, float(a)) for t, h, a in internal_edges)
    externals = tuple(ExternalEdge(v) for v in external_edges)
    return MetricGraph(tuple(vertices), internals, externals)


def degree(g: MetricGraph, v) -> int:
    """Number of edge endpoints at v; a loop at v counts twice."""
    if v not in g.vertices:
        raise GraphError(f"unknown vertex {v!r}")
    deg = sum(1 for e in g.external_edges if e.tail == v)
    for e in g.internal_edges:
        deg += (e.tail == v) + (e.head == v)
    return deg


def validate(g: MetricGraph) -> ValidationReport:
    """Pure, idempotent summary of the graph's structural data."""
    degrees = {v: degree(g, v) for v in g.vertices}
    return ValidationReport(
        d=g.d,
        n_external=g.n_external,
        n_internal=g.n_internal,
        compact=g.compact,
        equal_lengths=g.equal_lengths,
        degrees=degrees,
    )


# ---------------------------------------------------------------------------
# standard builders used throughout tests, presets and demos
# ---------------------------------------------------------------------------

def interval(length: float = 1.0) -> MetricGraph:
    """Single internal edge [0, length] with two endpoints."""
    return metric_graph(["v0", "v1"], internal_edges=[("v0", "v1", length)])


def star_graph(n_external: int = 2) -> MetricGraph:
    """n external edges attached to one central vertex."""
    return metric_graph(["c"], external_edges=["c"] * n_external)


def compact_star(n_edges: int = 3, a: float = 1.0) -> MetricGraph:
    """Compact star: n internal edges of length a from a center to pendants."""
    vertices = ["c"] + [f"p{i}" for i in range(n_edges)]
    internal = [("c", f"p{i}", a) for i in range(n_edges)]
    return metric_graph(vertices, internal_edges=internal)


def loop_graph(n_edges: int = 2, a: float = 1.0) -> MetricGraph:
    """Two vertices joined by n parallel edges of length a, all tail at v0."""
    internal = [("v0", "v1", a) for _ in range(n_edges)]
    return metric_graph(["v0", "v1"], internal_edges=internal)


def cube_graph(a: float = 1.0) -> MetricGraph:
    """The 3-cube with 8 vertices and 12 internal edges of length a.

    Edges are oriented from even-parity to odd-parity bit strings, so every
    vertex has either only outgoing or only incoming edges.
    """
    verts = [format(i, "03b") for i in range(8)]
    internal = []
    for v in verts:
        if v.count("1") % 2 == 0:
            for bit in range(3):
                w = v[:bit] + ("1" if v[bit] == "0" else "0") + v[bit + 1:]
                internal.append((v, w, a))
    return metric_graph(verts, internal_edges=internal)
