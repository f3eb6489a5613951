"""Batch front-end: problem files in, machine-readable reports out.

A problem file is a JSON document describing one graph plus boundary
condition (explicitly or through a preset) and a list of tasks.  The
report is emitted as canonical JSON (sorted keys, 17-significant-digit
floats, complex numbers as [re, im] pairs), as a CSV eigenvalue table,
or as plot-ready grid data.

Exit codes: 0 when at least one task succeeded, 1 when every task
failed, 2 for input or schema errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bcspace import (
    BoundaryConditions,
    SectorialPair,
    adjoint,
    classify,
    projector_distance,
)
from .graph import MetricGraph, metric_graph, validate
from .presets import PRESET_NAMES, PresetError, build_preset
from .resolvent import ResolventKernel, verify_resolvent_identity
from .secular import SecularSystem
from .similarity import SimilarityError, decouple_symmetric_graph, find_similarity_to_selfadjoint
from .spectrum import (
    IrregularBCError,
    Region,
    SolverOptions,
    WalkerError,
    compute_spectrum,
    residual_spectrum,
    weyl_count_check,
)

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "qgraph problem file",
    "type": "object",
    "additionalProperties": False,
    "required": ["tasks"],
    "properties": {
        "graph": {
            "type": "object",
            "additionalProperties": False,
            "required": ["vertices"],
            "properties": {
                "vertices": {"type": "array", "items": {"type": "string"}},
                "internal_edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["from", "to", "length"],
                        "properties": {
                            "from": {"type": "string"},
                            "to": {"type": "string"},
                            "length": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                },
                "external_edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["from"],
                        "properties": {"from": {"type": "string"}},
                    },
                },
            },
        },
        "bc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "matrices": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["A", "B"],
                    "properties": {
                        "A": {"$ref": "#/$defs/complex_matrix"},
                        "B": {"$ref": "#/$defs/complex_matrix"},
                    },
                },
                "sectorial": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["P", "L"],
                    "properties": {
                        "P": {"$ref": "#/$defs/complex_matrix"},
                        "L": {"$ref": "#/$defs/complex_matrix"},
                    },
                },
                "preset": {"type": "string", "enum": list(PRESET_NAMES)},
                "params": {"type": "object"},
            },
        },
        "tasks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["task"],
                "properties": {
                    "task": {
                        "type": "string",
                        "enum": [
                            "classify", "spectrum", "residual", "resolvent",
                            "similarity", "decouple", "weyl",
                        ],
                    },
                    "region": {
                        "type": "array", "items": {"type": "number"},
                        "minItems": 2, "maxItems": 4,
                    },
                    "k": {"$ref": "#/$defs/complex_list"},
                    "k_max": {"type": "number", "exclusiveMinimum": 0},
                    "tolerance": {"type": "number", "exclusiveMinimum": 0},
                    "endpoint": {"$ref": "#/$defs/complex_pair"},
                    "grid": {"type": "integer", "minimum": 2},
                },
            },
        },
    },
    "$defs": {
        "complex_pair": {
            "type": "array", "items": {"type": "number"},
            "minItems": 2, "maxItems": 2,
        },
        "complex_list": {
            "type": "array",
            "items": {"$ref": "#/$defs/complex_pair"},
        },
        "complex_matrix": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"$ref": "#/$defs/complex_pair"},
            },
        },
    },
}


class ProblemError(ValueError):
    """Schema or semantic error in a problem file (exit code 2)."""


# ---------------------------------------------------------------------------
# value serialization: canonical JSON with 17-significant-digit floats
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def canonical_json(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, fixed float format."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt_float(obj.real)}, {_fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = [
            f'{pad}  {json.dumps(str(k))}: {canonical_json(obj[k], indent + 2)}'
            for k in sorted(obj, key=str)
        ]
        if not items:
            return "{}"
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        items = [canonical_json(v, indent) for v in obj]
        return "[" + ", ".join(items) + "]"
    if isinstance(obj, np.ndarray):
        return canonical_json(obj.tolist(), indent)
    raise TypeError(f"cannot serialize {type(obj)}")


def complex_to_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_pairs(M) -> list:
    return [[complex_to_pair(v) for v in row] for row in np.asarray(M, dtype=complex)]


def _pairs_to_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


# ---------------------------------------------------------------------------
# problem parsing
# ---------------------------------------------------------------------------

def _validate_schema(doc: dict):
    import jsonschema

    try:
        jsonschema.validate(doc, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as err:
        raise ProblemError(f"problem file does not match the schema: {err.message}") from err


def _graph_from_doc(doc: dict) -> MetricGraph:
    internal = [(e["from"], e["to"], e["length"]) for e in doc.get("internal_edges", [])]
    external = [e["from"] for e in doc.get("external_edges", [])]
    return metric_graph(doc["vertices"], internal, external)


def load_problem(doc: dict):
    """(graph, bc, meta) from a validated problem document."""
    _validate_schema(doc)
    bc_doc = doc.get("bc", {})
    meta = {}
    if "preset" in bc_doc:
        if "matrices" in bc_doc or "sectorial" in bc_doc:
            raise ProblemError("give either a preset or explicit matrices, not both")
        try:
            g, bc, meta = build_preset(bc_doc["preset"], bc_doc.get("params"))
        except PresetError as err:
            raise ProblemError(str(err)) from err
        if "graph" in doc:
            raise ProblemError(
                f"preset {bc_doc['preset']!r} fixes its own graph; remove the graph section"
            )
        return g, bc, meta
    if "graph" not in doc:
        raise ProblemError("a problem without a preset needs an explicit graph")
    g = _graph_from_doc(doc["graph"])
    if "matrices" in bc_doc:
        A = _pairs_to_matrix(bc_doc["matrices"]["A"])
        B = _pairs_to_matrix(bc_doc["matrices"]["B"])
        bc = BoundaryConditions(A, B)
    elif "sectorial" in bc_doc:
        P = _pairs_to_matrix(bc_doc["sectorial"]["P"])
        L = _pairs_to_matrix(bc_doc["sectorial"]["L"])
        bc = SectorialPair(P, L).boundary_conditions()
    else:
        raise ProblemError("bc section needs 'matrices', 'sectorial' or 'preset'")
    if bc.d != g.d:
        raise ProblemError(f"boundary condition size {bc.d} does not match graph d = {g.d}")
    return g, bc, meta


def _region_from(task: dict, default_region) -> Region:
    raw = task.get("region")
    if raw is None:
        return default_region
    if len(raw) == 2:
        return Region.quadrant(raw[0], raw[1])
    return Region(raw[0], raw[1], raw[2], raw[3])


# ---------------------------------------------------------------------------
# task runners
# ---------------------------------------------------------------------------

def _classification_dict(g, bc):
    cls = classify(bc)
    out = cls.as_dict()
    if cls.sectorial_pair is not None:
        out["sectorial_P"] = matrix_to_pairs(cls.sectorial_pair.P)
        out["sectorial_L"] = matrix_to_pairs(cls.sectorial_pair.L)
    return out


def _spectrum_dict(report):
    return report.as_dict()


def run(doc: dict, region: Region | None = None, tol: float | None = None,
        threads: int = 1) -> dict:
    """Execute a problem document and return the full report dict."""
    g, bc, meta = load_problem(doc)
    opts = SolverOptions(threads=threads)
    default_region = region or Region.quadrant(10.0, 4.0)
    cls = classify(bc)
    report = {
        "version": __version__,
        "config": {
            "region": default_region.as_list(),
            "tolerance": tol if tol is not None else 1e-8,
            "threads": threads,
            **meta,
        },
        "graph": validate(g).as_dict(),
        "classification": _classification_dict(g, bc),
        "tasks": [],
    }
    sys_ = SecularSystem(g, bc)
    n_failed = 0
    for task in doc["tasks"]:
        name = task["task"]
        entry = {"task": name}
        try:
            if name == "classify":
                entry["result"] = _classification_dict(g, bc)
                entry["status"] = "ok"
            elif name == "spectrum":
                rgn = _region_from(task, default_region)
                rep = compute_spectrum(sys_, rgn, opts)
                entry["result"] = _spectrum_dict(rep)
                entry["status"] = "refused" if rep.diagnostics.get("refused") else "ok"
                if entry["status"] == "refused":
                    entry["reason"] = rep.diagnostics.get("reason")
            elif name == "residual":
                k_max = task.get("k_max", default_region.re_max)
                entry["result"] = {"residual_spectrum": residual_spectrum(sys_, k_max, opts)}
                entry["status"] = "ok"
            elif name == "resolvent":
                ks = [complex(p[0], p[1]) for p in task.get("k", [[0.0, 1.0]])]
                tolerance = task.get("tolerance", tol if tol is not None else 1e-7)
                out = []
                for kk in ks:
                    rep = verify_resolvent_identity(ResolventKernel(sys_, kk), tolerance)
                    out.append({"k": complex_to_pair(kk), **rep.as_dict()})
                entry["result"] = {"identities": out}
                entry["status"] = "ok" if all(o["passed"] for o in out) else "failed"
            elif name == "similarity":
                cert = find_similarity_to_selfadjoint(g, bc)
                if cert is None:
                    entry["status"] = "none"
                    entry["result"] = {
                        "found": False,
                        "diagnostic": find_similarity_to_selfadjoint.last_diagnostic,
                    }
                else:
                    entry["status"] = "ok"
                    entry["result"] = {
                        "found": True,
                        "k_used": complex_to_pair(cert.k_used),
                        "residual": cert.residual,
                        "single_k": cert.single_k,
                        "target_self_adjoint": cert.target_self_adjoint,
                        "transform_G_E": matrix_to_pairs(cert.transform.G_E),
                        "transform_G_I": matrix_to_pairs(cert.transform.G_I),
                        "target_A": matrix_to_pairs(cert.target_bc.A),
                        "target_B": matrix_to_pairs(cert.target_bc.B),
                        "metric": matrix_to_pairs(cert.metric_matrix),
                        "metric_inverse": matrix_to_pairs(cert.metric_inverse),
                        "quasi_self_adjoint_residual": cert.quasi_self_adjoint_residual,
                    }
            elif name == "decouple":
                endpoint = task.get("endpoint")
                from .graph import degree as _deg
                degs = sorted({_deg(g, v) for v in g.vertices})
                local = _local_condition_for(g, bc, degs[-1])
                dec = decouple_symmetric_graph(
                    g, local,
                    endpoint_condition=tuple(endpoint) if endpoint else None,
                )
                entry["result"] = {
                    "a": dec.a,
                    "problems": [
                        {
                            "left": complex_to_pair(p.left[0]) + complex_to_pair(p.left[1]),
                            "right": complex_to_pair(p.right[0]) + complex_to_pair(p.right[1]),
                            "labels": list(p.labels),
                            "count": p.count,
                        }
                        for p in dec.problems
                    ],
                }
                entry["status"] = "ok"
            elif name == "weyl":
                rgn = _region_from(task, default_region)
                rep = compute_spectrum(sys_, rgn, opts)
                if rep.diagnostics.get("refused"):
                    raise IrregularBCError(rep.diagnostics.get("reason", "refused"))
                entry["result"] = weyl_count_check(rep.points, g.total_length).as_dict()
                entry["status"] = "ok"
            else:  # pragma: no cover - schema forbids
                raise ProblemError(f"unknown task {name!r}")
        except (IrregularBCError, SimilarityError) as err:
            entry["status"] = "refused"
            entry["reason"] = str(err)
        except (WalkerError, ValueError, RuntimeError) as err:
            entry["status"] = "failed"
            entry["reason"] = f"{type(err).__name__}: {err}"
            n_failed += 1
        report["tasks"].append(entry)
    report["all_tasks_failed"] = bool(doc["tasks"]) and n_failed == len(doc["tasks"])
    return report


def _local_condition_for(g, bc, nu):
    """Extract one vertex-local block from an assembled pair, if present.

    Used by the decouple task: the global pair must be block local; the
    block of the first vertex of degree nu is taken as the common local
    condition.
    """
    from .presets import vertex_coordinate_slots
    from .graph import degree as _deg

    for v in g.vertices:
        if _deg(g, v) != nu:
            continue
        slots = vertex_coordinate_slots(g, v)
        rows = [r for r in range(bc.d) if np.any(np.abs(bc.A[r, slots]) > 0) or np.any(np.abs(bc.B[r, slots]) > 0)]
        rows = [r for r in rows if
                np.all(np.abs(np.delete(bc.A[r], slots)) < 1e-12) and
                np.all(np.abs(np.delete(bc.B[r], slots)) < 1e-12)]
        if len(rows) != nu:
            raise SimilarityError("boundary conditions are not vertex-local")
        return BoundaryConditions(bc.A[np.ix_(rows, slots)], bc.B[np.ix_(rows, slots)])
    raise SimilarityError(f"no vertex of degree {nu}")


# ---------------------------------------------------------------------------
# emitters
# ---------------------------------------------------------------------------

def emit(report: dict, fmt: str, out_dir: Path, sys_: SecularSystem | None = None,
         grid: int = 100) -> list:
    """Write the report in one format; returns the list of files written."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        path = out_dir / "report.json"
        path.write_text(canonical_json(report) + "\n")
        written.append(path)
    elif fmt == "csv":
        path = out_dir / "eigenvalues.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_lambda", "im_lambda", "winding_mult", "geometric_mult", "status"])
            for task in report["tasks"]:
                if task["task"] != "spectrum" or task.get("status") not in ("ok",):
                    continue
                for p in task["result"]["points"]:
                    w.writerow([
                        _fmt_float(p["lambda"][0]), _fmt_float(p["lambda"][1]),
                        p["winding_multiplicity"], p["geometric_multiplicity"], p["status"],
                    ])
        written.append(path)
    elif fmt == "plotdata":
        if sys_ is None:
            raise ProblemError("plotdata needs the secular system")
        region = Region(*report["config"]["region"])
        path = out_dir / "detgrid.csv"
        res = np.linspace(region.re_min, region.re_max, grid)
        ims = np.linspace(region.im_min, region.im_max, grid)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_k", "im_k", "log_abs_det"])
            for im in ims:
                for re in res:
                    v = sys_.log_det_Z(complex(re, im))
                    w.writerow([_fmt_float(re), _fmt_float(im), _fmt_float(v.real)])
        written.append(path)
        zpath = out_dir / "zeros.csv"
        with zpath.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re_k", "im_k", "winding_mult", "geometric_mult", "status"])
            for task in report["tasks"]:
                if task["task"] != "spectrum" or task.get("status") != "ok":
                    continue
                for p in task["result"]["points"]:
                    w.writerow([
                        _fmt_float(p["k"][0]), _fmt_float(p["k"][1]),
                        p["winding_multiplicity"], p["geometric_multiplicity"], p["status"],
                    ])
        written.append(zpath)
    else:
        raise ProblemError(f"unknown format {fmt!r}")
    return written


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qgraph",
        description="Spectra of metric-graph Laplacians with general vertex conditions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a problem file")
    runp.add_argument("problem", type=Path)
    runp.add_argument("--out", type=Path, default=Path("."))
    runp.add_argument("--format", choices=["json", "csv", "plotdata"], default="json")
    runp.add_argument("--region", type=str, default=None,
                      help="RE_MAX,IM_MAX for the default search rectangle")
    runp.add_argument("--tol", type=float, default=None)
    runp.add_argument("--threads", type=int, default=1)
    runp.add_argument("--grid", type=int, default=100, help="plotdata grid resolution")
    args = parser.parse_args(argv)

    try:
        doc = json.loads(args.problem.read_text())
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: cannot read problem file: {err}", file=sys.stderr)
        return 2
    region = None
    if args.region:
        try:
            re_max, im_max = (float(x) for x in args.region.split(","))
            region = Region.quadrant(re_max, im_max)
        except ValueError:
            print("error: --region expects RE_MAX,IM_MAX", file=sys.stderr)
            return 2
    try:
        report = run(doc, region=region, tol=args.tol, threads=args.threads)
        g, bc, _ = load_problem(doc)
        emitted = emit(report, args.format, args.out,
                       sys_=SecularSystem(g, bc), grid=args.grid)
    except ProblemError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    for path in emitted:
        print(path)
    if report.get("all_tasks_failed"):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
