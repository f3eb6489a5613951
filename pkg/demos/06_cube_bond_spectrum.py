"""The cube with standard couplings: what decouples and what does not.

Vertex-transitive graphs with one local condition everywhere sometimes
reduce to decoupled intervals (the two-edge loop does).  The cube does
not: its bond matrix S J_swap has eigenvalue phases outside {0, pi}, so
part of the spectrum follows the graph's adjacency eigenvalues
cos(ka) = +-1/3 and no assignment of scalar endpoint types reproduces
it.  The solver output and the bond spectrum tell one consistent story.
"""

import math

import numpy as np

import qgraph
from qgraph import Region, SecularSystem, presets

g, bc, _ = presets.build_preset("cube")
sys_ = SecularSystem(g, bc)

print("cube: |V| = 8, |I| = 12, d =", g.d)
zm = qgraph.zero_mode_point(sys_)
print("zero modes (constant functions):", zm.geometric_multiplicity)

print()
print("spectrum for k in (0, 3.3 pi]:")
th = math.acos(1.0 / 3.0)
for p in qgraph.find_eigenvalues(sys_, Region.quadrant(3.3 * math.pi, 1.5)):
    k = p.k.real
    n = round(k / math.pi)
    if abs(k - n * math.pi) < 1e-6:
        label = f"{n} pi"
    else:
        m = math.floor(k / math.pi)
        off = k - m * math.pi
        sign = "+" if abs(off - th) < 1e-6 else "-"
        label = f"{m} pi {sign} arccos(1/3)" if sign == "+" else f"{m+1} pi - arccos(1/3)"
    print(f"  k = {k/math.pi:.6f} pi = {label:24s} multiplicity {p.geometric_multiplicity}")

print()
print("bond-matrix eigenvalue phases (divided by pi):")
S = qgraph.cayley(bc, 2j)
nI = g.n_internal
J = np.zeros((2 * nI, 2 * nI), dtype=complex)
J[:nI, nI:] = np.eye(nI)
J[nI:, :nI] = np.eye(nI)
phases = np.sort(np.angle(np.linalg.eigvals(S @ J))) / np.pi
vals, counts = np.unique(np.round(phases, 6), return_counts=True)
for v, c in zip(vals, counts):
    print(f"  phase {v:+.6f} pi  x {c}")
print(f"  (arccos(1/3)/pi = {th/math.pi:.6f})")

print()
print("attempting the interval decoupling (must refuse):")
try:
    qgraph.decouple_symmetric_graph(g, presets.standard_local(3))
except qgraph.SimilarityError as err:
    print("  SimilarityError:", err)
