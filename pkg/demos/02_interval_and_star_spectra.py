"""Eigenvalue search on compact graphs: interval and star.

The secular determinant det Z(k) is entire, so zeros are certified by
the argument principle: the boundary winding of the search rectangle
equals the multiplicity sum.  Real zeros live on the rectangle edge and
are divided out before the walk.
"""

import math

import qgraph
from qgraph import Region, SecularSystem, presets

print("=== interval [0, pi] with Dirichlet ends ===")
sys_ = SecularSystem(qgraph.interval(math.pi), qgraph.dirichlet(2))
pts = qgraph.find_eigenvalues(sys_, Region.quadrant(10.4, 1.0))
print("lambda:", [round(p.lam.real, 9) for p in pts])
rep = qgraph.weyl_count_check(
    qgraph.find_eigenvalues(sys_, Region.quadrant(50.5, 1.0)), math.pi
)
print(f"weyl slope over 50 eigenvalues: {rep.slope:.6f} (relative error {rep.relative_error:.1e})")

print()
print("=== compact star, standard center + Dirichlet pendants ===")
g, bc, _ = presets.build_preset("star", {"edges": 3, "length": 1.0})
sys_ = SecularSystem(g, bc)
for p in qgraph.find_eigenvalues(sys_, Region.quadrant(3.2 * math.pi, 1.0)):
    print(f"  k = {p.k.real/math.pi:.6f} pi   multiplicity {p.geometric_multiplicity}")

print()
print("the same multiset from the decoupled interval problems:")
dec = qgraph.decouple_symmetric_graph(
    g, presets.standard_local(3), endpoint_condition=(1.0, 0.0)
)
for prob in dec.problems:
    print(f"  {prob.count} x {prob.labels[0]}-{prob.labels[1]} interval(s)")
print("  union spectrum:",
      [(round(k / math.pi, 6), m) for k, m in dec.eigenvalue_multiset(3.2 * math.pi)])

print()
print("=== eigenfunctions ===")
pts = qgraph.find_eigenvalues(sys_, Region.quadrant(1.8 * math.pi, 1.0))
double = [p for p in pts if p.geometric_multiplicity == 2][0]
efs = qgraph.eigenfunction(sys_, double)
print(f"k = pi carries {len(efs)} independent eigenfunctions; "
      f"boundary residuals {[f'{e.residual:.1e}' for e in efs]}")
