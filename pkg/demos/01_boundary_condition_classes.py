"""Tour of boundary-condition classes on small graphs.

Walks through the classification pipeline on the model pairs: dimension
counting, regularity, self-adjointness, the m-sectorial (P, L)
parametrization, adjoints, and antilinear symmetry.
"""

import numpy as np

import qgraph
from qgraph import presets


def show(name, bc):
    cls = qgraph.classify(bc)
    print(f"{name:22s} dim M = {cls.dim_M}  regular = {str(cls.regular):5s} "
          f"self-adjoint = {str(cls.self_adjoint):5s} m-sectorial = {str(cls.m_sectorial):5s} "
          f"T-self-adjoint = {cls.t_self_adjoint}")


print("=== classification of the model pairs ===")
show("Dirichlet (d=2)", qgraph.dirichlet(2))
show("Neumann (d=2)", qgraph.neumann(2))
show("standard, nu=3", presets.standard_local(3))
show("delta, gamma=1+2i", presets.delta_local(3, 1 + 2j))
show("tau = 0.3", presets.tau_pair(0.3))
show("tau = pi/2", presets.tau_pair(np.pi / 2))
show("sign-flip pair", presets.sgnsgn_pair())
show("intermediate", presets.intermediate_pair())
show("totally degenerate", presets.empty_spectrum_pair())

print()
print("=== the Cayley transform ===")
S = qgraph.cayley(presets.tau_pair(0.3), 1j)
print("S(i) for tau = 0.3 (k-independent):")
print(np.round(S, 6))
print("gsgnsgn(2,1) scattering matrix (integer entries):")
print(np.round(qgraph.cayley(presets.gsgnsgn_pair(2, 1), 2j).real, 12))

print()
print("=== m-sectorial parametrization of the complex delta ===")
pair = qgraph.m_sectorial(presets.delta_local(4, 2 - 1j))
print("P (projector onto Ker B):")
print(np.round(pair.P.real, 6))
print("L = -(gamma/4) * rank-one projector:")
print(np.round(pair.L, 6))

print()
print("=== adjoints ===")
bc = presets.residual_example_sectorial().boundary_conditions()
adj = qgraph.adjoint(bc)
print("lasso-graph pair: distance(adjoint(adjoint(bc)), bc) =",
      f"{qgraph.projector_distance(qgraph.adjoint(adj), bc):.2e}")

print()
print("=== regularizing an irregular pair ===")
bc = presets.sgnsgn_pair()
for eps in (0.5, 0.1, 0.01):
    out = qgraph.regularize(bc, eps)
    print(f"eps = {eps:5.2f}: regular = {qgraph.is_regular(out).regular}, "
          f"projector distance to the limit = {qgraph.projector_distance(out, bc):.4f}")
