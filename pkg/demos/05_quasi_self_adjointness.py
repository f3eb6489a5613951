"""Similarity to self-adjoint Laplacians and metric operators.

On equal-length graphs a block transform G with G S G^{-1} Hermitian (at
imaginary k) certifies similarity to a self-adjoint realization; the
metric edge-mixing matrix (G*G)^{-1} then intertwines the operator with
its adjoint: S* = (G*G) S (G*G)^{-1}.
"""

import math

import numpy as np

import qgraph
from qgraph import Region, SecularSystem, presets

print("=== the tau point interaction on the line ===")
for tau in (0.0, 0.3, 1.0, 1.5):
    g, bc, _ = presets.build_preset("tau", {"tau": tau})
    cert = qgraph.find_similarity_to_selfadjoint(g, bc)
    print(f"tau = {tau:4.2f}: certificate = {cert is not None}", end="")
    if cert:
        print(f", metric = {np.round(cert.metric_matrix, 4).tolist()}"
              f", quasi-self-adjointness residual = {cert.quasi_self_adjoint_residual:.1e}")
    else:
        print()

tau = 0.3
g, bc, _ = presets.build_preset("tau", {"tau": tau})
cert = qgraph.find_similarity_to_selfadjoint(g, bc)
theta, theta_inv = qgraph.metric_operator(cert)
print()
print("closed form (1/cos tau) [[1, i sin tau], [-i sin tau, 1]]:")
print(np.round((1 / math.cos(tau)) * np.array([[1, 1j * math.sin(tau)], [-1j * math.sin(tau), 1]]), 8))
print("computed metric:")
print(np.round(theta, 8))

print()
print("=== scaled delta coupling: discrete + continuous spectrum ===")
g, bc, _ = presets.build_preset("scaled_delta")
cert = qgraph.find_similarity_to_selfadjoint(g, bc)
print("diagonal metric:", np.round(np.diag(cert.metric_matrix).real, 8).tolist())
pts = qgraph.find_eigenvalues(SecularSystem(g, bc), Region.quadrant(3.0, 3.0))
print("isolated eigenvalue:", pts[0].lam)
print("essential spectrum:", qgraph.essential_spectrum(qgraph.classify(bc), g))

print()
print("=== two-edge loop with tau couplings: a disguised circle ===")
g = qgraph.loop_graph(2, 1.0)
dec = qgraph.decouple_symmetric_graph(g, presets.tau_pair(0.3))
for p in dec.problems:
    print(f"  {p.count} x {p.labels[0]}-{p.labels[1]}")
print("  union spectrum (k/pi, mult):",
      [(round(k / math.pi, 6), m) for k, m in dec.eigenvalue_multiset(3.5 * math.pi)],
      "+ zero mode x", dec.zero_mode_count())
print("  (the circle of circumference 2: eigenvalues (n pi)^2 twice, 0 once)")
