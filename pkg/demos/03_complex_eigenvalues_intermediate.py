"""Nonreal spectrum of the intermediate conditions on [0, 1].

psi(0) = 0 together with psi(1) = psi'(0) makes det Z(k) proportional to
sin k - k, whose nonzero roots are genuinely complex: the operator is
regular but far from self-adjoint.  The script locates the roots in both
upper-half quadrants and, optionally, draws the determinant landscape.
"""

import sys

import numpy as np

import qgraph
from qgraph import Region, SecularSystem, presets

g, bc, _ = presets.build_preset("intermediate")
sys_ = SecularSystem(g, bc)

print("classification:", qgraph.classify(bc).as_dict())
print()

right = qgraph.find_eigenvalues(sys_, Region(0.5, 30.0, 0.5, 30.0))
left = qgraph.find_eigenvalues(sys_, Region(-30.0, -0.5, 0.5, 30.0))
print("roots of sin k = k in the upper half plane (|k| <= 30):")
for p in sorted(right + left, key=lambda p: p.k.real):
    print(f"  k = {p.k:+.9f}   lambda = {p.lam:+.6f}")

zm = qgraph.zero_mode_point(sys_)
print()
print(f"zero mode: psi(x) = x (kernel dim {zm.geometric_multiplicity}, "
      f"determinant order {zm.winding_multiplicity} at k = 0)")

print()
print("conjugate pairing with the adjoint realization:")
adj = SecularSystem(g, qgraph.adjoint(bc))
adj_pts = qgraph.find_eigenvalues(adj, Region(-30.0, 0.0, 0.5, 30.0))
for p in right:
    partner = min(adj_pts, key=lambda q: abs(q.k - (-np.conj(p.k))))
    print(f"  k = {p.k:.6f}  <->  adjoint zero at {partner.k:.6f} "
          f"(distance {abs(partner.k - (-np.conj(p.k))):.1e})")

if "--plot" in sys.argv:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    res = np.linspace(0.3, 30, 400)
    ims = np.linspace(0.05, 8, 160)
    grid = np.array([[sys_.log_det_Z(complex(r, i)).real for r in res] for i in ims])
    fig, ax = plt.subplots(figsize=(9, 3))
    pc = ax.pcolormesh(res, ims, grid, shading="auto", cmap="viridis")
    ax.plot([p.k.real for p in right], [p.k.imag for p in right], "r*", ms=12)
    ax.set_xlabel("Re k")
    ax.set_ylabel("Im k")
    ax.set_title("log |det Z(k)| with located zeros")
    fig.colorbar(pc)
    fig.tight_layout()
    fig.savefig("intermediate_detZ.png", dpi=150)
    print()
    print("wrote intermediate_detZ.png")
