"""
Spectral factors, their roots, and the block-Toeplitz parameter
===============================================================

A factor ``C`` defines the density ``(CG)^*(CG)`` on the unit circle. It is
only a valid (outer) factor when the determinantal roots of ``z C G(z)``
lie strictly inside the unit disc. The parameter ``Lambda`` it induces is
the projection of ``C^T C`` onto block-Toeplitz matrices.
"""

import numpy as np

import momentmap as mm

cfg = mm.bundled_config()
filt = mm.shift_filter(cfg.m, cfg.p)
basis = cfg.basis()

# roots of the prior factor K and of the two path endpoints
for name, C in [("K", cfg.K), *cfg.factors.items()]:
    rep = mm.determinantal_roots(C, filt)
    roots = ", ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in rep.roots)
    print(f"{name:>3}: {roots}   |z| max {rep.moduli.max():.4f}   schur={rep.schur}")

# Lambda_0 = (C_0^T C_0 + C_1^T C_1)/2 and Lambda_1 = C_1^T C_0 from the column blocks
np.set_printoptions(precision=4, suppress=True)
for name, C in cfg.factors.items():
    lam = mm.lambda_from_factor(C, basis)
    L0, L1 = lam.blocks(cfg.m)
    print(f"\n{name}\nL0 =\n{L0}\nL1 =\n{L1}")

# the parameter reproduces the density exactly on the grid
grid = mm.make_grid(cfg.delta_theta)
G = mm.sample_filter(filt, grid)
C = cfg.factors["C0"]
lam = mm.lambda_from_factor(C, basis)
Gh = np.conj(np.swapaxes(G, 1, 2))
gap = np.abs(Gh @ lam.matrix @ G - Gh @ C.T @ C @ G).max()
print(f"\nmax |G* L G - (CG)*(CG)| on {len(grid)} nodes: {gap:.2e}")
print(f"min eig of G* L G: {mm.feasibility_check(filt, lam, grid):.4f}")
