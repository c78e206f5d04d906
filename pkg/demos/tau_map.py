"""
The factor-to-covariance map tau
================================

``tau(C)`` integrates ``G (CG)^{-1} Psi (CG)^{-*} G^*``. Its derivative is
only available by finite differences here; at random factors it keeps full
rank, so no singular point of tau turns up in this spot check.
"""

import numpy as np

import momentmap as mm

cfg = mm.bundled_config()
problem = cfg.problem()

# with Psi built from C itself the integrand collapses to G G^*
same = mm.MomentProblem(problem.filt, mm.PriorFactor(cfg.factors["C0"]), problem.basis, problem.grid)
print("tau(C0) with Psi from C0:\n", mm.tau_map(same, cfg.factors["C0"]).round(10))

rng = np.random.default_rng(7)
for name, C in [*cfg.factors.items(), ("random", rng.standard_normal((2, 4)))]:
    if not mm.determinantal_roots(C, problem.filt).schur:
        print(f"{name}: not a Schur factor, skipped")
        continue
    J = mm.tau_jacobian_fd(problem, C)
    s = np.linalg.svd(J, compute_uv=False)
    print(f"{name}: jacobian {J.shape}, rank {mm.numerical_rank(s)}, "
          f"singular values {np.array2string(s, precision=3)}")

# homogeneity of degree -2
C = cfg.factors["C1"]
ratio = mm.tau_map(problem, 3 * C) / mm.tau_map(problem, C)
print("tau(3C)/tau(C) =", np.unique(ratio.round(12)))
