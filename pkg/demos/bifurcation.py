"""
A simple bifurcation: the moment map is not injective
=====================================================

At the critical point the augmented map ``H(Lambda, t) = h(Lambda) - p(t)``
has a two-dimensional kernel. Reducing onto that kernel leaves a 2x2
Hessian; eigenvalues of opposite sign mean two solution branches cross,
so two distinct parameters share the same output.
"""

import numpy as np

import momentmap as mm

cfg = mm.bundled_config()
problem = cfg.problem()
basis = problem.basis
path = mm.SegmentPath(cfg.lambda_for("C0", basis), cfg.lambda_for("C1", basis))

scan = mm.det_scan(path, 11, problem)
critical = mm.bisect_critical(path, scan.brackets[0], problem)

rep = mm.analyze_critical_point(critical, path, problem)
s = np.linalg.svd(rep.augmented_jacobian, compute_uv=False)
print("singular values of [J_h | -dp/dt]:", np.array2string(s, precision=3))
print("kernel dimension:", rep.kernel_dimension)

print("\nreduced Hessian:\n", rep.hessian_b.round(4))
print("eigenvalues:", rep.eigenvalues.round(4))
print("classification:", rep.classification)

# the sign of u_M is arbitrary, so only the sign pattern is meaningful
flipped = mm.LSDecomposition(rep.decomposition.U1, -rep.decomposition.U2,
                             rep.decomposition.V1, rep.decomposition.V2,
                             rep.decomposition.sigma, rep.decomposition.singular_values)
_, eig = mm.bifurcation_hessian(critical, path, flipped, problem)
print("with u_M negated:", eig.round(4))

# at a regular point the reduction is refused
try:
    regular = mm.CriticalPointRecord(1.0, path.at(1.0), float("nan"), s, 7, (1.0, 1.0), 0)
    mm.analyze_critical_point(regular, path, problem)
except mm.NotSimpleCriticalPointError as exc:
    print("\nregular point:", exc)
