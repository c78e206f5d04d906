"""
Where the Jacobian of the moment map vanishes
=============================================

The determinant of the Jacobian has opposite signs at the two endpoints of
the segment between the parameters of ``C0`` and ``C1``. Somewhere between
them the Jacobian must be singular; a coarse scan finds the bracket and
bisection pins it down.
"""

import momentmap as mm

cfg = mm.bundled_config()
problem = cfg.problem()
basis = problem.basis
path = mm.SegmentPath(cfg.lambda_for("C0", basis), cfg.lambda_for("C1", basis))

scan = mm.det_scan(path, 11, problem)
print("    t        det J_h")
for t, d in scan.rows():
    print(f"{t:5.2f}  {d:12.4f}")
print("brackets:", scan.brackets)

rec = mm.bisect_critical(path, scan.brackets[0], problem)
print(f"\nt_c = {rec.t_c:.6f} after {rec.iterations} halvings")
L0, L1 = rec.lambda_c.blocks(2)
print("L0 =", L0.round(4).tolist())
print("L1 =", L1.round(4).tolist())

# one singular value collapses, the next one stays well away from zero
s = rec.singular_values
print(f"two smallest singular values: {s[-1]:.3e}, {s[-2]:.4f}")
print("rank deficiency:", rec.rank_deficiency)

# for the identity prior the Jacobian is negative definite, so no bracket exists
flat = mm.MomentProblem(problem.filt, mm.PriorFactor.identity(), basis, problem.grid)
print("\nidentity prior brackets:", mm.det_scan(path, 11, flat).brackets)
