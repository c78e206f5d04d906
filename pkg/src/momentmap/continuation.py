"""Solve ``h(Lambda) = Sigma`` by parameter continuation in moment space.

The moment path is the straight line ``p(t) = t y + (1 - t) y0`` from
``y0 = h(Lambda_start)`` to ``y = Sigma``, both in basis coordinates.  The
preimage curve is followed with an Euler predictor along
``dx/dt = J(x)^{-1} (y - y0)`` and a Newton corrector on ``h(x) = p(t)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .basis import LambdaParam
from .errors import InfeasibleLambdaError
from .maps import MomentProblem, as_matrix, h_map, jacobian_matrix

log = logging.getLogger(__name__)

CONVERGED = "converged"
DIVERGED = "diverged-near-singularity"
INFEASIBLE = "infeasible-iterate"
APPROXIMATE = "approximate"


@dataclass
class ContinuationOptions:
    dt0: float = 0.1
    min_step: float = 1e-10
    cond_max: float = 1e10
    newton_tol: float = 1e-10
    max_corrector: int = 20
    residual_tol: float = 1e-8
    grow: float = 1.5
    shrink: float = 0.5
    fast_iterations: int = 3
    max_steps: int = 10_000


@dataclass
class ContinuationStep:
    t: float
    coords: np.ndarray
    residual: float
    cond: float
    dt: float
    corrector_residuals: list[float] = field(default_factory=list)


@dataclass
class ContinuationTrace:
    status: str
    steps: list[ContinuationStep] = field(default_factory=list)
    solution: LambdaParam | None = None
    last_t: float = 0.0
    final_residual: float = float("nan")
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


class _StepFailure(Exception):
    def __init__(self, reason: str, cond: float = float("nan")):
        self.reason = reason
        self.cond = cond
        super().__init__(reason)


def _check_target(problem: MomentProblem, target: np.ndarray) -> np.ndarray:
    target = np.asarray(target, dtype=float)
    basis = problem.basis
    if target.shape != (basis.n, basis.n):
        raise ValueError(f"target must be {basis.n}x{basis.n}, got {target.shape}")
    if not np.allclose(target, target.T, atol=1e-12 * max(1.0, np.abs(target).max())):
        raise ValueError("target must be symmetric")
    if np.linalg.eigvalsh(target)[0] <= 0:
        raise ValueError("target must be positive definite")
    residual = np.linalg.norm(target - basis.matrix(basis.coords(target)))
    if residual > 1e-8 * np.linalg.norm(target):
        raise ValueError(f"target is not in the range of Gamma (residual {residual:.3g})")
    return basis.coords(target)


def _jacobian(problem, x):
    J = jacobian_matrix(problem, problem.basis.matrix(x)).entries
    return J, np.linalg.cond(J)


def _correct(problem, x, target_coords, tol, opts) -> tuple[np.ndarray, list[float], float]:
    """Newton iteration on ``coords(h(x)) = target_coords``."""
    history = []
    cond = float("nan")
    for _ in range(opts.max_corrector):
        try:
            r = problem.basis.coords(h_map(problem, problem.basis.matrix(x))) - target_coords
        except InfeasibleLambdaError:
            raise _StepFailure("infeasible") from None
        res = float(np.linalg.norm(r))
        history.append(res)
        if res <= tol:
            return x, history, cond
        if len(history) > 2 and res > history[-2]:
            raise _StepFailure("corrector diverging")
        J, cond = _jacobian(problem, x)
        if cond > opts.cond_max:
            raise _StepFailure("singular", cond)
        x = x - np.linalg.solve(J, r)
    raise _StepFailure("corrector did not converge")


def continuation_solve(target: np.ndarray, start: LambdaParam | np.ndarray, problem: MomentProblem,
                       options: ContinuationOptions | None = None) -> ContinuationTrace:
    """Predictor-corrector continuation from ``start`` to a solution of ``h(Lambda) = target``."""
    opts = options or ContinuationOptions()
    basis = problem.basis
    y = _check_target(problem, target)
    norm_sigma = float(np.linalg.norm(target))
    tol = opts.newton_tol * norm_sigma
    x = basis.coords(as_matrix(start))
    y0 = basis.coords(h_map(problem, basis.matrix(x)))
    direction = y - y0

    trace = ContinuationTrace(status=CONVERGED)
    if np.linalg.norm(direction) <= tol:
        trace.solution = start if isinstance(start, LambdaParam) else LambdaParam.from_coords(x, basis)
        trace.final_residual = float(np.linalg.norm(direction))
        trace.message = "target equals h(start)"
        return trace

    t, dt = 0.0, opts.dt0
    last_reason = ""
    while t < 1.0:
        if len(trace.steps) >= opts.max_steps:
            trace.status, trace.message = DIVERGED, "step budget exhausted"
            break
        J, cond = _jacobian(problem, x)
        if cond > opts.cond_max:
            trace.status = DIVERGED
            trace.message = f"Jacobian condition {cond:.3g} exceeds {opts.cond_max:.3g} at t = {t:.6g}"
            break
        dt = min(dt, 1.0 - t)
        t_new = 1.0 if dt >= 1.0 - t else t + dt
        x_pred = x + dt * np.linalg.solve(J, direction)
        try:
            x_new, history, _ = _correct(problem, x_pred, t_new * y + (1 - t_new) * y0, tol, opts)
        except _StepFailure as fail:
            last_reason = fail.reason
            dt *= opts.shrink
            log.debug("step at t=%.6g failed (%s); dt -> %.3g", t, fail.reason, dt)
            if dt < opts.min_step:
                trace.status = INFEASIBLE if last_reason == "infeasible" else DIVERGED
                trace.message = f"step size underflow at t = {t:.6g} ({last_reason})"
                break
            continue
        x, t = x_new, t_new
        trace.steps.append(ContinuationStep(t, x.copy(), history[-1], float(cond), dt, history))
        if len(history) <= opts.fast_iterations:
            dt *= opts.grow

    trace.last_t = t
    if trace.status == CONVERGED:
        solution = LambdaParam.from_coords(x, basis)
        residual = float(np.linalg.norm(h_map(problem, solution) - target))
        trace.final_residual = residual
        if residual < opts.residual_tol * norm_sigma:
            trace.solution = solution
        else:
            trace.status = DIVERGED
            trace.message = f"final residual {residual:.3g} above tolerance"
    return trace


def ode_solve(target: np.ndarray, start: LambdaParam | np.ndarray, problem: MomentProblem,
              cond_max: float = 1e10, rtol: float = 1e-8, atol: float = 1e-10,
              residual_tol: float = 1e-8) -> ContinuationTrace:
    """Integrate ``dx/dt = J(x)^{-1}(y - y0)`` with an adaptive Runge-Kutta method.

    Demonstration mode: no corrector, so the endpoint is only as accurate as
    the integrator. Stops when the Jacobian condition number exceeds
    ``cond_max``.
    """
    basis = problem.basis
    y = _check_target(problem, target)
    x0 = basis.coords(as_matrix(start))
    y0 = basis.coords(h_map(problem, basis.matrix(x0)))
    direction = y - y0

    def rhs(t, x):
        J = jacobian_matrix(problem, basis.matrix(x)).entries
        return np.linalg.solve(J, direction)

    def near_singular(t, x):
        J = jacobian_matrix(problem, basis.matrix(x)).entries
        return np.log(cond_max) - np.log(np.linalg.cond(J))

    near_singular.terminal = True
    trace = ContinuationTrace(status=APPROXIMATE)
    try:
        sol = solve_ivp(rhs, (0.0, 1.0), x0, rtol=rtol, atol=atol, events=near_singular)
    except InfeasibleLambdaError as exc:
        trace.status, trace.message = INFEASIBLE, str(exc)
        return trace
    for t, x in zip(sol.t, sol.y.T):
        trace.steps.append(ContinuationStep(float(t), x.copy(), float("nan"), float("nan"), 0.0))
    trace.last_t = float(sol.t[-1])
    if sol.status == 1:
        trace.status = DIVERGED
        trace.message = f"Jacobian condition exceeded {cond_max:.3g} at t = {trace.last_t:.6g}"
        return trace
    solution = LambdaParam.from_coords(sol.y[:, -1], basis)
    try:
        residual = float(np.linalg.norm(h_map(problem, solution) - target))
    except InfeasibleLambdaError as exc:
        trace.status, trace.message = INFEASIBLE, str(exc)
        return trace
    trace.final_residual = residual
    trace.solution = solution
    if residual < residual_tol * np.linalg.norm(target):
        trace.status = CONVERGED
    return trace
