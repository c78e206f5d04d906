"""Sign changes of ``det J_h`` along a segment and bisection to the critical point."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .basis import LambdaParam
from .errors import InfeasibleLambdaError, NoSignChangeError
from .maps import MomentProblem, jacobian_matrix

DEFAULT_TOL_T = 1e-8
RANK_THRESHOLD = 1e-8
DEFAULT_SAMPLES = 11


@dataclass(frozen=True, eq=False)
class SegmentPath:
    """``Lambda(t) = (1 - t) start + t end`` for ``t`` in ``[0, 1]``."""

    start: LambdaParam
    end: LambdaParam

    def at(self, t: float) -> LambdaParam:
        # start + t (end - start) keeps a degenerate path exactly constant
        return LambdaParam(
            self.start.matrix + t * (self.end.matrix - self.start.matrix),
            self.start.coords + t * (self.end.coords - self.start.coords),
        )

    @property
    def direction(self) -> LambdaParam:
        return self.end - self.start


@dataclass
class DetScan:
    ts: np.ndarray
    dets: np.ndarray
    brackets: list[tuple[float, float]] = field(default_factory=list)

    def rows(self) -> list[tuple[float, float]]:
        return [(float(t), float(d)) for t, d in zip(self.ts, self.dets)]


@dataclass
class CriticalPointRecord:
    t_c: float
    lambda_c: LambdaParam
    det_at_c: float
    singular_values: np.ndarray
    numerical_rank: int
    bracket: tuple[float, float] = (0.0, 1.0)
    iterations: int = 0

    @property
    def rank_deficiency(self) -> int:
        return len(self.singular_values) - self.numerical_rank


def numerical_rank(singular_values: np.ndarray, threshold: float = RANK_THRESHOLD) -> int:
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > threshold * s[0]))


def path_det(problem: MomentProblem, path: SegmentPath, t: float) -> float:
    try:
        return jacobian_matrix(problem, path.at(t)).det()
    except InfeasibleLambdaError as exc:
        raise InfeasibleLambdaError(exc.theta, exc.eigmin, t=t) from None


def det_scan(path: SegmentPath, num_samples: int, problem: MomentProblem,
             executor=None) -> DetScan:
    """Evaluate ``det J_h`` at equidistant ``t`` (endpoints included) and bracket sign changes."""
    if num_samples < 2:
        raise ValueError("need at least two samples")
    ts = np.linspace(0.0, 1.0, num_samples)

    def one(t):
        return path_det(problem, path, t)

    dets = np.array(list(executor.map(one, ts)) if executor else [one(t) for t in ts])
    brackets = [
        (float(ts[i]), float(ts[i + 1]))
        for i in range(num_samples - 1)
        if np.sign(dets[i]) * np.sign(dets[i + 1]) < 0
    ]
    return DetScan(ts, dets, brackets)


def bisect_sign_change(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = DEFAULT_TOL_T) -> tuple[float, float, int]:
    """Shrink ``[lo, hi]`` around a sign change of ``f`` to width at most ``tol``.

    Returns the final bracket and the number of halvings. An exact zero at a
    midpoint collapses the bracket onto it.
    """
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return lo, lo, 0
    if f_hi == 0.0:
        return hi, hi, 0
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChangeError(
            f"no sign change on [{lo:.6g}, {hi:.6g}]: f = {f_lo:.6g}, {f_hi:.6g}"
        )
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        iterations += 1
        if f_mid == 0.0:
            return mid, mid, iterations
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return lo, hi, iterations


def max_bisection_steps(lo: float, hi: float, tol: float) -> int:
    return max(0, math.ceil(math.log2((hi - lo) / tol)))


def bisect_critical(path: SegmentPath, bracket: tuple[float, float], problem: MomentProblem,
                    tol_t: float = DEFAULT_TOL_T,
                    rank_threshold: float = RANK_THRESHOLD) -> CriticalPointRecord:
    """Bisect ``t -> det J_h(Lambda(t))`` on ``bracket`` and characterize the midpoint."""
    lo, hi, iterations = bisect_sign_change(
        lambda t: path_det(problem, path, t), bracket[0], bracket[1], tol_t
    )
    t_c = 0.5 * (lo + hi)
    lam_c = path.at(t_c)
    jac = jacobian_matrix(problem, lam_c)
    s = jac.singular_values()
    return CriticalPointRecord(
        t_c=t_c,
        lambda_c=lam_c,
        det_at_c=jac.det(),
        singular_values=s,
        numerical_rank=numerical_rank(s, rank_threshold),
        bracket=(lo, hi),
        iterations=iterations,
    )


def find_critical_points(path: SegmentPath, problem: MomentProblem,
                         num_samples: int = DEFAULT_SAMPLES, tol_t: float = DEFAULT_TOL_T,
                         executor=None) -> tuple[DetScan, list[CriticalPointRecord]]:
    """Coarse scan followed by bisection inside every bracket found."""
    scan = det_scan(path, num_samples, problem, executor)
    return scan, [bisect_critical(path, b, problem, tol_t) for b in scan.brackets]
