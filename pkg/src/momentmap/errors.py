"""Exception hierarchy for the moment-map toolkit."""

from __future__ import annotations


class MomentMapError(Exception):
    """Base class for every error raised by :mod:`momentmap`."""


class UnstableFilterError(MomentMapError):
    """The filter matrix ``A`` is not a discrete-time stability matrix."""


class InfeasibleLambdaError(MomentMapError):
    """``G* Lambda G`` fails to be positive definite at some grid angle."""

    def __init__(self, theta: float, eigmin: float, t: float | None = None):
        self.theta = float(theta)
        self.eigmin = float(eigmin)
        self.t = t
        where = f" on the path at t = {t:.6g}" if t is not None else ""
        super().__init__(
            f"Lambda is infeasible{where}: eigmin(G* Lambda G) = {eigmin:.6g} "
            f"at theta = {theta:.6g}"
        )


class SingularFactorError(MomentMapError):
    """``C G(z)`` is numerically singular at some grid angle."""

    def __init__(self, theta: float, cond: float):
        self.theta = float(theta)
        self.cond = float(cond)
        super().__init__(
            f"C G(z) is near-singular at theta = {theta:.6g} (condition number {cond:.3g})"
        )


class DegenerateFactorError(MomentMapError):
    """``det(z C G(z))`` vanishes identically."""


class NoSignChangeError(MomentMapError):
    """A bisection bracket does not enclose a sign change."""


class NotSimpleCriticalPointError(MomentMapError):
    """The augmented Jacobian does not have rank ``M - 1``."""

    def __init__(self, rank: int, expected: int):
        self.rank = rank
        self.expected = expected
        super().__init__(
            f"augmented Jacobian has numerical rank {rank}, expected {expected}: "
            "not a simple critical point"
        )


class ConfigError(MomentMapError):
    """Scenario configuration is malformed or dimensionally inconsistent."""
