"""Rational filter banks on the unit circle and the quadrature operators Gamma, Gamma*.

The filter is ``G(z) = (zI - A)^{-1} B``.  All integrals over the unit circle
are normalized, ``int F = int_{-pi}^{pi} F(e^{i theta}) dtheta / 2pi``, and are
approximated by a rectangle rule on an equidistant grid over ``(-pi, pi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import UnstableFilterError

Summation = Literal["sequential", "pairwise"]

DEFAULT_DELTA_THETA = 1e-4


def hermitize(x: np.ndarray) -> np.ndarray:
    """Return ``(X + X^*) / 2`` over the last two axes."""
    return 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))


def ctranspose(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


@dataclass(frozen=True, eq=False)
class RationalFilter:
    """State-space pair ``(A, B)`` defining ``G(z) = (zI - A)^{-1} B``.

    ``A`` must be stable in the discrete-time sense, ``B`` must have full
    column rank and ``(A, B)`` must be reachable. These are checked on
    construction.
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A))
        B = np.atleast_2d(np.asarray(self.B))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if B.ndim != 2 or B.shape[0] != A.shape[0]:
            raise ValueError(f"B must have {A.shape[0]} rows, got shape {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

        n, m = B.shape
        radius = np.max(np.abs(np.linalg.eigvals(A))) if n else 0.0
        if radius >= 1.0:
            raise UnstableFilterError(f"spectral radius of A is {radius:.6g} >= 1")
        if np.linalg.matrix_rank(B) != m:
            raise ValueError("B must have full column rank")
        blocks = [B]
        for _ in range(n - 1):
            blocks.append(A @ blocks[-1])
        if np.linalg.matrix_rank(np.hstack(blocks)) != n:
            raise ValueError("(A, B) is not reachable")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def is_real(self) -> bool:
        return not (np.iscomplexobj(self.A) or np.iscomplexobj(self.B))


def shift_filter(m: int, p: int) -> RationalFilter:
    """Block shift filter of the matrix covariance-extension problem.

    ``n = m (p + 1)`` and ``G(z) = [z^{-(p+1)} I; ...; z^{-1} I]``.
    """
    if m < 1 or p < 0:
        raise ValueError(f"need m >= 1 and p >= 0, got m={m}, p={p}")
    n = m * (p + 1)
    A = np.eye(n, k=m)
    B = np.zeros((n, m))
    B[n - m:, :] = np.eye(m)
    return RationalFilter(A, B)


def eval_filter(filt: RationalFilter, z: complex) -> np.ndarray:
    """Evaluate ``G(z)`` by a linear solve against ``zI - A``."""
    lhs = z * np.eye(filt.n) - filt.A
    try:
        return np.linalg.solve(lhs, filt.B.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise UnstableFilterError(f"zI - A is singular at z = {z}") from exc


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    """Equidistant angles ``theta_k = -pi + k * step``, ``k = 1..N``, ending at ``pi``."""

    size: int
    angles: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"grid size must be positive, got {self.size}")
        k = np.arange(1, self.size + 1)
        object.__setattr__(self, "angles", -np.pi + 2.0 * np.pi * k / self.size)

    @property
    def step(self) -> float:
        return 2.0 * np.pi / self.size

    @property
    def weight(self) -> float:
        """Quadrature weight ``step / 2pi``."""
        return self.step / (2.0 * np.pi)

    @property
    def points(self) -> np.ndarray:
        """Unit-circle nodes ``exp(i theta_k)``."""
        return np.exp(1j * self.angles)

    def __len__(self) -> int:
        return self.size


def make_grid(delta_theta: float = DEFAULT_DELTA_THETA) -> FrequencyGrid:
    if not (0.0 < delta_theta <= 2.0 * np.pi) or not math.isfinite(delta_theta):
        raise ValueError(f"delta_theta must lie in (0, 2pi], got {delta_theta}")
    return FrequencyGrid(max(1, int(round(2.0 * np.pi / delta_theta))))


@dataclass(frozen=True, eq=False)
class MatrixSamples:
    """Square-matrix-valued function sampled on a frequency grid."""

    values: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 3 or values.shape[1] != values.shape[2]:
            raise ValueError(f"samples must have shape (N, s, s), got {values.shape}")
        if self.hermitian:
            scale = max(np.max(np.abs(values)), 1.0)
            if np.max(np.abs(values - ctranspose(values))) > 1e-12 * scale:
                raise ValueError("samples flagged Hermitian are not Hermitian")
        object.__setattr__(self, "values", values)

    @property
    def side(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]


def sample_filter(filt: RationalFilter, grid: FrequencyGrid) -> np.ndarray:
    """``G(e^{i theta_k})`` stacked into an ``(N, n, m)`` array."""
    z = grid.points
    lhs = z[:, None, None] * np.eye(filt.n) - filt.A
    rhs = np.broadcast_to(filt.B.astype(complex), (len(z), filt.n, filt.m))
    try:
        return np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise UnstableFilterError("zI - A is singular on the grid") from exc


def _pairwise_sum(values: np.ndarray) -> np.ndarray:
    if len(values) <= 8:
        out = values[0].copy()
        for v in values[1:]:
            out += v
        return out
    half = len(values) // 2
    return _pairwise_sum(values[:half]) + _pairwise_sum(values[half:])


def quadrature(values: np.ndarray, grid: FrequencyGrid,
               summation: Summation = "sequential") -> np.ndarray:
    """Riemann sum ``(step / 2pi) * sum_k F(theta_k)`` over the leading axis."""
    values = np.asarray(values)
    if values.shape[0] != grid.size:
        raise ValueError(
            f"got {values.shape[0]} samples for a grid of size {grid.size}"
        )
    if summation == "sequential":
        # cumsum accumulates strictly in ascending k
        total = np.cumsum(values, axis=0)[-1]
    elif summation == "pairwise":
        total = _pairwise_sum(values)
    else:
        raise ValueError(f"unknown summation mode {summation!r}")
    return grid.weight * total


def integrate(samples: MatrixSamples | np.ndarray, grid: FrequencyGrid,
              summation: Summation = "sequential") -> np.ndarray:
    """Integrate sampled matrices over the unit circle."""
    if isinstance(samples, MatrixSamples):
        out = quadrature(samples.values, grid, summation)
        return hermitize(out) if samples.hermitian else out
    return quadrature(samples, grid, summation)


def gamma_apply(filt: RationalFilter, phi: MatrixSamples | np.ndarray,
                grid: FrequencyGrid, summation: Summation = "sequential",
                G: np.ndarray | None = None) -> np.ndarray:
    """``Gamma(Phi) = int G Phi G^*``, Hermitized.

    ``G`` may be passed in to reuse previously sampled filter values.
    """
    values = phi.values if isinstance(phi, MatrixSamples) else np.asarray(phi)
    if values.shape[1:] != (filt.m, filt.m):
        raise ValueError(
            f"Phi samples must be {filt.m}x{filt.m}, got {values.shape[1:]}"
        )
    if G is None:
        G = sample_filter(filt, grid)
    return hermitize(quadrature(G @ values @ ctranspose(G), grid, summation))


def gamma_adjoint(filt: RationalFilter, X: np.ndarray, z: complex | np.ndarray) -> np.ndarray:
    """``Gamma^*(X)(z) = G^*(z) X G(z)``.

    ``z`` may be a scalar or an array of unit-modulus points, in which case
    the result is stacked along a leading axis.
    """
    X = np.asarray(X)
    if X.shape != (filt.n, filt.n):
        raise ValueError(f"X must be {filt.n}x{filt.n}, got {X.shape}")
    if np.ndim(z) == 0:
        Gz = eval_filter(filt, complex(z))
        return ctranspose(Gz) @ X @ Gz
    z = np.asarray(z)
    lhs = z[:, None, None] * np.eye(filt.n) - filt.A
    Gz = np.linalg.solve(lhs, np.broadcast_to(filt.B.astype(complex), (len(z), filt.n, filt.m)))
    return ctranspose(Gz) @ X @ Gz
