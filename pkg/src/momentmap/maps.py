"""The parametric moment map ``h``, its derivatives, and the alternative ``tau`` map.

    h(Lambda) = int G W (G^* Lambda G)^{-1} W^* G^*

with ``W(z) = z K G(z)`` the outer factor of the prior ``Psi = K G G^* K^*``
(or ``W = I`` for the identity prior).  Everything here works in the real
symmetric case: the results are returned as real matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .basis import HermitianBasis, LambdaParam
from .errors import InfeasibleLambdaError, SingularFactorError
from .filters import (
    FrequencyGrid,
    RationalFilter,
    Summation,
    ctranspose,
    hermitize,
    quadrature,
    sample_filter,
)
from .polyroots import RootReport, determinantal_roots

TAU_COND_MAX = 1e12


@dataclass(frozen=True, eq=False)
class PriorFactor:
    """Prior ``Psi = W W^*`` with outer factor ``W(z) = z K G(z)``.

    ``K=None`` stands for the identity prior ``Psi = I`` (``W = I``).
    """

    K: np.ndarray | None = None

    def __post_init__(self):
        if self.K is not None:
            object.__setattr__(self, "K", np.atleast_2d(np.asarray(self.K, dtype=float)))

    @classmethod
    def identity(cls) -> "PriorFactor":
        return cls(None)

    @property
    def is_identity(self) -> bool:
        return self.K is None

    def outer_factor(self, G: np.ndarray, z: np.ndarray) -> np.ndarray:
        """``W`` sampled on the nodes ``z`` given filter samples ``G``."""
        if self.K is None:
            m = G.shape[-1]
            return np.broadcast_to(np.eye(m, dtype=complex), (len(z), m, m))
        return z[:, None, None] * (self.K @ G)

    def roots(self, filt: RationalFilter) -> RootReport:
        if self.K is None:
            raise ValueError("identity prior has no determinantal roots")
        return determinantal_roots(self.K, filt)

    def coercivity(self, filt: RationalFilter, grid: FrequencyGrid) -> tuple[float, float]:
        """Bounds ``(mu, M)`` with ``mu I <= Psi <= M I`` on the grid."""
        G = sample_filter(filt, grid)
        W = self.outer_factor(G, grid.points)
        eig = np.linalg.eigvalsh(W @ ctranspose(W))
        return float(eig.min()), float(eig.max())


@dataclass(eq=False)
class MomentProblem:
    """Filter, prior, basis and grid bundled with cached grid samples.

    This is the ``context`` argument taken by the scan, bifurcation and
    continuation routines.
    """

    filt: RationalFilter
    prior: PriorFactor
    basis: HermitianBasis
    grid: FrequencyGrid
    summation: Summation = "sequential"

    def __post_init__(self):
        if self.basis.n != self.filt.n or self.basis.m != self.filt.m:
            raise ValueError("basis and filter dimensions disagree")
        if self.prior.K is not None and self.prior.K.shape != (self.filt.m, self.filt.n):
            raise ValueError(
                f"K must be {self.filt.m}x{self.filt.n}, got {self.prior.K.shape}"
            )

    @cached_property
    def G(self) -> np.ndarray:
        return sample_filter(self.filt, self.grid)

    @cached_property
    def G_star(self) -> np.ndarray:
        return ctranspose(self.G)

    @cached_property
    def W(self) -> np.ndarray:
        return self.prior.outer_factor(self.G, self.grid.points)

    @cached_property
    def GW(self) -> np.ndarray:
        return self.G @ self.W

    @cached_property
    def adjoint_basis(self) -> np.ndarray:
        """``Gamma^*(E_k)`` on the grid, shape ``(M, N, m, m)``."""
        return np.stack([self.adjoint(E) for E in self.basis.elements])

    @cached_property
    def adjoint_basis_t(self) -> np.ndarray:
        """``Gamma^*(E_k)^T`` flattened to shape ``(N, m*m, M)``."""
        M, N, m, _ = self.adjoint_basis.shape
        flat = np.swapaxes(self.adjoint_basis, -1, -2).reshape(M, N, m * m)
        return np.ascontiguousarray(flat.transpose(1, 2, 0))

    def adjoint(self, X: np.ndarray) -> np.ndarray:
        return self.G_star @ X @ self.G

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Quadrature of Hermitian samples, returned as a real symmetric matrix."""
        return hermitize(quadrature(values, self.grid, self.summation)).real

    def with_grid(self, grid: FrequencyGrid) -> "MomentProblem":
        return MomentProblem(self.filt, self.prior, self.basis, grid, self.summation)


def as_matrix(lam: LambdaParam | np.ndarray) -> np.ndarray:
    return lam.matrix if isinstance(lam, LambdaParam) else np.asarray(lam)


@dataclass(eq=False)
class _Pointwise:
    """Per-grid-point quantities at a fixed ``Lambda``."""

    Q: np.ndarray
    R: np.ndarray  # Q^{-1} W^* G^*


def _pointwise(problem: MomentProblem, lam) -> _Pointwise:
    L = as_matrix(lam)
    Q = hermitize(problem.adjoint(L))
    try:
        np.linalg.cholesky(Q)
    except np.linalg.LinAlgError:
        eig = np.linalg.eigvalsh(Q)[:, 0]
        k = int(np.argmin(eig))
        raise InfeasibleLambdaError(problem.grid.angles[k], eig[k]) from None
    R = np.linalg.solve(Q, ctranspose(problem.GW))
    return _Pointwise(Q, R)


def h_map(problem: MomentProblem, lam) -> np.ndarray:
    pw = _pointwise(problem, lam)
    return problem.integrate(problem.GW @ pw.R)


def dh_apply(problem: MomentProblem, lam, delta, _pw: _Pointwise | None = None) -> np.ndarray:
    """Frechet derivative ``dh(Lambda)[delta]``."""
    pw = _pw or _pointwise(problem, lam)
    T = problem.adjoint(as_matrix(delta))
    return -problem.integrate(ctranspose(pw.R) @ T @ pw.R)


def dh_adjoint_apply(problem: MomentProblem, lam, delta) -> np.ndarray:
    """Adjoint of ``dh(Lambda)`` with respect to the trace inner product.

    Differs from :func:`dh_apply` unless ``W`` commutes with ``(G^* Lambda G)^{-1}``.
    """
    pw = _pointwise(problem, lam)
    S = np.linalg.solve(pw.Q, problem.G_star)
    T = problem.adjoint(as_matrix(delta))
    Wh = ctranspose(problem.W)
    return -problem.integrate(ctranspose(S) @ Wh @ T @ problem.W @ S)


def d2h_apply(problem: MomentProblem, lam, delta1, delta2,
              _pw: _Pointwise | None = None) -> np.ndarray:
    """Second Frechet derivative ``d2h(Lambda)[delta1, delta2] = int F + F^*``."""
    pw = _pw or _pointwise(problem, lam)
    T1 = problem.adjoint(as_matrix(delta1))
    T2 = problem.adjoint(as_matrix(delta2))
    F = ctranspose(pw.R) @ T2 @ np.linalg.solve(pw.Q, T1 @ pw.R)
    return problem.integrate(F + ctranspose(F))


def lu_det(J: np.ndarray) -> float:
    """Determinant from a partially pivoted LU factorization."""
    lu, piv = scipy.linalg.lu_factor(np.asarray(J, dtype=float), check_finite=True)
    swaps = np.count_nonzero(piv != np.arange(len(piv)))
    sign = -1.0 if swaps % 2 else 1.0
    return float(sign * np.prod(np.diag(lu)))


@dataclass(eq=False)
class JacobianMatrixRep:
    """Matrix of ``dh(Lambda)`` in an orthonormal basis: ``J[j, k] = <E_j, dh(E_k)>``."""

    entries: np.ndarray
    basis: HermitianBasis
    lam: LambdaParam | np.ndarray = field(repr=False)

    def det(self) -> float:
        return lu_det(self.entries)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)


def jacobian_matrix(problem: MomentProblem, lam) -> JacobianMatrixRep:
    pw = _pointwise(problem, lam)
    R = pw.R
    N, m, n = R.shape
    # <E_j, R^* T_k R> = trace((R E_j R^*) T_k); R E_j R^* via the Kronecker form R (x) conj(R)
    kron = (R[:, :, None, :, None] * np.conj(R)[:, None, :, None, :]).reshape(N, m * m, n * n)
    RER = kron @ problem.basis.elements.reshape(-1, n * n).T
    integrand = np.swapaxes(RER, 1, 2) @ problem.adjoint_basis_t
    J = -quadrature(integrand, problem.grid, problem.summation).real
    if not np.all(np.isfinite(J)):
        raise FloatingPointError("Jacobian has non-finite entries")
    return JacobianMatrixRep(J, problem.basis, lam)


def hessian_tensor(problem: MomentProblem, lam, executor=None) -> np.ndarray:
    """``T[j, k, l] = <E_j, d2h(Lambda)[E_k, E_l]>``, shape ``(M, M, M)``.

    Entries are evaluated in lexicographic ``(k, l)`` order; an optional
    ``concurrent.futures`` executor spreads them over workers.
    """
    pw = _pointwise(problem, lam)
    M = problem.basis.size
    Rh = ctranspose(pw.R)
    Y = [np.linalg.solve(pw.Q, problem.adjoint_basis[k] @ pw.R) for k in range(M)]

    def entry(kl):
        k, l = kl
        F = Rh @ problem.adjoint_basis[l] @ Y[k]
        return problem.basis.coords(problem.integrate(F + ctranspose(F)))

    pairs = [(k, l) for k in range(M) for l in range(M)]
    results = list(executor.map(entry, pairs)) if executor else [entry(kl) for kl in pairs]
    out = np.empty((M, M, M))
    for (k, l), v in zip(pairs, results):
        out[:, k, l] = v
    return out


def tau_map(problem: MomentProblem, C: np.ndarray, cond_max: float = TAU_COND_MAX) -> np.ndarray:
    """``tau(C) = int G (CG)^{-1} Psi (CG)^{-*} G^*``."""
    C = np.asarray(C)
    if C.shape != (problem.filt.m, problem.filt.n):
        raise ValueError(f"C must be {problem.filt.m}x{problem.filt.n}, got {C.shape}")
    V = C @ problem.G
    cond = np.linalg.cond(V)
    bad = ~np.isfinite(cond) | (cond > cond_max)
    if np.any(bad):
        k = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
        raise SingularFactorError(problem.grid.angles[k], cond[k])
    # Psi = W W^*, so the integrand is G X X^* G^* with X = (CG)^{-1} W
    X = np.linalg.solve(V, problem.W)
    GX = problem.G @ X
    return problem.integrate(GX @ ctranspose(GX))


def tau_jacobian_fd(problem: MomentProblem, C: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of ``tau`` in basis coordinates.

    Shape ``(M, m*n)``; columns follow the row-major entries of ``C``.
    """
    C = np.asarray(C, dtype=float)
    cols = []
    for idx in np.ndindex(C.shape):
        E = np.zeros_like(C)
        E[idx] = eps
        diff = tau_map(problem, C + E) - tau_map(problem, C - E)
        cols.append(problem.basis.coords(diff) / (2 * eps))
    return np.column_stack(cols)
