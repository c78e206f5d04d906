"""Lyapunov-Schmidt reduction at a critical point of the moment map.

Along a segment ``Lambda(t)`` the augmented map ``H(Lambda, t) = h(Lambda) - p(t)``
with ``p(t) = h(Lambda(t))`` vanishes identically.  At a critical point its
``M x (M+1)`` Jacobian has rank ``M - 1``; the SVD splits off a two-dimensional
kernel ``V2`` and a one-dimensional cokernel ``u_M``, and the sign pattern of
the reduced Hessian ``V2^T [sum_j u_jM Hess H_j] V2`` decides whether the
point is a simple bifurcation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .critical import RANK_THRESHOLD, CriticalPointRecord, SegmentPath, numerical_rank
from .errors import NotSimpleCriticalPointError
from .maps import MomentProblem, as_matrix, d2h_apply, dh_apply, hessian_tensor, jacobian_matrix

DEGENERACY_TOL = 1e-10

SIMPLE_BIFURCATION = "simple-bifurcation"
ISOLATED_ZERO = "isolated-zero"
DEGENERATE = "degenerate"


@dataclass
class LSDecomposition:
    U1: np.ndarray
    U2: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    sigma: np.ndarray
    singular_values: np.ndarray

    @property
    def u_M(self) -> np.ndarray:
        return self.U2[:, 0]

    def reconstruct(self) -> np.ndarray:
        return self.U1 @ np.diag(self.sigma) @ self.V1.T


@dataclass
class BifurcationReport:
    critical: CriticalPointRecord
    decomposition: LSDecomposition
    augmented_jacobian: np.ndarray
    hessian_b: np.ndarray
    eigenvalues: np.ndarray
    classification: str

    @property
    def kernel_dimension(self) -> int:
        return self.decomposition.V2.shape[1]


def augmented_jacobian(lam, t: float, path: SegmentPath, problem: MomentProblem) -> np.ndarray:
    """``[J_h(Lambda) | -coords(dp/dt)]`` with ``dp/dt = dh(Lambda(t))[Lambda1 - Lambda0]``."""
    J = jacobian_matrix(problem, lam).entries
    pdot = dh_apply(problem, path.at(t), path.direction)
    return np.column_stack([J, -problem.basis.coords(pdot)])


def ls_decompose(J_aug: np.ndarray, rank_threshold: float = RANK_THRESHOLD) -> LSDecomposition:
    J_aug = np.asarray(J_aug, dtype=float)
    M = J_aug.shape[0]
    if J_aug.shape != (M, M + 1):
        raise ValueError(f"expected an M x (M+1) matrix, got {J_aug.shape}")
    U, s, Vt = np.linalg.svd(J_aug, full_matrices=True)
    rank = numerical_rank(s, rank_threshold)
    if rank != M - 1:
        raise NotSimpleCriticalPointError(rank, M - 1)
    return LSDecomposition(
        U1=U[:, :M - 1],
        U2=U[:, M - 1:],
        V1=Vt[:M - 1].T,
        V2=Vt[M - 1:].T,
        sigma=s[:M - 1],
        singular_values=s,
    )


def second_derivative_array(lam, t: float, path: SegmentPath, problem: MomentProblem,
                            executor=None) -> np.ndarray:
    """Second partials of the coordinates ``H_j``, shape ``(M, M+1, M+1)``.

    The ``(Lambda, t)`` mixed partials vanish since ``h(Lambda)`` does not
    depend on ``t`` and ``p(t)`` does not depend on ``Lambda``.
    """
    M = problem.basis.size
    out = np.zeros((M, M + 1, M + 1))
    out[:, :M, :M] = hessian_tensor(problem, lam, executor)
    direction = as_matrix(path.direction)
    pddot = d2h_apply(problem, path.at(t), direction, direction)
    out[:, M, M] = -problem.basis.coords(pddot)
    return out


def bifurcation_hessian(critical: CriticalPointRecord, path: SegmentPath,
                        decomposition: LSDecomposition, problem: MomentProblem,
                        executor=None) -> tuple[np.ndarray, np.ndarray]:
    """Reduced ``2 x 2`` Hessian of the bifurcation equation and its eigenvalues."""
    array = second_derivative_array(critical.lambda_c, critical.t_c, path, problem, executor)
    contracted = np.einsum("j,jkl->kl", decomposition.u_M, array)
    V2 = decomposition.V2
    hess = V2.T @ contracted @ V2
    return hess, np.linalg.eigvalsh(0.5 * (hess + hess.T))


def classify(eigenvalues, tol: float = DEGENERACY_TOL) -> str:
    eig = np.asarray(eigenvalues, dtype=float)
    scale = np.max(np.abs(eig))
    if scale == 0 or np.min(np.abs(eig)) < tol * scale:
        return DEGENERATE
    if np.min(eig) < 0 < np.max(eig):
        return SIMPLE_BIFURCATION
    return ISOLATED_ZERO


def analyze_critical_point(critical: CriticalPointRecord, path: SegmentPath,
                           problem: MomentProblem, rank_threshold: float = RANK_THRESHOLD,
                           executor=None) -> BifurcationReport:
    """Run the reduction at ``critical``; raises if the point is not a simple critical point."""
    J_aug = augmented_jacobian(critical.lambda_c, critical.t_c, path, problem)
    dec = ls_decompose(J_aug, rank_threshold)
    hess, eig = bifurcation_hessian(critical, path, dec, problem, executor)
    return BifurcationReport(critical, dec, J_aug, hess, eig, classify(eig))
