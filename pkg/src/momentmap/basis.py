"""Orthonormal coordinates on the range of Gamma for the block shift filter.

For the covariance-extension filter the range of Gamma is the space of real
symmetric block-Toeplitz matrices whose ``(i, j)`` block is ``L_{i-j}`` below
the diagonal and ``L_{j-i}^T`` above it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularFactorError
from .filters import FrequencyGrid, RationalFilter, ctranspose, sample_filter
from .polyroots import determinantal_roots


def block_toeplitz(blocks: list[np.ndarray] | np.ndarray) -> np.ndarray:
    """Assemble the symmetric block-Toeplitz matrix with lag blocks ``L_0..L_p``.

    ``L_0`` must be symmetric; ``L_k`` sits on the ``k``-th block sub-diagonal.
    """
    blocks = [np.asarray(b, dtype=float) for b in blocks]
    m = blocks[0].shape[0]
    size = len(blocks)
    out = np.zeros((m * size, m * size))
    for i in range(size):
        for j in range(size):
            blk = blocks[i - j] if i >= j else blocks[j - i].T
            out[i * m:(i + 1) * m, j * m:(j + 1) * m] = blk
    return out


def toeplitz_blocks(X: np.ndarray, m: int) -> list[np.ndarray]:
    """Lag blocks ``[L_0, ..., L_p]`` read off the first block column of ``X``."""
    X = np.asarray(X)
    size = X.shape[0] // m
    return [X[k * m:(k + 1) * m, 0:m].copy() for k in range(size)]


@dataclass(frozen=True, eq=False)
class HermitianBasis:
    """Ordered orthonormal basis of the real symmetric block-Toeplitz matrices.

    Ordering: lag 1, ..., lag p generators ``e_ij`` (row-major) first, then
    the lag-0 generators ``e_ii`` and ``e_ij + e_ji`` (upper triangle,
    row-major). Every element is scaled to unit Frobenius norm.
    """

    elements: np.ndarray
    m: int
    p: int
    labels: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return self.m * (self.p + 1)

    @property
    def size(self) -> int:
        return self.elements.shape[0]

    def __len__(self) -> int:
        return self.size

    def gram(self) -> np.ndarray:
        return np.einsum("aij,bji->ab", self.elements, self.elements)

    def coords(self, X: np.ndarray) -> np.ndarray:
        """Trace inner products ``<E_k, X>`` for each basis element (real part)."""
        X = np.asarray(X)
        return np.real(np.einsum("kij,...ji->...k", self.elements, X))

    def matrix(self, coords: np.ndarray) -> np.ndarray:
        return np.einsum("...k,kij->...ij", np.asarray(coords, dtype=float), self.elements)


def build_basis(m: int, p: int) -> HermitianBasis:
    if m < 1 or p < 1:
        raise ValueError(f"need m >= 1 and p >= 1, got m={m}, p={p}")
    zero = np.zeros((m, m))
    elements, labels = [], []
    for lag in range(1, p + 1):
        for i in range(m):
            for j in range(m):
                blocks = [zero] * (p + 1)
                gen = np.zeros((m, m))
                gen[i, j] = 1.0
                blocks[lag] = gen
                elements.append(block_toeplitz(blocks))
                labels.append(f"L{lag}[{i},{j}]")
    for i in range(m):
        for j in range(i, m):
            gen = np.zeros((m, m))
            gen[i, j] = gen[j, i] = 1.0
            elements.append(block_toeplitz([gen] + [zero] * p))
            labels.append(f"L0[{i},{i}]" if i == j else f"L0[{i},{j}]+L0[{j},{i}]")
    elements = np.array([E / np.linalg.norm(E) for E in elements])
    return HermitianBasis(elements, m, p, tuple(labels))


@dataclass(frozen=True, eq=False)
class LambdaParam:
    """A point of the range of Gamma, held both as a matrix and as coordinates."""

    matrix: np.ndarray
    coords: np.ndarray

    @classmethod
    def from_coords(cls, coords, basis: HermitianBasis) -> "LambdaParam":
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (basis.size,):
            raise ValueError(f"expected {basis.size} coordinates, got shape {coords.shape}")
        return cls(basis.matrix(coords), coords.copy())

    def blocks(self, m: int) -> list[np.ndarray]:
        return toeplitz_blocks(self.matrix, m)

    def __add__(self, other: "LambdaParam") -> "LambdaParam":
        return LambdaParam(self.matrix + other.matrix, self.coords + other.coords)

    def __sub__(self, other: "LambdaParam") -> "LambdaParam":
        return LambdaParam(self.matrix - other.matrix, self.coords - other.coords)

    def __mul__(self, alpha: float) -> "LambdaParam":
        return LambdaParam(alpha * self.matrix, alpha * self.coords)

    __rmul__ = __mul__


def project(X: np.ndarray, basis: HermitianBasis) -> LambdaParam:
    """Orthogonal projection of a symmetric matrix onto the span of ``basis``."""
    X = np.asarray(X)
    if X.shape != (basis.n, basis.n):
        raise ValueError(f"X must be {basis.n}x{basis.n}, got {X.shape}")
    return LambdaParam.from_coords(basis.coords(X), basis)


def lambda_from_factor(C: np.ndarray, basis: HermitianBasis, check_roots: bool = True) -> LambdaParam:
    """Parameter ``Lambda`` with ``G^* Lambda G = (CG)^*(CG)``.

    The factor is first checked to have no determinantal roots on the unit
    circle (``check_roots=False`` skips this).
    """
    C = np.asarray(C, dtype=float)
    if C.shape != (basis.m, basis.n):
        raise ValueError(f"C must be {basis.m}x{basis.n}, got {C.shape}")
    if check_roots:
        report = determinantal_roots(C, m=basis.m, p=basis.p)
        if report.on_circle:
            z = report.roots[np.argmin(np.abs(report.moduli - 1.0))]
            raise SingularFactorError(float(np.angle(z)), np.inf)
    return project(C.T @ C, basis)


def feasibility_check(filt: RationalFilter, lam: LambdaParam | np.ndarray,
                      grid: FrequencyGrid, G: np.ndarray | None = None) -> float:
    """Smallest eigenvalue of ``G^* Lambda G`` over the grid.

    ``Lambda`` lies in ``L_+`` exactly when the returned value is positive.
    """
    L = lam.matrix if isinstance(lam, LambdaParam) else np.asarray(lam)
    if G is None:
        G = sample_filter(filt, grid)
    Q = ctranspose(G) @ L @ G
    return float(np.min(np.linalg.eigvalsh(Q)))
