"""Determinantal roots of ``z C G(z)`` for the block shift filter.

With ``C = [C_0, ..., C_p]`` split into ``m x m`` blocks, ``z C G(z)`` is a
matrix polynomial in ``w = 1/z`` and

    P(z) = z^{mp} det(z C G(z)) = det(C_0 + z C_1 + ... + z^p C_p)

is an ordinary polynomial of degree at most ``mp``.  Its coefficients are
recovered by evaluating the determinant at roots of unity and inverting the
DFT; the roots are eigenvalues of the companion matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFactorError
from .filters import RationalFilter, eval_filter, shift_filter

SCHUR_MARGIN = 1e-9
PRUNE_TOL = 1e-12


@dataclass
class RootReport:
    roots: np.ndarray
    moduli: np.ndarray
    schur: bool
    on_circle: bool
    coefficients: np.ndarray
    infinite_roots: int = 0
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "roots": [[float(r.real), float(r.imag)] for r in self.roots],
            "moduli": [float(x) for x in self.moduli],
            "schur": bool(self.schur),
            "on_circle": bool(self.on_circle),
            "infinite_roots": int(self.infinite_roots),
            "notes": list(self.notes),
        }


def companion(coeffs: np.ndarray) -> np.ndarray:
    """Companion matrix of ``sum_k a_k z^k`` (ascending coefficients, ``a_d != 0``)."""
    coeffs = np.asarray(coeffs)
    d = len(coeffs) - 1
    if d < 1:
        return np.zeros((0, 0), dtype=coeffs.dtype)
    out = np.zeros((d, d), dtype=np.result_type(coeffs, float))
    out[0, :] = -coeffs[-2::-1] / coeffs[-1]
    out[1:, :-1] += np.eye(d - 1)
    return out


def _split_shift(filt: RationalFilter) -> tuple[int, int]:
    m, n = filt.m, filt.n
    if n % m:
        raise ValueError("filter is not of the block shift family")
    p = n // m - 1
    ref = shift_filter(m, p)
    if not (np.allclose(filt.A, ref.A) and np.allclose(filt.B, ref.B)):
        raise ValueError("determinantal roots are implemented for the block shift filter only")
    return m, p


def factor_polynomial(C: np.ndarray, filt: RationalFilter, nodes: int | None = None,
                      phase: float = 0.0) -> np.ndarray:
    """Ascending coefficients of ``P(z) = z^{mp} det(z C G(z))``.

    ``det(z C G(z))`` is sampled through the filter at the rotated roots of
    unity ``exp(i (phase + 2 pi k / nodes))`` (default ``nodes = mp + 1``),
    so the interpolation only assumes the polynomial structure of the shift
    family, not a symbolic expansion.
    """
    m, p = _split_shift(filt)
    C = np.asarray(C)
    if C.shape != (m, filt.n):
        raise ValueError(f"C must be {m}x{filt.n}, got {C.shape}")
    degree = m * p
    nodes = degree + 1 if nodes is None else nodes
    if nodes < degree + 1:
        raise ValueError(f"need at least {degree + 1} nodes, got {nodes}")
    j = np.arange(nodes)
    w = np.exp(1j * (phase + 2 * np.pi * j / nodes))
    # q(w) = det(z C G(z)) at z = 1/w, a polynomial of degree <= mp in w
    q = np.array([np.linalg.det((1 / wk) * C @ eval_filter(filt, 1 / wk)) for wk in w])
    c = (np.fft.fft(q) / nodes * np.exp(-1j * phase * j))[:degree + 1]
    # P(z) = z^{mp} q(1/z) has the reversed coefficient list
    return c[::-1]


def determinantal_roots(C: np.ndarray, filt: RationalFilter | None = None,
                        margin: float = SCHUR_MARGIN, *, m: int | None = None,
                        p: int | None = None) -> RootReport:
    """Roots of ``det(z C G(z))`` in the z-plane and the Schur test.

    Pass either ``filt`` or the block sizes ``m, p`` of the shift filter.
    """
    if filt is None:
        if m is None or p is None:
            raise ValueError("pass a filter or both m and p")
        filt = shift_filter(m, p)
    C = np.asarray(C, dtype=float)
    if not np.any(C):
        raise DegenerateFactorError("C is zero")
    coeffs = factor_polynomial(C, filt)
    if np.isrealobj(C):
        coeffs = coeffs.real
    scale = np.max(np.abs(coeffs))
    ref = np.linalg.norm(C, 2) ** filt.m
    if scale <= PRUNE_TOL * ref:
        raise DegenerateFactorError("det(z C G(z)) vanishes identically")

    notes = []
    small = np.abs(coeffs) <= PRUNE_TOL * scale
    coeffs = np.where(small, 0.0, coeffs)
    nonzero = np.flatnonzero(coeffs)
    top, bottom = nonzero[-1], nonzero[0]
    infinite = len(coeffs) - 1 - top
    if infinite:
        notes.append(f"{infinite} root(s) at z = infinity dropped")
    trimmed = coeffs[bottom:top + 1]
    finite = np.linalg.eigvals(companion(trimmed)) if len(trimmed) > 1 else np.zeros(0)
    roots = np.concatenate([np.zeros(bottom, dtype=complex), finite.astype(complex)])
    if np.isrealobj(coeffs):
        roots = np.where(np.abs(roots.imag) <= 1e-12 * np.maximum(1.0, np.abs(roots)),
                         roots.real + 0j, roots)
    order = np.lexsort((roots.imag, -roots.real))
    roots = roots[order]
    moduli = np.abs(roots)
    on_circle = bool(np.any(np.abs(moduli - 1.0) <= margin))
    schur = bool(np.all(moduli < 1.0 - margin)) and infinite == 0
    return RootReport(roots, moduli, schur, on_circle, coeffs, infinite, notes)
