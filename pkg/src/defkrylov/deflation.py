"""Deflation projectors P1, P2, the coarse matrix E and the coarse solution.

P1 = I - A_p Z E^-1 Z^T and P2 = I - Z E^-1 Z^T A_p are never formed
explicitly; applications cost d inner products, a d x d solve and d axpys.
The operator A_p defaults to A itself (not A M^-1), which keeps the projector
applications cheap under right preconditioning.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .krylov import Preconditioner
from .sparse import LUFactors, SparseMatrix, dense_lu, lu_solve, spmv


@dataclass(frozen=True)
class DeflationBasis:
    """n x d deflation vectors; linear independence is checked when E is factorized."""

    Z: np.ndarray

    def __post_init__(self):
        Z = np.ascontiguousarray(np.asarray(self.Z, dtype=np.float64))
        if Z.ndim != 2 or Z.shape[1] < 1:
            raise ValueError("Z must be n x d with d >= 1")
        object.__setattr__(self, "Z", Z)

    @property
    def n(self) -> int:
        return self.Z.shape[0]

    @property
    def d(self) -> int:
        return self.Z.shape[1]


@dataclass(frozen=True)
class DeflationContext:
    """Frozen projector state: basis, cached A_p Z, factorized E, coarse solution."""

    basis: DeflationBasis
    AZ: np.ndarray
    E_lu: LUFactors
    x_star: np.ndarray
    A_p_choice: str
    A: SparseMatrix
    M: Preconditioner

    @cached_property
    def _ZT(self) -> np.ndarray:
        return self.basis.Z.T.copy()

    def _apply_ap(self, v: np.ndarray) -> np.ndarray:
        if self.A_p_choice == "AM":
            return spmv(self.A, self.M.apply(v))
        return spmv(self.A, v)

    def apply_p1(self, v: np.ndarray) -> np.ndarray:
        return v - self.AZ @ lu_solve(self.E_lu, self._ZT @ v)

    def apply_p2(self, v: np.ndarray) -> np.ndarray:
        return v - self.basis.Z @ lu_solve(self.E_lu, self._ZT @ self._apply_ap(v))

    def reconstruct(self, x_hat: np.ndarray) -> np.ndarray:
        return self.x_star + self.apply_p2(x_hat)


def build_context(A: SparseMatrix, M: Preconditioner, Z: DeflationBasis,
                  b: np.ndarray, A_p_choice: str = "A") -> DeflationContext:
    """Factorize E = Z^T A_p Z and precompute x* = Z E^-1 Z^T b.

    Raises SingularCoarseMatrix when the deflation vectors are dependent.
    """
    if A_p_choice not in ("A", "AM"):
        raise ValueError("A_p_choice must be 'A' or 'AM'")
    if Z.n != A.n:
        raise ValueError("deflation basis does not match the matrix dimension")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (A.n,):
        raise ValueError("right-hand side has wrong length")
    W = Z.Z if A_p_choice == "A" else np.column_stack([M.apply(c) for c in Z.Z.T])
    AZ = np.column_stack([spmv(A, c) for c in W.T])
    E = Z.Z.T @ AZ
    E_lu = dense_lu(E)
    x_star = Z.Z @ lu_solve(E_lu, Z.Z.T @ b)
    return DeflationContext(Z, AZ, E_lu, x_star, A_p_choice, A, M)


def apply_p1(ctx: DeflationContext | None, v: np.ndarray) -> np.ndarray:
    """P1 v; a missing context is the identity (no deflation)."""
    return v if ctx is None else ctx.apply_p1(v)


def apply_p2(ctx: DeflationContext | None, v: np.ndarray) -> np.ndarray:
    """P2 v; a missing context is the identity."""
    return v if ctx is None else ctx.apply_p2(v)


def reconstruct(ctx: DeflationContext | None, x_hat: np.ndarray) -> np.ndarray:
    """Map a deflated-system solution back: x = x* + P2 x^."""
    return x_hat if ctx is None else ctx.reconstruct(x_hat)
