"""Minimal numerical kernel: CSR sparse matrices, dense LU and eigensolves.

Dense matrices are plain numpy arrays; the heavy lifting (LU, eigensolve,
CSR matvec) is delegated to LAPACK/scipy behind the small contracts below.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import EigNonConvergence, SingularCoarseMatrix

_PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class SparseMatrix:
    """Square real matrix in compressed-row storage.

    Within each row column indices are strictly increasing; only square
    matrices are supported.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ro = np.asarray(self.row_offsets, dtype=np.int64)
        ci = np.asarray(self.col_indices, dtype=np.int64)
        va = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "row_offsets", ro)
        object.__setattr__(self, "col_indices", ci)
        object.__setattr__(self, "values", va)
        if ro.shape != (self.n + 1,):
            raise ValueError("row_offsets must have length n+1")
        if ro[0] != 0 or ro[-1] != len(va) or np.any(np.diff(ro) < 0):
            raise ValueError("row_offsets must be nondecreasing from 0 to nnz")
        if len(ci) != len(va):
            raise ValueError("col_indices and values must have equal length")
        if len(ci) and (ci.min() < 0 or ci.max() >= self.n):
            raise ValueError("column index out of range")
        for i in range(self.n):
            cols = ci[ro[i]:ro[i + 1]]
            if len(cols) > 1 and np.any(np.diff(cols) <= 0):
                raise ValueError(f"row {i}: column indices not strictly increasing")

    @classmethod
    def from_coo(cls, n: int, rows, cols, vals) -> "SparseMatrix":
        """Build from triplets; duplicate entries are summed."""
        m = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        m.sum_duplicates()
        m.sort_indices()
        return cls(n, m.indptr, m.indices, m.data)

    @classmethod
    def from_dense(cls, M) -> "SparseMatrix":
        M = np.asarray(M, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("matrix must be square")
        m = scipy.sparse.csr_matrix(M)
        m.sort_indices()
        return cls(M.shape[0], m.indptr, m.indices, m.data)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, np.arange(n + 1), np.arange(n), np.ones(n))

    @cached_property
    def _csr(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.values, self.col_indices, self.row_offsets), shape=(self.n, self.n)
        )

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    @property
    def nnz(self) -> int:
        return len(self.values)

    def scale_rows(self, s: np.ndarray) -> "SparseMatrix":
        """Return diag(s) @ self without densifying."""
        s = np.asarray(s, dtype=np.float64)
        if s.shape != (self.n,):
            raise ValueError("scale vector has wrong length")
        row_of = np.repeat(np.arange(self.n), np.diff(self.row_offsets))
        return SparseMatrix(self.n, self.row_offsets, self.col_indices,
                            self.values * s[row_of])


def spmv(A: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """y = A @ x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise ValueError(f"dimension mismatch: matrix is {A.n}, vector is {x.shape}")
    return A._csr @ x


@dataclass(frozen=True)
class LUFactors:
    """Combined LU storage with pivot permutation (LAPACK getrf layout)."""

    lu: np.ndarray
    piv: np.ndarray
    n: int = field(init=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "n", self.lu.shape[0])


def dense_lu(M: np.ndarray) -> LUFactors:
    """PA = LU with partial pivoting.

    Raises SingularCoarseMatrix on an exactly singular pivot.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if M.size == 0:
        return LUFactors(M.reshape(0, 0), np.zeros(0, dtype=np.int32))
    with warnings.catch_warnings():
        # an exact zero pivot is reported below as SingularCoarseMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(M, check_finite=True)
    if np.min(np.abs(np.diag(lu))) < _PIVOT_FLOOR:
        raise SingularCoarseMatrix("zero pivot in LU factorization")
    return LUFactors(lu, piv)


def lu_solve(f: LUFactors, b: np.ndarray) -> np.ndarray:
    """Solve M x = b given the factors of M. Accepts vectors or stacked RHS."""
    b = np.asarray(b, dtype=np.float64)
    if f.n == 0:
        return np.zeros_like(b)
    return scipy.linalg.lu_solve((f.lu, f.piv), b, check_finite=False)


def dense_eig(M: np.ndarray, vectors: bool = False):
    """Eigenvalues (and optionally right eigenvectors) of a square matrix.

    Returns the raw LAPACK ordering; callers sort as needed.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    try:
        if vectors:
            w, V = np.linalg.eig(M)
            return w, V
        return np.linalg.eig(M).eigenvalues
    except np.linalg.LinAlgError as e:  # QR iteration sweep limit
        raise EigNonConvergence(str(e)) from e
