"""Restarted GMRES(m) with right preconditioning and full Arnoldi capture.

The cycle engine keeps a pristine copy of the upper-Hessenberg matrix next to
the Givens-rotated triangular factor, so harmonic Ritz extraction can work on
untouched data after a cycle completes. An optional deflation context turns
the operator into P1*A*M^-1 and reconstructs the solution on exit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .sparse import SparseMatrix, spmv

_REORTH_TOL = 1e-8
_BREAKDOWN_TOL = 1e-13


@dataclass(frozen=True)
class Preconditioner:
    """Right preconditioner: identity or Jacobi (inverse diagonal)."""

    kind: str
    inv_diag: np.ndarray | None = None

    @classmethod
    def identity(cls) -> "Preconditioner":
        return cls("identity")

    @classmethod
    def jacobi(cls, A: SparseMatrix) -> "Preconditioner":
        d = A.diagonal()
        if np.any(d == 0):
            raise ValueError("Jacobi preconditioner requires a nonzero diagonal")
        return cls("jacobi", 1.0 / d)

    def apply(self, v: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return v
        return v * self.inv_diag


def jacobi_apply(M: Preconditioner, v: np.ndarray) -> np.ndarray:
    """Componentwise v_i / a_ii (identity passes v through)."""
    return M.apply(np.asarray(v, dtype=np.float64))


@dataclass
class ArnoldiData:
    """Basis and Hessenberg data of one (possibly partial) GMRES cycle.

    V has m+1 rows (basis vectors); Hbar is the pristine (m+1) x m
    upper-Hessenberg matrix satisfying A_op V[:m].T = V.T Hbar for the
    cycle operator A_op.
    """

    V: np.ndarray
    Hbar: np.ndarray
    m: int


@dataclass
class SolveReport:
    x: np.ndarray
    converged: bool
    iterations: int
    restarts: int
    residual_history: np.ndarray       # length iterations+1
    final_relres: float                # true ||b-Ax|| / ||b-Ax0||
    restart_of: np.ndarray             # cycle index per history entry
    deflated_flags: np.ndarray         # deflation active per history entry
    ritz_trace: list = field(default_factory=list)       # per cycle: full Ritz set
    ritz_iter_trace: list = field(default_factory=list)  # per cycle: smallest Ritz per iter
    arnoldi: ArnoldiData | None = None
    warning: str | None = None
    deflated_from_cycle: int | None = None


def ritz_values(data: ArnoldiData) -> np.ndarray:
    """Eigenvalues of H_m (square part of Hbar), sorted by magnitude."""
    if data.m < 1:
        raise ValueError("empty Arnoldi data")
    w = np.linalg.eigvals(data.Hbar[:data.m, :data.m])
    return w[np.argsort(np.abs(w))]


def _givens_update(Rcol, cs, sn, g, j):
    """Apply stored rotations to a new column, then generate rotation j."""
    for i in range(j):
        t = cs[i] * Rcol[i] + sn[i] * Rcol[i + 1]
        Rcol[i + 1] = -sn[i] * Rcol[i] + cs[i] * Rcol[i + 1]
        Rcol[i] = t
    denom = np.hypot(Rcol[j], Rcol[j + 1])
    if denom == 0.0:
        cs[j], sn[j] = 1.0, 0.0
    else:
        cs[j], sn[j] = Rcol[j] / denom, Rcol[j + 1] / denom
    Rcol[j] = denom
    Rcol[j + 1] = 0.0
    g[j + 1] = -sn[j] * g[j]
    g[j] = cs[j] * g[j]


def _run_cycles(A: SparseMatrix, b: np.ndarray, x0: np.ndarray,
                M: Preconditioner, m: int, tol: float, max_iters: int,
                min_iters: int, ctx, ctx_hook: Optional[Callable],
                capture_ritz: bool) -> SolveReport:
    n = A.n
    x = x0.copy()
    history = []
    restart_of = []
    deflated = []
    ritz_cycles = []
    ritz_iter = []
    iterations = 0
    cycle = 0
    converged = False
    warning = None
    deflated_from = 0 if ctx is not None else None
    denom = None
    last_data = None
    prev_beta = None

    while iterations < max_iters and not converged:
        r = b - spmv(A, x)
        if ctx is not None:
            r = ctx.apply_p1(r)
        beta = float(np.linalg.norm(r))
        if denom is None:
            denom = beta if beta > 0 else 1.0
            history.append(beta)
            restart_of.append(0)
            deflated.append(ctx is not None)
        if beta == 0.0 or (beta <= tol * denom and iterations >= min_iters):
            converged = True
            break
        if prev_beta is not None and beta >= prev_beta * (1.0 - 1e-14) and warning == "breakdown":
            break  # breakdown with no progress: stop instead of spinning
        prev_beta = beta

        V = np.zeros((m + 1, n))
        V[0] = r / beta
        Hbar = np.zeros((m + 1, m))
        Rtri = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        ritz_iter_this = []
        cols = 0
        broke = False

        for j in range(m):
            if iterations >= max_iters:
                break
            w = spmv(A, M.apply(V[j]))
            if ctx is not None:
                w = ctx.apply_p1(w)
            wnorm0 = float(np.linalg.norm(w))
            for i in range(j + 1):
                h = float(V[i] @ w)
                Hbar[i, j] = h
                w -= h * V[i]
            corr = V[:j + 1] @ w
            if np.max(np.abs(corr), initial=0.0) > _REORTH_TOL * max(wnorm0, 1e-300):
                w -= V[:j + 1].T @ corr
                Hbar[:j + 1, j] += corr
            hj1 = float(np.linalg.norm(w))
            Hbar[j + 1, j] = hj1

            Rcol = Hbar[:j + 2, j].copy()
            col = np.zeros(m + 1)
            col[:j + 2] = Rcol
            _givens_update(col, cs, sn, g, j)
            Rtri[:, j] = col[:m + 1]
            cols = j + 1
            resnorm = abs(g[j + 1])
            iterations += 1
            history.append(resnorm)
            restart_of.append(cycle)
            deflated.append(ctx is not None)
            if capture_ritz:
                th = np.linalg.eigvals(Hbar[:j + 1, :j + 1])
                ritz_iter_this.append(th[np.argmin(np.abs(th))])

            if resnorm <= tol * denom and iterations >= min_iters:
                converged = True
                broke = True
            elif hj1 <= _BREAKDOWN_TOL * max(1.0, float(np.linalg.norm(Hbar[:j + 2, j]))):
                warning = "breakdown"
                broke = True
            if broke:
                break
            V[j + 1] = w / hj1

        if cols == 0:
            break
        # drop a dependent trailing column before the triangular solve
        while cols > 1 and abs(Rtri[cols - 1, cols - 1]) < 1e-14 * abs(Rtri[0, 0]):
            cols -= 1
        y = scipy.linalg.solve_triangular(Rtri[:cols, :cols], g[:cols],
                                          check_finite=False)
        x = x + M.apply(V[:cols].T @ y)
        last_data = ArnoldiData(V[:cols + 1].copy(), Hbar[:cols + 1, :cols].copy(), cols)
        if capture_ritz:
            th = np.linalg.eigvals(Hbar[:cols, :cols])
            ritz_cycles.append(th[np.argsort(np.abs(th))])
            ritz_iter.append(ritz_iter_this)
        cycle += 1
        if ctx_hook is not None and not converged:
            ctx, hook_warning, engaged = ctx_hook(cycle, last_data, ctx)
            if hook_warning:
                warning = hook_warning
            if engaged:
                deflated_from = cycle

    if ctx is not None:
        x = ctx.reconstruct(x)
    r_true = b - spmv(A, x)
    r0_true = b - spmv(A, x0)
    nrm0 = float(np.linalg.norm(r0_true))
    final_relres = float(np.linalg.norm(r_true)) / (nrm0 if nrm0 > 0 else 1.0)
    return SolveReport(
        x=x, converged=converged, iterations=iterations,
        restarts=max(cycle - 1, 0),
        residual_history=np.array(history),
        final_relres=final_relres,
        restart_of=np.array(restart_of, dtype=np.int64),
        deflated_flags=np.array(deflated, dtype=bool),
        ritz_trace=ritz_cycles, ritz_iter_trace=ritz_iter,
        arnoldi=last_data, warning=warning,
        deflated_from_cycle=deflated_from,
    )


def gmres(A: SparseMatrix, b: np.ndarray, x0: np.ndarray | None = None,
          M: Preconditioner | None = None, m: int = 30, tol: float = 1e-6,
          max_iters: int = 300, min_iters: int = 0, deflation=None,
          capture_ritz: bool = False) -> SolveReport:
    """Restarted right-preconditioned GMRES(m).

    With `deflation` set, solves the deflated system P1 A x^ = P1 b and
    returns the reconstructed solution P2 x^ + x*. Convergence is measured as
    the relative (deflated, preconditioned-system) residual against the
    initial one; hitting max_iters is reported as converged=False, not an
    error.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (A.n,):
        raise ValueError("right-hand side has wrong length")
    if x0 is None:
        x0 = np.zeros(A.n)
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (A.n,):
        raise ValueError("initial guess has wrong length")
    if M is None:
        M = Preconditioner.identity()
    if m < 1:
        raise ValueError("cycle size must be >= 1")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return _run_cycles(A, b, x0, M, m, tol, max_iters, min_iters,
                       deflation, None, capture_ritz)
