"""Harmonic Ritz extraction and restarted deflated GMRES (RDGMRES).

Harmonic Ritz pairs satisfy the Petrov-Galerkin condition
(A V_m)^T (A z - theta z) = 0 with z = V_m y. Two equivalent small
eigenproblems deliver them; the QR-based route is the production path, the
Hessenberg-correction route serves as a cross-check oracle. Complex-conjugate
pairs are transformed to real Schur-vector pairs before entering the
deflation basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .deflation import DeflationBasis, DeflationContext, build_context
from .errors import HarmonicRitzFailure, SingularCoarseMatrix
from .krylov import ArnoldiData, Preconditioner, SolveReport, _run_cycles
from .sparse import SparseMatrix

_COND_LIMIT = 1e12
_PAIR_TOL = 1e-10


@dataclass
class HarmonicRitzSet:
    """Selected harmonic Ritz data, realified for use as deflation vectors.

    thetas keeps the original (possibly complex) values; Y and Zvecs are the
    real coefficient block and the lifted vectors z_k = V_m y_k.
    """

    thetas: np.ndarray
    Y: np.ndarray
    Zvecs: np.ndarray


def realify(thetas, vectors) -> np.ndarray:
    """Replace each complex-conjugate eigenvector pair by (Re u, -Im u).

    `vectors` holds eigenvectors as columns, ordered like `thetas`. Real
    vectors pass through; a complex vector without a conjugate partner is an
    error. The output block is real with the same column count and span.
    """
    thetas = np.asarray(thetas, dtype=np.complex128)
    vectors = np.asarray(vectors, dtype=np.complex128)
    out = np.zeros(vectors.shape)
    scale = np.max(np.abs(thetas), initial=1.0)
    done = np.zeros(len(thetas), dtype=bool)
    j = 0
    for i, th in enumerate(thetas):
        if done[i]:
            continue
        if abs(th.imag) <= _PAIR_TOL * max(abs(th), 1.0):
            out[:, j] = vectors[:, i].real
            done[i] = True
            j += 1
            continue
        partner = None
        for k in range(len(thetas)):
            if k != i and not done[k] and abs(thetas[k] - np.conj(th)) <= _PAIR_TOL * scale:
                partner = k
                break
        if partner is None:
            raise ValueError(f"complex eigenvector {i} has no conjugate partner")
        out[:, j] = vectors[:, i].real
        out[:, j + 1] = -vectors[:, i].imag
        done[i] = done[partner] = True
        j += 2
    return out[:, :j]


def _select_smallest(thetas: np.ndarray, Y: np.ndarray, d: int):
    """Pick the d smallest-|theta| pairs, widening to keep conjugate pairs whole."""
    finite = np.isfinite(thetas)
    thetas, Y = thetas[finite], Y[:, finite]
    order = np.lexsort((np.abs(thetas.imag), thetas.real, np.abs(thetas)))
    thetas, Y = thetas[order], Y[:, order]
    take = min(d, len(thetas))
    scale = np.max(np.abs(thetas), initial=1.0)
    if take < len(thetas):
        last = thetas[take - 1]
        if abs(last.imag) > _PAIR_TOL * max(abs(last), 1.0) and \
                abs(thetas[take] - np.conj(last)) <= _PAIR_TOL * scale:
            take += 1
    return thetas[:take], Y[:, :take]


def _finish(data: ArnoldiData, thetas: np.ndarray, Y: np.ndarray, d: int) -> HarmonicRitzSet:
    thetas, Y = _select_smallest(thetas, Y, d)
    Yreal = realify(thetas, Y)
    Zvecs = data.V[:data.m].T @ Yreal
    return HarmonicRitzSet(thetas=thetas, Y=Yreal, Zvecs=Zvecs)


def harmonic_ritz_b(data: ArnoldiData, d: int) -> HarmonicRitzSet:
    """QR route: generalized problem R_m y = theta * floor(Q^T V_{m+1}^T V_m) y.

    floor(.) drops the last row. This is the production path; it only needs
    the QR data of the bordered Hessenberg matrix.
    """
    m = data.m
    if d > m:
        raise ValueError(f"requested d={d} exceeds cycle length m={m}")
    Q, R = np.linalg.qr(data.Hbar, mode="complete")
    Rm = R[:m, :m]
    if np.min(np.abs(np.diag(Rm))) < 1e-300:
        raise HarmonicRitzFailure("singular R factor in harmonic Ritz extraction")
    G = data.V @ data.V[:m].T          # V_{m+1}^T V_m (near [I; 0])
    B = (Q.T @ G)[:m, :]
    if np.linalg.cond(Rm) < _COND_LIMIT:
        C = scipy.linalg.solve_triangular(Rm, B, check_finite=False)
        mu, Y = np.linalg.eig(C)
        with np.errstate(divide="ignore"):
            thetas = np.where(mu != 0, 1.0 / mu, np.inf)
    else:
        thetas, Y = scipy.linalg.eig(Rm, B)
    return _finish(data, thetas, Y, d)


def harmonic_ritz_a(data: ArnoldiData, d: int) -> HarmonicRitzSet:
    """Correction route: eigenproblem (H_m + h^2 H_m^-T e_m e_m^T) y = theta y.

    Needs the pristine H_m; kept as the cross-check oracle for the QR route.
    """
    m = data.m
    if d > m:
        raise ValueError(f"requested d={d} exceeds cycle length m={m}")
    Hm = data.Hbar[:m, :m]
    h = data.Hbar[m, m - 1]
    em = np.zeros(m)
    em[m - 1] = 1.0
    try:
        f = np.linalg.solve(Hm.T, em)
    except np.linalg.LinAlgError as e:
        raise HarmonicRitzFailure(f"singular H_m: {e}") from e
    thetas, Y = np.linalg.eig(Hm + (h * h) * np.outer(f, em))
    return _finish(data, thetas, Y, d)


def rdgmres(A: SparseMatrix, b: np.ndarray, x0: np.ndarray | None = None,
            M: Preconditioner | None = None, m: int = 30, d: int = 1,
            tol: float = 1e-6, max_iters: int = 300, min_iters: int = 0,
            A_p_choice: str = "A") -> SolveReport:
    """GMRES(m) that self-deflates with harmonic Ritz vectors at the first restart.

    The first cycle runs undeflated; its Arnoldi data yields the d
    smallest-|theta| harmonic Ritz vectors, which are frozen into a deflation
    context used by every later cycle. On extraction failure the solve falls
    back to plain GMRES and records a warning in the report.
    """
    b = np.asarray(b, dtype=np.float64)
    if x0 is None:
        x0 = np.zeros(A.n)
    x0 = np.asarray(x0, dtype=np.float64)
    if M is None:
        M = Preconditioner.identity()
    if d < 1:
        raise ValueError("rdgmres needs d >= 1")
    if m < d:
        raise ValueError("cycle size m must be >= d")

    state = {"flag": False}

    def hook(cycle: int, data: ArnoldiData, ctx):
        if state["flag"]:
            return ctx, None, False
        state["flag"] = True
        try:
            hr = harmonic_ritz_b(data, d)
            basis = DeflationBasis(hr.Zvecs)
            new_ctx = build_context(A, M, basis, b, A_p_choice=A_p_choice)
            return new_ctx, None, True
        except (HarmonicRitzFailure, SingularCoarseMatrix, ValueError) as e:
            return None, f"harmonic Ritz deflation disabled: {e}", False

    report = _run_cycles(A, b, x0, M, m, tol, max_iters, min_iters,
                         None, hook, False)
    return report
