"""Desk-scale spectral diagnostics: full spectra and overlap metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparse import SparseMatrix, dense_eig

MAX_SPECTRUM_DIM = 4000


@dataclass
class SpectrumReport:
    """Full spectrum sorted by magnitude, with an extreme-eigenvalue count.

    n_small counts |lambda| <= cutoff; gap_ratio is the magnitude ratio
    between the first eigenvalue above the cutoff and the last below it
    (None when the split is empty on either side).
    """

    eigenvalues: np.ndarray
    cutoff: float
    n_small: int
    gap_ratio: float | None


def spectrum(A: SparseMatrix, cutoff: float = 0.0) -> SpectrumReport:
    """Dense spectrum of A (densified internally; desk scale only)."""
    if A.n > MAX_SPECTRUM_DIM:
        raise ValueError(
            f"matrix dimension {A.n} exceeds {MAX_SPECTRUM_DIM}; "
            "subsample or use Ritz values instead")
    w = dense_eig(A.to_dense())
    w = w[np.argsort(np.abs(w))]
    mags = np.abs(w)
    n_small = int(np.sum(mags <= cutoff))
    gap = None
    if 0 < n_small < len(w) and mags[n_small - 1] > 0:
        gap = float(mags[n_small] / mags[n_small - 1])
    return SpectrumReport(w, cutoff, n_small, gap)


def subspace_angle(u: np.ndarray, v: np.ndarray) -> float:
    """|cos| of the angle between two vectors, in [0, 1]."""
    u = np.asarray(u)
    v = np.asarray(v)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ValueError("zero vector has no direction")
    return min(1.0, float(np.abs(np.vdot(u, v))) / (nu * nv))


def write_spectrum_csv(path, report: SpectrumReport) -> None:
    """Columns index,re,im,abs in ascending-|lambda| order."""
    with open(path, "w", newline="") as f:
        f.write("index,re,im,abs\n")
        for i, lam in enumerate(report.eigenvalues):
            f.write(f"{i},{float(lam.real)!r},{float(lam.imag)!r},{float(abs(lam))!r}\n")
