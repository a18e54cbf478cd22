"""Structured-grid pressure-equation testbed.

Assembles the incompressible pressure equation -div(k grad p) = q on a
structured 3D cell grid with a two-point flux (harmonic-mean transmissibility)
7-point stencil. Boundary conditions are homogeneous Neumann everywhere except
an optional Dirichlet condition on the top z-face, imposed through a ghost
half-cell filled with a reference-permeability medium.

Layered permeability fields with extreme contrasts produce the isolated small
eigenvalues (after diagonal scaling) that the deflation solvers target.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, SingularProblem
from .sparse import SparseMatrix


@dataclass(frozen=True)
class Grid:
    """Structured cell grid; linear cell index is ix + nx*(iy + ny*iz)."""

    nx: int
    ny: int
    nz: int
    dx: float = 1.0
    dy: float = 1.0
    dz: float = 1.0

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValueError("cell counts must be >= 1")
        if min(self.dx, self.dy, self.dz) <= 0:
            raise ValueError("cell sizes must be positive")

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    def index(self, ix: int, iy: int, iz: int) -> int:
        return ix + self.nx * (iy + self.ny * iz)


@dataclass
class PermeabilityField:
    """Per-cell scalar permeabilities per axis (flat arrays in cell order)."""

    grid: Grid
    kx: np.ndarray
    ky: np.ndarray
    kz: np.ndarray

    def __post_init__(self):
        n = self.grid.n_cells
        for name in ("kx", "ky", "kz"):
            a = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=np.float64))
            if a.shape != (n,):
                raise ValueError(f"{name} must have length {n}")
            if np.any(a < 0):
                raise ValueError(f"{name} has negative entries")
            setattr(self, name, a)


@dataclass(frozen=True)
class BoundarySpec:
    """Neumann on all faces; optionally Dirichlet on the top z-face.

    The Dirichlet value is imposed at the center of a ghost half-cell above
    the top face; the ghost medium has permeability `boundary_perm`.
    """

    top_dirichlet: bool = True
    dirichlet_value: float = 0.0
    boundary_perm: float = 1.0


@dataclass
class PressureProblem:
    A: SparseMatrix
    b: np.ndarray
    scaling: np.ndarray | None  # per-row 1/a_ii if diagonally scaled, else None
    grid: Grid


def make_layered_field(grid: Grid, layer_values) -> PermeabilityField:
    """Isotropic field constant per horizontal layer.

    `layer_values` is a list of ((z0, z1), value) with the half-open z-ranges
    partitioning [0, nz).
    """
    k = np.full(grid.n_cells, -1.0)
    covered = np.zeros(grid.nz, dtype=bool)
    for (z0, z1), value in layer_values:
        if not (0 <= z0 < z1 <= grid.nz):
            raise ValueError(f"z-range {z0}:{z1} outside [0, {grid.nz})")
        if covered[z0:z1].any():
            raise ValueError(f"z-range {z0}:{z1} overlaps a previous layer")
        if value <= 0:
            raise ValueError("layer permeability must be positive")
        covered[z0:z1] = True
        for iz in range(z0, z1):
            k[grid.nx * grid.ny * iz:grid.nx * grid.ny * (iz + 1)] = value
    if not covered.all():
        missing = np.flatnonzero(~covered)
        raise ValueError(f"layers do not cover z = {missing.tolist()}")
    return PermeabilityField(grid, k, k.copy(), k.copy())


def make_sagd_like_field(grid: Grid, band_spec) -> PermeabilityField:
    """Horizontal-band field with kz = kx/2; zero-permeability bands allowed."""
    kx = np.full(grid.n_cells, -1.0)
    covered = np.zeros(grid.nz, dtype=bool)
    for (z0, z1), value in band_spec:
        if not (0 <= z0 < z1 <= grid.nz):
            raise ValueError(f"z-range {z0}:{z1} outside [0, {grid.nz})")
        if covered[z0:z1].any():
            raise ValueError(f"z-range {z0}:{z1} overlaps a previous band")
        if value < 0:
            raise ValueError("band permeability must be >= 0")
        covered[z0:z1] = True
        for iz in range(z0, z1):
            kx[grid.nx * grid.ny * iz:grid.nx * grid.ny * (iz + 1)] = value
    if not covered.all():
        missing = np.flatnonzero(~covered)
        raise ValueError(f"bands do not cover z = {missing.tolist()}")
    return PermeabilityField(grid, kx, kx.copy(), kx / 2.0)


def _harmonic_transmissibility(k1, k2, d1, d2, area):
    """Two-point flux coefficient across a face; zero if either side is sealed."""
    k1 = np.asarray(k1, dtype=np.float64)
    k2 = np.asarray(k2, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = area / (0.5 * d1 / k1 + 0.5 * d2 / k2)
    return np.where((k1 > 0) & (k2 > 0), t, 0.0)


def assemble_pressure(field: PermeabilityField, bc: BoundarySpec,
                      q: np.ndarray | None = None) -> PressureProblem:
    """7-point finite-volume discretization of the pressure equation.

    Cells with no open face (zero permeability all around) get identity rows
    with zero RHS so the matrix stays nonsingular.
    """
    g = field.grid
    n = g.n_cells
    if q is None:
        q = np.zeros(n)
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (n,):
        raise ValueError("source vector has wrong length")

    shape = (g.nz, g.ny, g.nx)  # ravel order matches the linear cell index
    kx = field.kx.reshape(shape)
    ky = field.ky.reshape(shape)
    kz = field.kz.reshape(shape)
    lin = np.arange(n).reshape(shape)

    diag = np.zeros(shape)
    rows, cols, vals = [], [], []

    def couple(t, i, j):
        t = t.ravel()
        i = i.ravel()
        j = j.ravel()
        keep = t > 0
        t, i, j = t[keep], i[keep], j[keep]
        rows.append(np.concatenate([i, j]))
        cols.append(np.concatenate([j, i]))
        vals.append(np.concatenate([-t, -t]))
        np.add.at(diag.reshape(-1), i, t)
        np.add.at(diag.reshape(-1), j, t)

    if g.nx > 1:
        t = _harmonic_transmissibility(kx[:, :, :-1], kx[:, :, 1:],
                                       g.dx, g.dx, g.dy * g.dz)
        couple(t, lin[:, :, :-1], lin[:, :, 1:])
    if g.ny > 1:
        t = _harmonic_transmissibility(ky[:, :-1, :], ky[:, 1:, :],
                                       g.dy, g.dy, g.dx * g.dz)
        couple(t, lin[:, :-1, :], lin[:, 1:, :])
    if g.nz > 1:
        t = _harmonic_transmissibility(kz[:-1, :, :], kz[1:, :, :],
                                       g.dz, g.dz, g.dx * g.dy)
        couple(t, lin[:-1, :, :], lin[1:, :, :])

    b = q.copy()
    if bc.top_dirichlet:
        td = _harmonic_transmissibility(kz[-1, :, :], bc.boundary_perm,
                                        g.dz, g.dz, g.dx * g.dy)
        diag[-1, :, :] += td
        b[lin[-1, :, :].ravel()] += (td * bc.dirichlet_value).ravel()
    elif abs(q.sum()) > 1e-12 * (1.0 + np.abs(q).sum()):
        raise SingularProblem("all-Neumann problem with incompatible sources")

    # seal fully disconnected cells: p_i = 0
    diag_flat = diag.reshape(-1)
    dead = diag_flat == 0
    diag_flat[dead] = 1.0
    b[dead] = 0.0

    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag_flat)
    A = SparseMatrix.from_coo(n, np.concatenate(rows), np.concatenate(cols),
                              np.concatenate(vals))
    return PressureProblem(A, b, None, g)


def diagonal_scale(p: PressureProblem) -> PressureProblem:
    """Left-scale by diag(A)^-1 so every diagonal entry becomes exactly 1."""
    d = p.A.diagonal()
    if np.any(d == 0):
        raise ValueError("zero diagonal entry; cannot diagonally scale")
    s = 1.0 / d
    A = p.A.scale_rows(s)
    # force exact unit diagonal against roundoff
    vals = A.values.copy()
    for i in range(A.n):
        lo, hi = A.row_offsets[i], A.row_offsets[i + 1]
        j = np.searchsorted(A.col_indices[lo:hi], i)
        vals[lo + j] = 1.0
    A = SparseMatrix(A.n, A.row_offsets, A.col_indices, vals)
    return PressureProblem(A, p.b * s, s, p.grid)


def load_field_file(path, grid: Grid) -> PermeabilityField:
    """Read a whitespace-separated ASCII field: kx block, then optional ky, kz."""
    text = Path(path).read_text()
    try:
        data = np.array([float(tok) for tok in text.split()])
    except ValueError as e:
        raise FormatError(f"{path}: non-numeric token ({e})") from e
    n = grid.n_cells
    if len(data) == n:
        kx = data
        return PermeabilityField(grid, kx, kx.copy(), kx.copy())
    if len(data) == 2 * n:
        return PermeabilityField(grid, data[:n], data[n:], data[:n].copy())
    if len(data) == 3 * n:
        return PermeabilityField(grid, data[:n], data[n:2 * n], data[2 * n:])
    raise FormatError(
        f"{path}: expected {n}, {2*n} or {3*n} values, found {len(data)}")


def save_field_file(path, field: PermeabilityField) -> None:
    """Write kx, ky, kz blocks in the load_field_file format."""
    with open(path, "w") as f:
        for block in (field.kx, field.ky, field.kz):
            f.write("\n".join(repr(float(v)) for v in block))
            f.write("\n")
