"""Physics-based deflation vectors: subdomain, levelset and composed partitions.

A Partition labels every grid cell with a region id; each region becomes a
{0,1} indicator deflation vector. Levelset regions follow the permeability
structure: cells are binned into log10 bands separated by large jumps, and
face-connected components of each band become regions. Zero-permeability
cells form a dedicated band that is excluded from the basis by default.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .deflation import DeflationBasis, build_context
from .krylov import Preconditioner, SolveReport, _run_cycles
from .sparse import SparseMatrix
from .testbed import Grid, PermeabilityField

_FACE_STRUCTURE = ndimage.generate_binary_structure(3, 1)  # 6-neighbor


@dataclass
class Partition:
    """Per-cell region labels in [0, d); labels in default_exclude are left
    out of the deflation basis unless the caller overrides."""

    labels: np.ndarray
    d: int
    kind: str
    default_exclude: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.min(initial=0) < 0 or (len(self.labels) and self.labels.max() >= self.d):
            raise ValueError("labels out of range")
        used = np.unique(self.labels)
        if len(used) != self.d:
            raise ValueError("every label id must be used by at least one cell")


def _relabel_by_first_occurrence(raw: np.ndarray, keep_ids=None):
    """Renumber labels so ids increase with the first linear cell index."""
    out = np.empty_like(raw)
    mapping = {}
    for i, r in enumerate(raw):
        if r not in mapping:
            mapping[r] = len(mapping)
        out[i] = mapping[r]
    remap = {old: new for old, new in mapping.items()}
    kept = frozenset(remap[k] for k in (keep_ids or ()) if k in remap)
    return out, len(mapping), kept


def subdomain_partition(grid: Grid, px: int, py: int, pz: int) -> Partition:
    """Axis-aligned near-equal boxes; remainders go to the leading blocks."""
    for p, nc, name in ((px, grid.nx, "px"), (py, grid.ny, "py"), (pz, grid.nz, "pz")):
        if p < 1:
            raise ValueError(f"{name} must be >= 1")
        if p > nc:
            raise ValueError(f"{name}={p} exceeds the cell count {nc}")

    def block_of(nc, p):
        sizes = np.full(p, nc // p)
        sizes[:nc % p] += 1
        bounds = np.concatenate([[0], np.cumsum(sizes)])
        return np.searchsorted(bounds, np.arange(nc), side="right") - 1

    bx = block_of(grid.nx, px)
    by = block_of(grid.ny, py)
    bz = block_of(grid.nz, pz)
    iz, iy, ix = np.meshgrid(np.arange(grid.nz), np.arange(grid.ny),
                             np.arange(grid.nx), indexing="ij")
    raw = (bx[ix] + px * (by[iy] + py * bz[iz])).ravel()
    labels, d, _ = _relabel_by_first_occurrence(raw)
    return Partition(labels, d, "subdomain")


def _band_ids(k: np.ndarray, jump_threshold: float) -> np.ndarray:
    """Gap-based clustering of log10 permeabilities; zero cells get band -1."""
    if np.any(k < 0):
        raise ValueError("negative permeability")
    band = np.full(len(k), -1, dtype=np.int64)
    pos = k > 0
    if not pos.any():
        return band
    logs = np.log10(k[pos])
    uniq = np.unique(logs)
    edges = uniq[:-1][np.diff(uniq) >= jump_threshold]
    band[pos] = np.searchsorted(edges, logs, side="left")
    return band


def levelset_partition(field: PermeabilityField, jump_threshold: float = 2.0) -> Partition:
    """Connected components of near-constant-permeability bands."""
    if jump_threshold <= 0:
        raise ValueError("jump_threshold must be positive")
    g = field.grid
    band = _band_ids(field.kx, jump_threshold)
    vol = band.reshape(g.nz, g.ny, g.nx)
    raw = np.full(g.n_cells, -1, dtype=np.int64)
    zero_raw_ids = []
    next_id = 0
    for bid in np.unique(band):
        mask = vol == bid
        comp, ncomp = ndimage.label(mask, structure=_FACE_STRUCTURE)
        comp = comp.ravel()
        for c in range(1, ncomp + 1):
            raw[comp == c] = next_id
            if bid == -1:
                zero_raw_ids.append(next_id)
            next_id += 1
    labels, d, excl = _relabel_by_first_occurrence(raw, zero_raw_ids)
    return Partition(labels, d, "levelset", excl)


def subdomain_levelset_partition(field: PermeabilityField, px: int, py: int,
                                 pz: int, jump_threshold: float = 2.0) -> Partition:
    """Levelset partitioning applied independently inside each subdomain box.

    Each resulting deflation vector is zero outside its box.
    """
    g = field.grid
    boxes = subdomain_partition(g, px, py, pz)
    band = _band_ids(field.kx, jump_threshold)
    raw = np.full(g.n_cells, -1, dtype=np.int64)
    zero_raw_ids = []
    next_id = 0
    for box_id in range(boxes.d):
        in_box = boxes.labels == box_id
        for bid in np.unique(band[in_box]):
            mask = (in_box & (band == bid)).reshape(g.nz, g.ny, g.nx)
            comp, ncomp = ndimage.label(mask, structure=_FACE_STRUCTURE)
            comp = comp.ravel()
            for c in range(1, ncomp + 1):
                raw[comp == c] = next_id
                if bid == -1:
                    zero_raw_ids.append(next_id)
                next_id += 1
    labels, d, excl = _relabel_by_first_occurrence(raw, zero_raw_ids)
    return Partition(labels, d, "subdomain_levelset", excl)


def manual_layers(grid: Grid, z_ranges) -> Partition:
    """One region per horizontal z-range; uncovered cells share a remainder
    region that is excluded from the basis by default."""
    per_z = np.full(grid.nz, -1, dtype=np.int64)
    for idx, (z0, z1) in enumerate(z_ranges):
        if not (0 <= z0 < z1 <= grid.nz):
            raise ValueError(f"z-range {z0}:{z1} outside [0, {grid.nz})")
        if np.any(per_z[z0:z1] >= 0):
            raise ValueError(f"z-range {z0}:{z1} overlaps a previous range")
        per_z[z0:z1] = idx
    nranges = len(list(z_ranges))
    exclude = set()
    if np.any(per_z < 0):
        per_z[per_z < 0] = nranges
        exclude.add(nranges)
    iz = np.repeat(np.arange(grid.nz), grid.nx * grid.ny)
    raw = per_z[iz]
    # keep the user's range order: no relabeling here
    return Partition(raw, int(per_z.max()) + 1, "manual", frozenset(exclude))


def partition_to_basis(p: Partition, exclude_labels=None) -> DeflationBasis:
    """Indicator-vector basis; columns are the kept regions in label order.

    exclude_labels=None applies the partition's default exclusions; an
    explicit set (possibly empty) replaces them.
    """
    exclude = p.default_exclude if exclude_labels is None else frozenset(exclude_labels)
    keep = [l for l in range(p.d) if l not in exclude]
    if not keep:
        raise ValueError("no regions left after exclusions")
    Z = np.zeros((len(p.labels), len(keep)))
    for j, l in enumerate(keep):
        Z[p.labels == l, j] = 1.0
    return DeflationBasis(Z)


def pdgmres(A: SparseMatrix, b: np.ndarray, x0: np.ndarray | None = None,
            M: Preconditioner | None = None, m: int = 30,
            basis: DeflationBasis | None = None, tol: float = 1e-6,
            max_iters: int = 300, min_iters: int = 0,
            A_p_choice: str = "A") -> SolveReport:
    """Deflated GMRES with an a-priori basis: deflation active from iteration 1."""
    if basis is None:
        raise ValueError("pdgmres requires a deflation basis")
    b = np.asarray(b, dtype=np.float64)
    if x0 is None:
        x0 = np.zeros(A.n)
    x0 = np.asarray(x0, dtype=np.float64)
    if M is None:
        M = Preconditioner.identity()
    ctx = build_context(A, M, basis, b, A_p_choice=A_p_choice)
    return _run_cycles(A, b, x0, M, m, tol, max_iters, min_iters, ctx, None, False)


def save_partition(path, p: Partition) -> None:
    """One label per line in linear cell order."""
    Path(path).write_text("\n".join(str(l) for l in p.labels) + "\n")


def load_partition(path) -> Partition:
    labels = np.array([int(line) for line in Path(path).read_text().split()])
    return Partition(labels, int(labels.max()) + 1, "manual")
