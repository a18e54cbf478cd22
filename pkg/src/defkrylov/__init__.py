"""Deflated Krylov solvers for heterogeneous pressure problems.

Sparse CSR kernels, restarted GMRES(m) with right preconditioning, deflation
projectors with harmonic-Ritz or physics-based (subdomain/levelset) bases,
a structured-grid pressure-equation testbed and spectral diagnostics.
"""
from .deflation import (DeflationBasis, DeflationContext, apply_p1, apply_p2,
                        build_context, reconstruct)
from .errors import (EigNonConvergence, FormatError, HarmonicRitzFailure,
                     SingularCoarseMatrix, SingularProblem)
from .harmonic import (HarmonicRitzSet, harmonic_ritz_a, harmonic_ritz_b,
                       realify, rdgmres)
from .krylov import (ArnoldiData, Preconditioner, SolveReport, gmres,
                     jacobi_apply, ritz_values)
from .physics import (Partition, levelset_partition, load_partition,
                      manual_layers, partition_to_basis, pdgmres,
                      save_partition, subdomain_levelset_partition,
                      subdomain_partition)
from .sparse import (LUFactors, SparseMatrix, dense_eig, dense_lu, lu_solve,
                     spmv)
from .spectral import SpectrumReport, spectrum, subspace_angle, write_spectrum_csv
from .testbed import (BoundarySpec, Grid, PermeabilityField, PressureProblem,
                      assemble_pressure, diagonal_scale, load_field_file,
                      make_layered_field, make_sagd_like_field,
                      save_field_file)

__version__ = "0.1.0"

__all__ = [
    "ArnoldiData", "BoundarySpec", "DeflationBasis", "DeflationContext",
    "EigNonConvergence", "FormatError", "Grid", "HarmonicRitzFailure",
    "HarmonicRitzSet", "LUFactors", "Partition", "PermeabilityField",
    "Preconditioner", "PressureProblem", "SingularCoarseMatrix",
    "SingularProblem", "SolveReport", "SparseMatrix", "SpectrumReport",
    "apply_p1", "apply_p2", "assemble_pressure", "build_context", "dense_eig",
    "dense_lu", "diagonal_scale", "gmres", "harmonic_ritz_a",
    "harmonic_ritz_b", "jacobi_apply", "levelset_partition", "load_field_file",
    "load_partition", "lu_solve", "make_layered_field", "make_sagd_like_field",
    "manual_layers", "partition_to_basis", "pdgmres", "rdgmres", "realify",
    "reconstruct", "ritz_values", "save_field_file", "save_partition",
    "spectrum", "spmv",
    "subdomain_levelset_partition", "subdomain_partition", "subspace_angle",
    "write_spectrum_csv",
]
