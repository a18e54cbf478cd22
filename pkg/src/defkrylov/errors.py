"""Exception types shared across the solver stack."""


class SingularCoarseMatrix(Exception):
    """LU factorization hit an (exactly) singular pivot.

    Raised for degenerate coarse matrices E = Z^T A Z, which signals
    linearly dependent deflation vectors.
    """


class EigNonConvergence(Exception):
    """The dense eigenvalue iteration failed to converge."""


class SingularProblem(Exception):
    """Assembled pressure system is singular (incompatible all-Neumann setup)."""


class FormatError(Exception):
    """A data file does not match the expected layout."""


class HarmonicRitzFailure(Exception):
    """Harmonic Ritz extraction broke down (singular R factor)."""
