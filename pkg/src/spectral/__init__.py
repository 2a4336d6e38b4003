from src.spectral.contraction_matrix import (
    SymBlockMatrix,
    assemble_blocks,
    build_M,
    build_N,
)
from src.spectral.jacobi import (
    leading_eigenvector,
    off_diagonal_norm,
    round_robin_pairs,
    sym_eigh,
    sym_eigvals,
)
from src.spectral.measure import (
    Histogram,
    SpectrumResult,
    empirical_stieltjes,
    histogram,
    ks_distance,
    sup_deviation,
    sym_eigenvalues,
)

__all__ = [
    "SymBlockMatrix",
    "SpectrumResult",
    "Histogram",
    "assemble_blocks",
    "build_M",
    "build_N",
    "empirical_stieltjes",
    "histogram",
    "ks_distance",
    "leading_eigenvector",
    "off_diagonal_norm",
    "round_robin_pairs",
    "sup_deviation",
    "sym_eigenvalues",
    "sym_eigh",
    "sym_eigvals",
]
