"""Exact desk-scale tools for Schur-Weyl entanglement distillation.

The submodules hold the algorithms; this package re-exports the core types.
"""

from .errors import CapacityError, DomainError
from .partitions import (
    Partition,
    dim_symmetric_irrep,
    dim_unitary_irrep,
    enumerate_partitions,
    plancherel,
)
from .quantum import BipartiteState, DensityOperator, PureState, Spectrum

__version__ = "0.1.0"

__all__ = [
    "BipartiteState",
    "CapacityError",
    "DensityOperator",
    "DomainError",
    "Partition",
    "PureState",
    "Spectrum",
    "dim_symmetric_irrep",
    "dim_unitary_irrep",
    "enumerate_partitions",
    "plancherel",
    "__version__",
]
