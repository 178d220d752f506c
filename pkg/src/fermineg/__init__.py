"""Entanglement entropy and fermionic logarithmic negativity of free-fermion
lattice ground states.

Three independent routes are provided and cross-check each other:

* :mod:`fermineg.overlap`  -- overlap matrix of the occupied orbitals,
* :mod:`fermineg.fock`     -- exact many-body density matrices in the Fock basis,
* :mod:`fermineg.greens`   -- Gaussian covariance (Green's function) formulas,

plus Fisher-Hartwig asymptotics for the one-dimensional chain in
:mod:`fermineg.asymptotic`.
"""

from .errors import (
    AccuracyError,
    CapacityError,
    ConfigError,
    ContractError,
    FerminegError,
    GeometryError,
    IllConditionedError,
)
from .model import (
    RandomModelSpec,
    RegionPartition,
    build_chain,
    build_honeycomb,
    build_random_hopping,
    corner_region,
)
from .spectrum import correlation_kernel, diagonalize, select_occupied
from .overlap import (
    bipartite_entropy,
    bipartite_negativity,
    mode_spectrum,
    overlap_matrix,
    tripartite_negativity,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "CapacityError",
    "ConfigError",
    "ContractError",
    "FerminegError",
    "GeometryError",
    "IllConditionedError",
    "RandomModelSpec",
    "RegionPartition",
    "build_chain",
    "build_honeycomb",
    "build_random_hopping",
    "corner_region",
    "correlation_kernel",
    "diagonalize",
    "select_occupied",
    "bipartite_entropy",
    "bipartite_negativity",
    "mode_spectrum",
    "overlap_matrix",
    "tripartite_negativity",
]
