"""Orbital basis, ground-state filling and the correlation kernel."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .model import check_hermitian

FERMI_TOL = 1e-12


@dataclass(frozen=True)
class OrbitalBasis:
    """Eigen-decomposition ``h U = U diag(energies)`` with ascending energies."""

    U: np.ndarray
    energies: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.U.shape[0]


@dataclass(frozen=True)
class OccupiedOrbitals:
    """The ``M`` occupied columns of the orbital basis.

    ``U_occ[i, alpha]`` is the amplitude of occupied orbital ``alpha`` on site
    ``i``; the many-body ground state is ``prod_alpha f_alpha^dag |0>`` with
    ``f_alpha^dag = sum_i c_i^dag U_occ[i, alpha]``.  The overall phase of
    this product never enters a density matrix and is not tracked.
    """

    U_occ: np.ndarray
    energies: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    @property
    def n_sites(self) -> int:
        return self.U_occ.shape[0]

    @property
    def n_particles(self) -> int:
        return self.U_occ.shape[1]


def diagonalize(h: np.ndarray) -> OrbitalBasis:
    """Diagonalize a Hermitian hopping matrix.

    LAPACK ``heevd`` returns eigenvalues in ascending order; degenerate
    eigenvectors are whatever the solver returns, which is deterministic for a
    given input.
    """
    h = check_hermitian(h)
    energies, U = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(h))))
    residual = np.max(np.abs(h @ U - U * energies))
    if residual > 1e-10 * scale:
        raise ContractError(f"eigen-decomposition residual {residual:.3e} too large")
    return OrbitalBasis(U, energies)


def select_occupied(basis: OrbitalBasis, n_particles: int | None = None) -> OccupiedOrbitals:
    """Occupy the lowest orbitals.

    Parameters
    ----------
    basis
        Output of :func:`diagonalize`.
    n_particles
        Fixed particle number ``M``.  ``None`` fills every orbital with
        ``energy < -1e-12``; orbitals within ``1e-12`` of zero energy are left
        empty and reported in ``warnings``.

    Notes
    -----
    With a fixed ``M`` the cut between occupied and empty orbitals can fall
    inside a degenerate shell.  The first ``M`` columns in eigen-solver order
    are taken and the degeneracy is reported.
    """
    e = basis.energies
    n = len(e)
    warnings: list[str] = []
    if n_particles is None:
        occ = e < -FERMI_TOL
        zero = np.abs(e) <= FERMI_TOL
        if np.any(zero):
            warnings.append(f"fermi-degeneracy: {int(zero.sum())} zero-energy orbital(s) left empty")
        m = int(occ.sum())
    else:
        m = int(n_particles)
        if not 0 <= m <= n:
            raise ContractError(f"particle number must be in 0..{n}, got {m}")
        if 0 < m < n and abs(e[m] - e[m - 1]) <= FERMI_TOL * max(1.0, abs(e[m])):
            warnings.append(f"fermi-degeneracy: shell at energy {e[m]:.6g} split by M={m}")
    return OccupiedOrbitals(basis.U[:, :m], e[:m], tuple(warnings))


def ground_state(h: np.ndarray, n_particles: int | None = None) -> OccupiedOrbitals:
    """Shorthand for ``select_occupied(diagonalize(h), n_particles)``."""
    return select_occupied(diagonalize(h), n_particles)


def correlation_kernel(occ: OccupiedOrbitals) -> np.ndarray:
    """Projector ``K = U_occ U_occ^dag`` onto the occupied orbitals.

    ``<c_i^dag c_j> = K[j, i] = conj(K[i, j])``.
    """
    return occ.U_occ @ occ.U_occ.conj().T
