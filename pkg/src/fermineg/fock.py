"""Exact many-body oracle in the occupation-number (Fock) basis.

Basis convention
----------------
An operator or state lives on an ascending tuple of global ``sites``.  The
basis vector with occupations ``n = (n_0, ..., n_{k-1})`` (``n_j`` belongs to
``sites[j]``) is ``(c_{s_0}^dag)^{n_0} ... (c_{s_{k-1}}^dag)^{n_{k-1}} |0>``
and has index ``sum_j n_j 2^{k-1-j}``, i.e. the first site is the most
significant bit.  Reshaping a state to ``(2,) * k`` therefore gives one axis
per site in site order.

Partial traces and partial transposes are taken in a *grouped* basis where the
creation operators of one group of sites are moved to the left of all others.
Regrouping is a permutation combined with the fermionic reordering sign
``(-1)^{#{(a, b): a in group, b not in group, b < a, n_a = n_b = 1}}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import CapacityError, ContractError, GeometryError
from .model import RegionPartition
from .spectrum import OccupiedOrbitals

STATE_CAP = 14
OPERATOR_CAP = 13


@dataclass(frozen=True)
class FockBasis:
    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        if list(sites) != sorted(set(sites)):
            raise GeometryError(f"Fock basis sites must be strictly ascending, got {sites}")
        object.__setattr__(self, "sites", sites)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return 2**self.n_sites

    def occupations(self) -> np.ndarray:
        """``(dim, n_sites)`` 0/1 array; row ``k`` is the occupation string of state ``k``."""
        return occupation_table(self.n_sites)

    def index(self, occupied: Sequence[int]) -> int:
        """Basis index of the state with the given global sites occupied."""
        pos = {s: j for j, s in enumerate(self.sites)}
        return sum(1 << (self.n_sites - 1 - pos[s]) for s in occupied)


def occupation_table(n: int) -> np.ndarray:
    k = np.arange(2**n)
    return ((k[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1).astype(np.int64)


def _popcount(n: int) -> np.ndarray:
    return occupation_table(n).sum(axis=1)


@dataclass(frozen=True)
class ManyBodyState:
    amplitudes: np.ndarray
    basis: FockBasis
    n_particles: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class ManyBodyOperator:
    matrix: np.ndarray
    basis: FockBasis
    hermitian: bool = False

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


def _check_state_cap(n: int, cap: int):
    if n > cap:
        raise CapacityError(f"Fock oracle limited to {cap} sites, got {n}")


def ground_state_expansion(occ: OccupiedOrbitals, cap: int = STATE_CAP) -> ManyBodyState:
    """Slater determinant ``prod_alpha f_alpha^dag |0>`` in the Fock basis.

    The amplitude of the configuration with sites ``j_1 < ... < j_M``
    occupied is ``det(U_occ[[j_1, ..., j_M], :])``.
    """
    n, m = occ.U_occ.shape
    _check_state_cap(n, cap)
    basis = FockBasis(tuple(range(n)))
    psi = np.zeros(basis.dim, dtype=complex)
    if m == 0:
        psi[0] = 1.0
    else:
        configs = np.array(list(combinations(range(n), m)), dtype=np.int64)
        minors = occ.U_occ[configs]  # (n_configs, M, M)
        idx = np.sum(1 << (n - 1 - configs), axis=1)
        psi[idx] = np.linalg.det(minors)
    return ManyBodyState(psi, basis, m)


def density_operator(psi: ManyBodyState, cap: int = OPERATOR_CAP) -> ManyBodyOperator:
    """Pure-state projector ``|psi><psi|``."""
    _check_state_cap(psi.basis.n_sites, cap)
    a = psi.amplitudes
    return ManyBodyOperator(np.outer(a, a.conj()), psi.basis, hermitian=True)


# ------------------------------------------------------------------ regrouping


def reorder_sign(n: int, first: Sequence[int]) -> np.ndarray:
    """Sign ``s(n)`` of moving the local modes ``first`` to the front.

    ``first`` are local positions (0..n-1).  Returns a ``(2^n,)`` array of
    ``+-1``.
    """
    occ = occupation_table(n)
    in_first = np.zeros(n, dtype=bool)
    in_first[list(first)] = True
    # occupied non-first modes strictly to the left of each position
    rest_occ = occ * (~in_first)[None, :]
    left = np.cumsum(rest_occ, axis=1) - rest_occ
    count = np.sum(occ[:, in_first] * left[:, in_first], axis=1)
    return 1 - 2 * (count % 2)


def _local_positions(basis: FockBasis, part: RegionPartition, names: Sequence[str]) -> list[int]:
    if part.n_sites != basis.n_sites:
        raise GeometryError(f"partition has {part.n_sites} sites, operator {basis.n_sites}")
    return [int(j) for j in part.sites(*names)]


def _grouping(n: int, first: Sequence[int]) -> tuple[np.ndarray, list[int]]:
    first = sorted(first)
    rest = [j for j in range(n) if j not in set(first)]
    return reorder_sign(n, first), first + rest


def group_state(amps: np.ndarray, n: int, first: Sequence[int]) -> np.ndarray:
    """State amplitudes as a ``(2^|first|, 2^rest)`` matrix in the grouped basis."""
    sign, order = _grouping(n, first)
    t = (amps * sign).reshape((2,) * n).transpose(order)
    return t.reshape(2 ** len(first), -1)


def group_operator(mat: np.ndarray, n: int, first: Sequence[int]) -> np.ndarray:
    """Operator matrix in the grouped basis ``|n_first, n_rest>``."""
    sign, order = _grouping(n, first)
    t = (sign[:, None] * mat * sign[None, :]).reshape((2,) * (2 * n))
    t = t.transpose(order + [n + j for j in order])
    return t.reshape(2**n, 2**n)


def ungroup_operator(mat: np.ndarray, n: int, first: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`group_operator`."""
    sign, order = _grouping(n, first)
    inv = list(np.argsort(order))
    t = mat.reshape((2,) * (2 * n)).transpose(inv + [n + j for j in inv]).reshape(2**n, 2**n)
    return sign[:, None] * t * sign[None, :]


# -------------------------------------------------------------- partial trace


def _keep_names(part: RegionPartition, keep: str | Sequence[str]) -> tuple[str, ...]:
    return (keep,) if isinstance(keep, str) else tuple(keep)


def partial_trace(
    rho: ManyBodyOperator, part: RegionPartition, keep: str | Sequence[str]
) -> ManyBodyOperator:
    """Fermionic partial trace onto the sites of region(s) ``keep``.

    ``rho_keep[n_K, m_K] = sum_{n_R} s(n_K, n_R) s(m_K, n_R) rho[n_K n_R, m_K n_R]``
    with the reordering sign of the module docstring.
    """
    names = _keep_names(part, keep)
    n = rho.basis.n_sites
    kept = _local_positions(rho.basis, part, names)
    g = group_operator(rho.matrix, n, kept)
    dk, dr = 2 ** len(kept), 2 ** (n - len(kept))
    red = np.einsum("ajbj->ab", g.reshape(dk, dr, dk, dr))
    sites = tuple(rho.basis.sites[j] for j in kept)
    return ManyBodyOperator(red, FockBasis(sites), rho.hermitian)


def reduced_density_matrix(
    psi: ManyBodyState, part: RegionPartition, keep: str | Sequence[str]
) -> ManyBodyOperator:
    """Same result as ``partial_trace(density_operator(psi), ...)`` without
    building the full projector."""
    names = _keep_names(part, keep)
    n = psi.basis.n_sites
    kept = _local_positions(psi.basis, part, names)
    x = group_state(psi.amplitudes, n, kept)
    sites = tuple(psi.basis.sites[j] for j in kept)
    return ManyBodyOperator(x @ x.conj().T, FockBasis(sites), hermitian=True)


# ---------------------------------------------------------- partial transpose


def _transpose(rho: ManyBodyOperator, part: RegionPartition, region: str, fermionic: bool) -> ManyBodyOperator:
    n = rho.basis.n_sites
    tr = _local_positions(rho.basis, part, (region,))
    if not tr:
        return ManyBodyOperator(rho.matrix.copy(), rho.basis, rho.hermitian)
    untouched = [j for j in range(n) if j not in set(tr)]
    da, db = 2 ** len(untouched), 2 ** len(tr)
    g = group_operator(rho.matrix, n, untouched).reshape(da, db, da, db)
    if fermionic:
        pa, pb = _popcount(len(untouched)), _popcount(len(tr))
        tau_a = pa[:, None] + pa[None, :]  # (n_A, nbar_A)
        tau_b = pb[:, None] + pb[None, :]  # (n_B, nbar_B)
        # exp(i pi phi), phi = [(tau_B mod 2)/2] + tau_A tau_B
        ph = (1j ** (tau_b % 2))[None, :, None, :] * (
            1 - 2 * ((tau_a[:, None, :, None] * tau_b[None, :, None, :]) % 2)
        )
        g = g * ph
    out = g.transpose(0, 3, 2, 1).reshape(da * db, da * db)
    return ManyBodyOperator(ungroup_operator(out, n, untouched), rho.basis, hermitian=False)


def upt(rho: ManyBodyOperator, part: RegionPartition, region: str) -> ManyBodyOperator:
    """Untwisted fermionic partial transpose with respect to ``region``.

    In the basis grouped as (other sites, ``region``)::

        |n_A, n_B><m_A, m_B|  ->  exp(i pi phi) |n_A, m_B><m_A, n_B|
        phi = [(tau_B + taubar_B) mod 2] / 2 + (tau_A + taubar_A)(tau_B + taubar_B)

    where ``tau`` are particle numbers of the ket/bra configurations.  The
    result is returned in the original site-ordered basis.
    """
    return _transpose(rho, part, region, fermionic=True)


def bpt(rho: ManyBodyOperator, part: RegionPartition, region: str) -> ManyBodyOperator:
    """Plain (bosonic) partial transpose: the index swap of :func:`upt` with unit phase.

    The swap is done in the same grouped basis as :func:`upt`; when the
    transposed sites all follow the others this coincides with the partial
    transpose of the Jordan-Wigner qubit representation.
    """
    return _transpose(rho, part, region, fermionic=False)


# ------------------------------------------------------------------- spectra


def block_structure(mat: np.ndarray) -> list[np.ndarray]:
    """Index sets of the connected components of the non-zero pattern.

    Permuting to these components makes ``mat`` exactly block diagonal, so
    eigenvalues and singular values can be computed block by block.
    """
    nz = mat != 0
    graph = csr_matrix(nz | nz.T)
    ncomp, labels = connected_components(graph, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(ncomp + 1))
    return [order[bounds[c] : bounds[c + 1]] for c in range(ncomp)]


def trace_norm(O: ManyBodyOperator | np.ndarray, blocks: list[np.ndarray] | None = None) -> float:
    """Sum of singular values.

    ``blocks`` may pass precomputed :func:`block_structure` index sets of ``O``.
    """
    mat = O.matrix if isinstance(O, ManyBodyOperator) else np.asarray(O)
    total = 0.0
    for idx in block_structure(mat) if blocks is None else blocks:
        block = mat[np.ix_(idx, idx)]
        if len(idx) == 1:
            total += abs(block[0, 0])
        else:
            total += float(np.sum(np.linalg.svd(block, compute_uv=False)))
    return total


def reduced_spectrum(O: ManyBodyOperator | np.ndarray, blocks: list[np.ndarray] | None = None) -> np.ndarray:
    """All eigenvalues (zeros kept), sorted by real then imaginary part.

    Hermitian operators return a real array.  ``blocks`` as in :func:`trace_norm`.
    """
    hermitian = isinstance(O, ManyBodyOperator) and O.hermitian
    mat = O.matrix if isinstance(O, ManyBodyOperator) else np.asarray(O)
    if mat.shape[0] != mat.shape[1]:
        raise ContractError(f"spectrum of non-square matrix {mat.shape}")
    parts = []
    for idx in block_structure(mat) if blocks is None else blocks:
        block = mat[np.ix_(idx, idx)]
        parts.append(np.linalg.eigvalsh(block) if hermitian else np.linalg.eigvals(block))
    ev = np.concatenate(parts) if parts else np.zeros(0)
    if hermitian:
        return np.sort(ev.real)
    return ev[np.lexsort((ev.imag, ev.real))]


def log_negativity_exact(
    rho: ManyBodyOperator, part: RegionPartition, region: str, flavor: str = "upt"
) -> float:
    """``ln || rho^{T_region} ||_1`` for the fermionic (``upt``) or bosonic (``bpt``) transpose."""
    if abs(rho.trace - 1) > 1e-10:
        raise ContractError(f"density operator has trace {rho.trace}")
    if flavor == "upt":
        t = upt(rho, part, region)
    elif flavor == "bpt":
        t = bpt(rho, part, region)
    else:
        raise ValueError(f"unknown partial-transpose flavor {flavor!r}")
    return float(np.log(trace_norm(t)))


def entanglement_entropy(rho: ManyBodyOperator, order: float = 1) -> float:
    """Von Neumann (``order=1``) or Renyi entropy of a density operator."""
    p = np.clip(np.linalg.eigvalsh(rho.matrix), 0.0, None)
    if order == 1:
        p = p[p > 0]
        return float(-np.sum(p * np.log(p)))
    return float(np.log(np.sum(p**order)) / (1 - order))


def spectral_deviation(a: np.ndarray, b: np.ndarray, negligible: float = 1e-14) -> float:
    """Max distance between two eigenvalue multisets under optimal matching.

    The shorter list is padded with zeros; matching is a linear assignment on
    ``|a_i - b_j|``, so no sort order of complex numbers is assumed.

    Entries with modulus at most `negligible` are dropped from both lists
    before matching (they would pair with padding anyway). This keeps the
    assignment small when one side carries many exact zeros, and changes the
    result by at most `negligible`.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    a = a[np.abs(a) > negligible]
    b = b[np.abs(b) > negligible]
    n = max(len(a), len(b))
    a = np.concatenate([a, np.zeros(n - len(a))])
    b = np.concatenate([b, np.zeros(n - len(b))])
    if n == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())
