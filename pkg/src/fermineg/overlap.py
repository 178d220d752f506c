"""Overlap-matrix route to entanglement of free-fermion ground states.

For occupied orbitals ``U_occ`` and a region ``R`` the overlap matrix is the
Gram matrix of the orbitals restricted to ``R``::

    M_R[alpha, beta] = sum_{i in R} conj(U[i, alpha]) U[i, beta]

Its eigenvalues ``P_gamma`` are the probabilities that the rotated orbital
``gamma`` sits inside ``R``.  For a bipartition the ground state factorizes
into independent two-level modes, each with density matrix
``[[1-P, sqrt(P(1-P))], [sqrt(P(1-P)), P]]`` in the basis
``(|0_A 1_B>, |1_A 0_B>)``, and every bipartite measure is a sum over modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .model import RegionPartition
from .spectrum import OccupiedOrbitals

CLAMP_TOL = 1e-10
HARD_TOL = 1e-8


@dataclass(frozen=True)
class OverlapMatrix:
    """Overlap matrix of one region.

    ``factor`` and ``cofactor`` optionally hold the orbital rows inside and
    outside the region (``matrix = factor^dag factor``).  When present, mode
    weights are taken from their singular values, which resolves weights
    near 0 and 1 to absolute roundoff instead of its square root.
    """

    matrix: np.ndarray
    region: str
    factor: np.ndarray | None = None
    cofactor: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def overlap_matrix(occ: OccupiedOrbitals, part: RegionPartition, region: str) -> OverlapMatrix:
    if part.n_sites != occ.n_sites:
        raise ContractError(f"partition covers {part.n_sites} sites, orbitals {occ.n_sites}")
    mask = part.mask(region)
    UR, rest = occ.U_occ[mask], occ.U_occ[~mask]
    return OverlapMatrix(UR.conj().T @ UR, region, UR, rest)


def _clamp_unit(P: np.ndarray, what: str) -> np.ndarray:
    if P.size and (P.min() < -HARD_TOL or P.max() > 1 + HARD_TOL):
        raise ContractError(f"{what} eigenvalues outside [0, 1]: [{P.min():.3e}, {P.max():.3e}]")
    return np.clip(P, 0.0, 1.0)


def mode_spectrum(mA: OverlapMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Mode occupation probabilities and the rotation to the mode basis.

    Returns
    -------
    P : ndarray
        Ascending eigenvalues, clamped to ``[0, 1]``.
    V : ndarray
        Unitary with ``V^dag M_A V = diag(P)``.  For a bipartition the same
        ``V`` diagonalizes ``M_B = 1 - M_A``.

    Raises
    ------
    ContractError
        If the input is not Hermitian or an eigenvalue leaves ``[0, 1]`` by
        more than ``1e-8`` (roundoff up to that size is clamped).
    """
    m = mA.matrix
    if m.size and np.max(np.abs(m - m.conj().T)) > 1e-12:
        raise ContractError("overlap matrix is not Hermitian")
    if mA.factor is None or mA.cofactor is None:
        P, V = np.linalg.eigh(m)
        return _clamp_unit(P, "overlap matrix"), V
    P, V = _factored_spectrum(mA.factor, mA.cofactor)
    order = np.argsort(P, kind="stable")
    return _clamp_unit(P[order], "overlap matrix"), V[:, order]


def _factored_spectrum(F: np.ndarray, G: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # F^dag F + G^dag G = 1.  Small weights come from the singular values
    # of F, weights near one from the norms of G on the same right vectors.
    m = F.shape[1]
    if m == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    _, sf, Vh = np.linalg.svd(F, full_matrices=True)
    V = Vh.conj().T
    sigma = np.zeros(m)
    sigma[: len(sf)] = sf
    P = sigma**2
    big = P > 0.5
    if np.any(big):
        rest = np.linalg.norm(G @ V[:, big], axis=0) ** 2
        P[big] = 1.0 - rest
    return P, V


def region_spectrum(occ: OccupiedOrbitals, part: RegionPartition, region: str = "A") -> np.ndarray:
    """Shorthand: ``mode_spectrum(overlap_matrix(...))[0]``."""
    return mode_spectrum(overlap_matrix(occ, part, region))[0]


def _mode_weight(P: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(P * (1.0 - P), 0.0, None))


def bipartite_negativity(P: np.ndarray) -> float:
    """Log-negativity ``sum_gamma ln(1 + 2 sqrt(P (1 - P)))`` of a pure bipartite state."""
    P = np.asarray(P, dtype=float)
    return float(np.sum(np.log1p(2.0 * _mode_weight(P))))


def bipartite_entropy(P: np.ndarray, order: float = 1) -> float:
    """Von Neumann (``order=1``) or Renyi entropy of the reduced state.

    ``S = -sum [P ln P + (1-P) ln(1-P)]`` and
    ``S_n = sum ln(P^n + (1-P)^n) / (1 - n)``.
    """
    P = np.asarray(P, dtype=float)
    if order <= 0:
        raise ValueError(f"Renyi order must be positive, got {order}")
    if order == 1:
        Q = 1.0 - P
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0)), 0.0)
            s += np.where(Q > 0, Q * np.log(np.where(Q > 0, Q, 1.0)), 0.0)
        return float(-np.sum(s))
    return float(np.sum(np.log(P**order + (1.0 - P) ** order)) / (1.0 - order))


def mode_density_matrix(p: float) -> np.ndarray:
    """Two-level mode density matrix in the basis ``(|0_A 1_B>, |1_A 0_B>)``."""
    w = np.sqrt(max(p * (1 - p), 0.0))
    return np.array([[1 - p, w], [w, p]], dtype=complex)


def mode_upt_matrix(p: float) -> np.ndarray:
    """Fermionic partial transpose of :func:`mode_density_matrix` on ``B``.

    Basis order ``(|0_A 1_B>, |1_A 0_B>, |0_A 0_B>, |1_A 1_B>)``.
    """
    w = np.sqrt(max(p * (1 - p), 0.0))
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = 1 - p
    out[1, 1] = p
    out[2, 3] = out[3, 2] = -1j * w
    return out


def product_spectrum(P: np.ndarray, kind: str = "reduced") -> np.ndarray:
    """Spectrum of the tensor product of single-mode matrices.

    ``kind="reduced"`` gives the ``2^M`` eigenvalues of
    ``rho_A = (x)_gamma diag(1 - P, P)``; ``kind="upt"`` the ``4^M`` eigenvalues
    of ``(x)_gamma rho_gamma^{T_B}``, whose single-mode eigenvalues are
    ``1 - P, P, +i w, -i w`` with ``w = sqrt(P (1 - P))``.
    """
    out = np.ones(1, dtype=complex if kind == "upt" else float)
    for p in np.asarray(P, dtype=float):
        if kind == "reduced":
            factors = np.array([1 - p, p])
        elif kind == "upt":
            w = np.sqrt(max(p * (1 - p), 0.0))
            factors = np.array([1 - p, p, 1j * w, -1j * w])
        else:
            raise ValueError(f"unknown spectrum kind {kind!r}")
        out = np.multiply.outer(out, factors).ravel()
    return out


# --------------------------------------------------------------------- tripartite


@dataclass(frozen=True)
class TriModeSpectrum:
    """Co-indexed mode weights in ``A1``, ``A2`` and ``B``."""

    PA1: np.ndarray
    PA2: np.ndarray
    PB: np.ndarray

    def __post_init__(self):
        a1, a2, b = (np.asarray(x, dtype=float) for x in (self.PA1, self.PA2, self.PB))
        if not a1.shape == a2.shape == b.shape:
            raise ContractError("tripartite mode weights have different lengths")
        if a1.size and np.max(np.abs(a1 + a2 + b - 1)) > CLAMP_TOL:
            raise ContractError("tripartite mode weights do not sum to one")
        for name, x in (("PA1", a1), ("PA2", a2), ("PB", b)):
            if x.size and (x.min() < -HARD_TOL or x.max() > 1 + HARD_TOL):
                raise ContractError(f"{name} outside [0, 1]")
        object.__setattr__(self, "PA1", np.clip(a1, 0, 1))
        object.__setattr__(self, "PA2", np.clip(a2, 0, 1))
        object.__setattr__(self, "PB", np.clip(b, 0, 1))


@dataclass(frozen=True)
class SimultaneityCheck:
    simultaneous: bool
    norms: dict[str, float]


def simultaneity_check(
    mA1: OverlapMatrix, mA2: OverlapMatrix, mB: OverlapMatrix, tol: float = 1e-10
) -> SimultaneityCheck:
    """Pairwise commutator max-norms of the three overlap matrices."""
    a, b, c = mA1.matrix, mA2.matrix, mB.matrix
    if not a.shape == b.shape == c.shape:
        raise ContractError(f"overlap matrices differ in shape: {a.shape}, {b.shape}, {c.shape}")

    def comm(x, y):
        return float(np.max(np.abs(x @ y - y @ x))) if x.size else 0.0

    norms = {"A1,A2": comm(a, b), "A1,B": comm(a, c), "A2,B": comm(b, c)}
    return SimultaneityCheck(all(v <= tol for v in norms.values()), norms)


def tri_mode_spectrum(mA1: OverlapMatrix, mA2: OverlapMatrix, mB: OverlapMatrix) -> TriModeSpectrum:
    """Mode weights in a common basis.

    The basis diagonalizes ``M_B`` exactly and, inside each degenerate
    eigenspace of ``M_B``, also ``M_A1``.  When the three matrices commute this
    is their joint eigenbasis.  Otherwise ``PA1``/``PA2`` are the diagonal
    elements of ``M_A1``/``M_A2`` in that basis, so the weights still sum to
    one but the tripartite formula is only an approximation.
    """
    pb, V = mode_spectrum(mB)
    V = V.copy()
    start = 0
    while start < len(pb):
        stop = start + 1
        while stop < len(pb) and pb[stop] - pb[start] <= 1e-9:
            stop += 1
        if stop - start > 1:
            Vg = V[:, start:stop]
            _, W = np.linalg.eigh(Vg.conj().T @ mA1.matrix @ Vg)
            V[:, start:stop] = Vg @ W
        start = stop
    return TriModeSpectrum(_diagonal_weights(mA1, V), _diagonal_weights(mA2, V), pb)


def _diagonal_weights(m: OverlapMatrix, V: np.ndarray) -> np.ndarray:
    if m.factor is not None:
        return np.linalg.norm(m.factor @ V, axis=0) ** 2
    return np.real(np.einsum("ia,ij,ja->a", V.conj(), m.matrix, V))


def _tri_mode_terms(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    root = np.sqrt(c**2 + 4 * a * b)
    r_plus = 0.5 * (c**2 + 2 * a * b + c * root)
    naive = 0.5 * (c**2 + 2 * a * b - c * root)
    if np.any(naive < -1e-12):
        raise ContractError(f"negative radicand {naive.min():.3e} in tripartite formula")
    # r_plus * r_minus = (a b)^2; the quotient avoids cancellation in r_minus
    with np.errstate(divide="ignore", invalid="ignore"):
        r_minus = np.where(r_plus > 0, (a * b) ** 2 / r_plus, 0.0)
    return np.log(a + b + np.sqrt(r_plus) + np.sqrt(r_minus))


def tripartite_negativity(tri: TriModeSpectrum) -> float:
    """Overlap-matrix log-negativity between ``A1`` and ``A2`` with ``B`` traced out.

    Per mode::

        ln[ PA1 + PA2 + sqrt((PB^2 + 2 PA1 PA2 + PB R) / 2)
                      + sqrt((PB^2 + 2 PA1 PA2 - PB R) / 2) ],
        R = sqrt(PB^2 + 4 PA1 PA2).

    Exact only when the three overlap matrices are simultaneously
    diagonalizable; for genuinely mixed reduced states it is not the true
    negativity (see :func:`tripartite_overlap_negativity`).
    """
    return float(np.sum(_tri_mode_terms(tri.PA1, tri.PA2, tri.PB)))


@dataclass(frozen=True)
class TripartiteResult:
    """Tripartite overlap value together with the caveat that qualifies it."""

    value: float
    simultaneous: bool
    commutator_norms: dict[str, float]
    spectrum: TriModeSpectrum

    @property
    def warnings(self) -> tuple[str, ...]:
        if self.simultaneous:
            return ()
        worst = max(self.commutator_norms.values())
        return (f"not-simultaneously-diagonalizable: max commutator {worst:.3e}",)


def tripartite_overlap_negativity(
    occ: OccupiedOrbitals, part: RegionPartition, tol: float = 1e-10
) -> TripartiteResult:
    """Evaluate :func:`tripartite_negativity` on a partition with ``A1``, ``A2``, ``B``."""
    mats = [overlap_matrix(occ, part, r) for r in ("A1", "A2", "B")]
    check = simultaneity_check(*mats, tol=tol)
    tri = tri_mode_spectrum(*mats)
    return TripartiteResult(tripartite_negativity(tri), check.simultaneous, check.norms, tri)
