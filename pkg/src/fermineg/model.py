"""Single-particle Hamiltonians and region partitions.

All Hamiltonians are dense complex ``N x N`` Hermitian matrices ``h`` with
``H = sum_ij h_ij c_i^dag c_j``.  Sites are labelled by 0-based integers.

Lattice conventions
-------------------
chain
    ``h_ii = -mu``, ``h_{i,i+1} = h_{i+1,i} = -t``; the bond ``(N-1, 0)`` is
    present only for periodic boundaries.
honeycomb
    ``L x L`` two-site unit cells, periodic along both lattice vectors
    ``a1 = (1, 0)`` and ``a2 = (1/2, sqrt(3)/2)``.  Site ``(x, y, s)`` has
    global index ``2 * (x * L + y) + s``; sublattice ``s = 0`` sits at the cell
    origin and ``s = 1`` at ``(a1 + a2) / 3``, so every ``s = 0`` site bonds to
    the ``s = 1`` sites of cells ``(x, y)``, ``(x - 1, y)`` and ``(x, y - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractError, GeometryError

HERMITIAN_TOL = 1e-12


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a single-particle Hamiltonian and return it as complex array."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise ContractError(f"hopping matrix must be square and non-empty, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ContractError("hopping matrix has non-finite entries")
    dev = np.max(np.abs(h - h.conj().T))
    if dev > tol:
        raise ContractError(f"hopping matrix is not Hermitian (max deviation {dev:.3e})")
    return h


def build_chain(L: int, t: float = 1.0, mu: float = 0.0, pbc: bool = True) -> np.ndarray:
    """Nearest-neighbour tight-binding chain of ``L`` sites."""
    if L < 2:
        raise GeometryError(f"chain needs at least 2 sites, got L={L}")
    if t <= 0:
        raise GeometryError(f"hopping amplitude must be positive, got t={t}")
    h = np.zeros((L, L), dtype=complex)
    h[np.arange(L), np.arange(L)] = -mu
    i = np.arange(L - 1)
    h[i, i + 1] = -t
    h[i + 1, i] = -t
    if pbc:
        # for L=2 the wrap bond doubles the single bond
        h[0, L - 1] += -t
        h[L - 1, 0] += -t
    return h


@dataclass(frozen=True)
class HoneycombGeometry:
    """Index bookkeeping for :func:`build_honeycomb`."""

    L: int

    @property
    def n_sites(self) -> int:
        return 2 * self.L * self.L

    def index(self, x: int, y: int, s: int) -> int:
        L = self.L
        return 2 * ((x % L) * L + (y % L)) + s

    def cell(self, i: int) -> tuple[int, int, int]:
        """Inverse of :meth:`index`: global index -> ``(x, y, sublattice)``."""
        c, s = divmod(i, 2)
        x, y = divmod(c, self.L)
        return x, y, s

    def position(self, i: int) -> np.ndarray:
        """Cartesian coordinates of site ``i`` (output metadata only)."""
        x, y, s = self.cell(i)
        a1 = np.array([1.0, 0.0])
        a2 = np.array([0.5, np.sqrt(3) / 2])
        return x * a1 + y * a2 + s * (a1 + a2) / 3


def build_honeycomb(L: int, t: float = 1.0, mu: float = 0.0) -> tuple[np.ndarray, HoneycombGeometry]:
    """Periodic honeycomb lattice with ``L x L`` unit cells.

    ``L`` must be a multiple of 3 so that the corner region of edge ``L/3``
    (see :func:`corner_region`) is defined.
    """
    if L < 3 or L % 3 != 0:
        raise GeometryError(f"honeycomb size must be a positive multiple of 3, got L={L}")
    if t <= 0:
        raise GeometryError(f"hopping amplitude must be positive, got t={t}")
    geo = HoneycombGeometry(L)
    n = geo.n_sites
    h = np.zeros((n, n), dtype=complex)
    h[np.arange(n), np.arange(n)] = -mu
    for x in range(L):
        for y in range(L):
            a = geo.index(x, y, 0)
            for b in (geo.index(x, y, 1), geo.index(x - 1, y, 1), geo.index(x, y - 1, 1)):
                h[a, b] += -t
                h[b, a] += -t
    return h, geo


@dataclass(frozen=True)
class RegionPartition:
    """Assignment of every site to exactly one named region.

    Parameters
    ----------
    labels
        Region tag of each site, in site order.
    regions
        Declared region names.  Defaults to the distinct labels in order of
        first appearance.
    allow_empty
        Declared regions that may legitimately contain no site.
    """

    labels: tuple[str, ...]
    regions: tuple[str, ...] = ()
    allow_empty: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        regions = tuple(self.regions) or tuple(dict.fromkeys(labels))
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "allow_empty", frozenset(self.allow_empty))
        if len(set(regions)) != len(regions):
            raise GeometryError(f"duplicate region names in {regions}")
        unknown = set(labels) - set(regions)
        if unknown:
            raise GeometryError(f"labels {sorted(unknown)} not among declared regions {regions}")
        for r in regions:
            if r not in labels and r not in self.allow_empty:
                raise GeometryError(f"region {r!r} is empty")

    @classmethod
    def from_sites(
        cls,
        n_sites: int,
        members: Mapping[str, Iterable[int]],
        rest: str | None = None,
        allow_empty: Iterable[str] = (),
    ) -> "RegionPartition":
        """Build from explicit site lists; unlisted sites go to ``rest``."""
        labels: list[str | None] = [None] * n_sites
        for name, sites in members.items():
            for i in sites:
                if not 0 <= i < n_sites:
                    raise GeometryError(f"site {i} outside 0..{n_sites - 1}")
                if labels[i] is not None:
                    raise GeometryError(f"site {i} assigned to both {labels[i]!r} and {name!r}")
                labels[i] = name
        regions = list(members)
        if any(lab is None for lab in labels):
            if rest is None:
                missing = [i for i, lab in enumerate(labels) if lab is None]
                raise GeometryError(f"sites {missing} have no region")
            labels = [rest if lab is None else lab for lab in labels]
        if rest is not None and rest not in regions:
            regions.append(rest)
        return cls(tuple(labels), tuple(regions), frozenset(allow_empty))

    @classmethod
    def from_pattern(cls, pattern: str, allow_empty: Iterable[str] = ()) -> "RegionPartition":
        """Parse one character per site: ``A``/``B`` or ``1``/``2``/``B``.

        ``"AAABBB"`` is a bipartition; ``"11BB22"`` declares ``A1``, ``A2``
        and ``B``.
        """
        names = {"A": "A", "B": "B", "1": "A1", "2": "A2"}
        bad = set(pattern) - set(names)
        if not pattern or bad:
            raise GeometryError(f"region pattern {pattern!r} may only contain A, B, 1, 2")
        labels = tuple(names[c] for c in pattern)
        if "A" in labels and ("A1" in labels or "A2" in labels):
            raise GeometryError(f"pattern {pattern!r} mixes bipartite and tripartite labels")
        regions = ("A1", "A2", "B") if {"A1", "A2"} & set(labels) else ("A", "B")
        # a traced-out region may be absent (pure state on the kept sites)
        return cls(labels, regions, frozenset(allow_empty) | {"B"})

    @property
    def n_sites(self) -> int:
        return len(self.labels)

    def sites(self, *names: str) -> np.ndarray:
        """Ascending site indices belonging to any of ``names``."""
        for n in names:
            if n not in self.regions:
                raise GeometryError(f"unknown region {n!r}; declared: {self.regions}")
        return np.array([i for i, lab in enumerate(self.labels) if lab in names], dtype=int)

    def mask(self, *names: str) -> np.ndarray:
        m = np.zeros(self.n_sites, dtype=bool)
        m[self.sites(*names)] = True
        return m

    def size(self, name: str) -> int:
        return len(self.sites(name))

    def restrict(self, sites: Sequence[int]) -> "RegionPartition":
        """Partition of the sub-lattice ``sites`` (re-indexed 0..len-1)."""
        labels = tuple(self.labels[i] for i in sites)
        present = tuple(r for r in self.regions if r in labels)
        return RegionPartition(labels, present)

    def pattern(self) -> str:
        """Inverse of :meth:`from_pattern` for the standard region names."""
        chars = {"A": "A", "B": "B", "A1": "1", "A2": "2"}
        try:
            return "".join(chars[lab] for lab in self.labels)
        except KeyError:
            return ",".join(self.labels)


def corner_region(L: int, l: int) -> RegionPartition:
    """Rhombic corner of ``l x l`` unit cells (both sublattices) on the
    ``L x L`` honeycomb of :func:`build_honeycomb`; ``l`` must equal ``L/3``.
    """
    if L < 3 or L % 3 != 0 or l * 3 != L:
        raise GeometryError(f"corner edge must be L/3; got L={L}, l={l}")
    geo = HoneycombGeometry(L)
    a = [geo.index(x, y, s) for x in range(l) for y in range(l) for s in (0, 1)]
    return RegionPartition.from_sites(geo.n_sites, {"A": a}, rest="B")


def adjacent_bipartition(n_sites: int, l: int) -> RegionPartition:
    """First ``l`` sites in ``A``, the rest in ``B``."""
    if not 0 < l <= n_sites:
        raise GeometryError(f"subsystem size must be in 1..{n_sites}, got {l}")
    return RegionPartition.from_sites(n_sites, {"A": range(l)}, rest="B", allow_empty={"B"})


@dataclass(frozen=True)
class RandomModelSpec:
    """Reproducible random Hermitian hopping model.

    ``T1`` and ``T2`` are drawn i.i.d. uniform on ``[-range, range]`` from a
    PCG64 stream seeded with ``seed``; the Hamiltonian is ``(T + T^dag)/2``
    with ``T = T1 + i T2``.
    """

    n_sites: int
    seed: int
    range: float = 1.0

    def __post_init__(self):
        if self.n_sites < 1:
            raise GeometryError(f"n_sites must be positive, got {self.n_sites}")
        if not self.range > 0:
            raise GeometryError(f"uniform half-width must be positive, got {self.range}")
        if not 0 <= self.seed < 2**64:
            raise GeometryError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def build_random_hopping(spec: RandomModelSpec) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    n, r = spec.n_sites, spec.range
    t1 = rng.uniform(-r, r, size=(n, n))
    t2 = rng.uniform(-r, r, size=(n, n))
    T = t1 + 1j * t2
    return (T + T.conj().T) / 2
