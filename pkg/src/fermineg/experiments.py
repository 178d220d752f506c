"""Experiment drivers behind the command line.

Each driver takes plain keyword parameters and returns an
:class:`~fermineg.report.EntanglementReport`.  Sweep points are independent
and may be evaluated in worker processes; rows are always assembled in sweep
order so reports are reproducible.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from . import asymptotic, fock, greens, overlap
from .errors import GeometryError
from .model import (
    RandomModelSpec,
    RegionPartition,
    adjacent_bipartition,
    build_chain,
    build_honeycomb,
    build_random_hopping,
    corner_region,
)
from .report import EntanglementReport
from .spectrum import OccupiedOrbitals, correlation_kernel, ground_state

log = logging.getLogger(__name__)


def _map(func: Callable, items: Sequence, workers: int = 1) -> list:
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    slope_err: float
    r2: float


def fit_line(x: Iterable[float], y: Iterable[float]) -> LineFit:
    """Least-squares line with the standard error of the slope."""
    x, y = np.asarray(list(x), float), np.asarray(list(y), float)
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    resid = y - (slope * x + intercept)
    r2 = 1 - np.sum(resid**2) / np.sum((y - y.mean()) ** 2)
    return LineFit(float(slope), float(intercept), float(np.sqrt(cov[0, 0])), float(r2))


# ------------------------------------------------------------------ models


def build_model(model: str, L: int, t: float = 1.0, mu: float = 0.0, pbc: bool = True,
                seed: int = 0, range: float = 1.0) -> np.ndarray:
    """Hopping matrix from the flat model keys."""
    if model == "chain":
        return build_chain(L, t, mu, pbc)
    if model == "honeycomb":
        return build_honeycomb(L, t, mu)[0]
    if model == "random":
        return build_random_hopping(RandomModelSpec(L, seed, range))
    raise GeometryError(f"unknown model {model!r}")


def chain_partition(n_sites: int, geometry: str) -> RegionPartition:
    """Named chain geometries or an explicit per-site pattern.

    ``adjacent``  first half ``A``, second half ``B``;
    ``disjoint``  quarters ``A, B, A, B`` (``A = A1 u A2`` as one region);
    ``tripartite`` quarters ``A1, B, A2, B``;
    anything else is parsed by :meth:`RegionPartition.from_pattern`.
    """
    if geometry == "adjacent":
        if n_sites % 2:
            raise GeometryError(f"adjacent halves need an even number of sites, got {n_sites}")
        return adjacent_bipartition(n_sites, n_sites // 2)
    if geometry in ("disjoint", "tripartite"):
        if n_sites % 4:
            raise GeometryError(f"{geometry} quarters need a multiple of 4 sites, got {n_sites}")
        q = n_sites // 4
        a1, a2 = ("A", "A") if geometry == "disjoint" else ("1", "2")
        return RegionPartition.from_pattern(a1 * q + "B" * q + a2 * q + "B" * q)
    if len(geometry) != n_sites:
        raise GeometryError(f"pattern {geometry!r} has {len(geometry)} sites, model has {n_sites}")
    return RegionPartition.from_pattern(geometry)


def _mu_over_t(model: str, t: float, mu: float) -> float | None:
    return None if model == "random" else mu / t


# --------------------------------------------------------------- chain scan


def _chain_point(args) -> tuple[float, float]:
    U_occ, l = args
    P = overlap.region_spectrum(OccupiedOrbitals(U_occ, np.zeros(U_occ.shape[1])),
                                adjacent_bipartition(U_occ.shape[0], l))
    return overlap.bipartite_negativity(P), overlap.bipartite_entropy(P)


def chain_scan(L: int = 1000, t: float = 1.0, mu: float = 1.0, pbc: bool = True, l_min: int = 10,
               l_max: int = 100, l_step: int = 1, convention: str = "chord", workers: int = 1,
               **config) -> EntanglementReport:
    """Overlap negativity/entropy of a block of ``l`` sites plus the asymptotic prediction."""
    occ = ground_state(build_chain(L, t, mu, pbc))
    ls = list(range(l_min, l_max + 1, l_step))
    values = _map(_chain_point, [(occ.U_occ, l) for l in ls], workers)
    rep = EntanglementReport("chain-scan")
    neg, vn = asymptotic.negativity_weight(), asymptotic.von_neumann_weight()
    k_neg, k_vn = asymptotic.correction_term(neg), asymptotic.correction_term(vn)
    c_neg, c_vn = asymptotic.weighted_integral(neg), asymptotic.weighted_integral(vn)
    common = dict(L=L, mu_over_t=mu / t, warnings=occ.warnings)
    for l, (E, S) in zip(ls, values):
        rep.add(method="overlap", measure="E", l=l, region="adjacent", value=E, **common)
        rep.add(method="overlap", measure="S", l=l, region="adjacent", value=S, **common)
        if pbc and 0 < l < L:
            p = asymptotic.AsymptoticParams(L, l, occ.n_particles)
            arg = asymptotic.log_argument(p, convention)
            region = f"adjacent/{convention}"
            rep.add(method="asymptotic", measure="E", l=l, region=region, value=c_neg * arg + k_neg, **common)
            rep.add(method="asymptotic", measure="S", l=l, region=region, value=c_vn * arg + k_vn, **common)
    return rep


# ----------------------------------------------------------- honeycomb scan


def _honeycomb_point(args) -> tuple[float, tuple[str, ...]]:
    L, t, mu = args
    h, _ = build_honeycomb(L, t, mu)
    occ = ground_state(h)
    P = overlap.region_spectrum(occ, corner_region(L, L // 3))
    return overlap.bipartite_negativity(P), occ.warnings


def honeycomb_scan(L_min: int = 9, L_max: int = 30, t: float = 1.0, mu_list: Sequence[float] = (1.0, 0.5),
                   workers: int = 1, **config) -> EntanglementReport:
    """Corner-region negativity of the periodic honeycomb lattice, ``L`` in steps of 3."""
    if L_min % 3 or L_max % 3:
        raise GeometryError(f"honeycomb sizes must be multiples of 3, got {L_min}..{L_max}")
    Ls = list(range(L_min, L_max + 1, 3))
    points = [(L, t, mu) for mu in mu_list for L in Ls]
    rep = EntanglementReport("honeycomb-scan")
    for (L, _, mu), (E, warn) in zip(points, _map(_honeycomb_point, points, workers)):
        common = dict(L=L, l=L // 3, region="corner", mu_over_t=mu / t, warnings=warn)
        rep.add(method="overlap", measure="E", value=E, **common)
        rep.add(method="overlap", measure="E/L", value=E / L, **common)
    return rep


# ---------------------------------------------------------------- verifiers


def _sorted_real_deviation(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.sort(np.real(a))[::-1], np.sort(np.real(b))[::-1]
    n = max(len(a), len(b))
    a = np.concatenate([a, np.zeros(n - len(a))])
    b = np.concatenate([b, np.zeros(n - len(b))])
    return float(np.max(np.abs(a - b))) if n else 0.0


def partial_trace_check(occ: OccupiedOrbitals, part: RegionPartition, region: str = "A") -> dict[str, Any]:
    """Fock-space ``rho_A`` against the overlap product spectrum."""
    psi = fock.ground_state_expansion(occ)
    rho_a = fock.partial_trace(fock.density_operator(psi), part, region)
    ev = fock.reduced_spectrum(rho_a)
    P = overlap.region_spectrum(occ, part, region)
    return {
        "max_dev": _sorted_real_deviation(ev, overlap.product_spectrum(P, "reduced")),
        "S_fock": fock.entanglement_entropy(rho_a),
        "S_overlap": overlap.bipartite_entropy(P),
        "fock_spectrum": ev,
        "P": P,
    }


def upt_check(occ: OccupiedOrbitals, part: RegionPartition, region: str = "B") -> dict[str, Any]:
    """Fock-space ``rho^{T_B}`` of the pure state against the per-mode product spectrum."""
    psi = fock.ground_state_expansion(occ)
    rho_t = fock.upt(fock.density_operator(psi), part, region)
    blocks = fock.block_structure(rho_t.matrix)
    ev = fock.reduced_spectrum(rho_t, blocks)
    other = "A" if region == "B" else "B"
    P = overlap.region_spectrum(occ, part, other)
    return {
        "max_dev": fock.spectral_deviation(ev, overlap.product_spectrum(P, "upt")),
        "E_fock": float(np.log(fock.trace_norm(rho_t, blocks))),
        "E_overlap": overlap.bipartite_negativity(P),
        "fock_spectrum": ev,
        "P": P,
    }


def verify_partial_trace(model: str = "chain", L: int = 12, t: float = 1.0, mu: float = 1.0,
                         pbc: bool = True, seed: int = 0, range: float = 1.0, geometry: str = "adjacent",
                         n_particles: int | None = None, **config) -> EntanglementReport:
    h = build_model(model, L, t, mu, pbc, seed, range)
    occ = ground_state(h, n_particles)
    part = chain_partition(h.shape[0], geometry)
    res = partial_trace_check(occ, part)
    rep = EntanglementReport("verify-partial-trace")
    common = dict(L=h.shape[0], l=part.size("A"), region=part.pattern(), mu_over_t=_mu_over_t(model, t, mu),
                  seed=seed if model == "random" else None, warnings=occ.warnings)
    rep.add(method="fock", measure="S", value=res["S_fock"], **common)
    rep.add(method="overlap", measure="S", value=res["S_overlap"], **common)
    rep.add(method="fock", measure="max_dev", value=res["max_dev"], **common)
    return rep


def _upt_point(args) -> tuple[dict[str, float], tuple[str, ...]]:
    model, L, t, mu, pbc, seed, rng, geometry, n_particles = args
    h = build_model(model, L, t, mu, pbc, seed, rng)
    occ = ground_state(h, n_particles)
    res = upt_check(occ, chain_partition(L, geometry))
    return {k: res[k] for k in ("max_dev", "E_fock", "E_overlap")}, occ.warnings


def verify_upt(model: str = "random", L: int = 12, t: float = 1.0, mu: float = 1.0, pbc: bool = True,
               seeds: Sequence[int] = tuple(range(20)), range: float = 1.0, geometry: str = "adjacent",
               n_particles: int | None = None, workers: int = 1, **config) -> EntanglementReport:
    """Spectrum of the fermionic partial transpose, exact vs overlap, per seed.

    Random models default to half filling ``M = L/2``.
    """
    if n_particles is None and model == "random":
        n_particles = L // 2
    part = chain_partition(L, geometry)
    seeds = list(seeds) if model == "random" else [0]
    points = [(model, L, t, mu, pbc, s, range, geometry, n_particles) for s in seeds]
    rep = EntanglementReport("verify-upt")
    for s, (res, warn) in zip(seeds, _map(_upt_point, points, workers)):
        common = dict(L=L, l=part.size("A"), region=part.pattern(), mu_over_t=_mu_over_t(model, t, mu),
                      seed=s if model == "random" else None, warnings=warn)
        rep.add(method="fock", measure="E", value=res["E_fock"], **common)
        rep.add(method="overlap", measure="E", value=res["E_overlap"], **common)
        rep.add(method="fock", measure="max_dev", value=res["max_dev"], **common)
    return rep


# ---------------------------------------------------------- tripartite audit


def tripartite_values(occ: OccupiedOrbitals, part: RegionPartition, with_fock: bool = True) -> dict[str, Any]:
    """All tripartite estimates for one state and one ``A1, A2, B`` partition."""
    tri = overlap.tripartite_overlap_negativity(occ, part)
    rk = greens.restrict_kernel(correlation_kernel(occ), part)
    out: dict[str, Any] = {
        "overlap": tri.value,
        "greens": greens.upt_negativity_gaussian(rk),
        "bound": greens.bpt_upper_bound(rk),
        "simultaneous": tri.simultaneous,
        "commutator_norms": tri.commutator_norms,
        "overlap_warnings": tri.warnings,
    }
    if with_fock:
        psi = fock.ground_state_expansion(occ)
        rho = fock.reduced_density_matrix(psi, part, ("A1", "A2"))
        sub = part.restrict(part.sites("A1", "A2"))
        out["fock"] = fock.log_negativity_exact(rho, sub, "A2", "upt")
        out["fock_bpt"] = fock.log_negativity_exact(rho, sub, "A2", "bpt")
    return out


def _tri_point(args):
    model, L, t, mu, pbc, seed, rng, geometry, n_particles = args
    h = build_model(model, L, t, mu, pbc, seed, rng)
    occ = ground_state(h, n_particles)
    part = chain_partition(h.shape[0], geometry)
    vals = tripartite_values(occ, part, with_fock=h.shape[0] <= fock.STATE_CAP)
    return vals, occ.warnings, part.pattern()


def tripartite_audit(model: str = "chain", L: int = 12, t: float = 1.0, mu: float = 1.0, pbc: bool = True,
                     seeds: Sequence[int] = (0,), range: float = 1.0, geometry: str = "tripartite",
                     n_particles: int | None = None, workers: int = 1, **config) -> EntanglementReport:
    seeds = list(seeds) if model == "random" else [0]
    points = [(model, L, t, mu, pbc, s, range, geometry, n_particles) for s in seeds]
    rep = EntanglementReport("tripartite-audit")
    for s, (vals, warn, pattern) in zip(seeds, _map(_tri_point, points, workers)):
        n = L if model != "honeycomb" else 2 * L * L
        common = dict(L=n, region=pattern, mu_over_t=_mu_over_t(model, t, mu),
                      seed=s if model == "random" else None)
        norms = tuple(f"comm[{k}]={v:.3e}" for k, v in vals["commutator_norms"].items())
        rep.add(method="overlap", measure="E", value=vals["overlap"],
                warnings=warn + vals["overlap_warnings"] + norms, **common)
        rep.add(method="greens", measure="E", value=vals["greens"], warnings=warn, **common)
        if "fock" in vals:
            rep.add(method="fock", measure="E", value=vals["fock"], warnings=warn, **common)
            rep.add(method="fock", measure="E_bPT", value=vals["fock_bpt"], warnings=warn, **common)
        rep.add(method="greens", measure="E_bound", value=vals["bound"], warnings=warn, **common)
    return rep


# ------------------------------------------------------- asymptotic compare


def asymptotic_compare(L: int = 1000, t: float = 1.0, mu: float = 0.0, l_min: int = 10, l_max: int = 500,
                       l_step: int = 10, conventions: Sequence[str] = ("chord", "system", "filling"),
                       workers: int = 1, **config) -> EntanglementReport:
    """Exact chain negativity against every asymptotic convention."""
    occ = ground_state(build_chain(L, t, mu, True))
    ls = [l for l in range(l_min, l_max + 1, l_step) if 0 < l < L]
    values = _map(_chain_point, [(occ.U_occ, l) for l in ls], workers)
    neg = asymptotic.negativity_weight()
    c, k = asymptotic.weighted_integral(neg), asymptotic.correction_term(neg)
    rep = EntanglementReport("asymptotic-compare")
    common = dict(L=L, mu_over_t=mu / t, warnings=occ.warnings)
    for l, (E, _) in zip(ls, values):
        rep.add(method="overlap", measure="E", l=l, region="adjacent", value=E, **common)
        p = asymptotic.AsymptoticParams(L, l, occ.n_particles)
        for conv in conventions:
            rep.add(method="asymptotic", measure="E", l=l, region=f"adjacent/{conv}",
                    value=c * asymptotic.log_argument(p, conv) + k, **common)
    return rep


EXPERIMENTS: dict[str, Callable[..., EntanglementReport]] = {
    "chain-scan": chain_scan,
    "honeycomb-scan": honeycomb_scan,
    "verify-partial-trace": verify_partial_trace,
    "verify-upt": verify_upt,
    "tripartite-audit": tripartite_audit,
    "asymptotic-compare": asymptotic_compare,
}
