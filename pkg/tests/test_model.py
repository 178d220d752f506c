import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fermineg.errors import ContractError, GeometryError
from fermineg.model import (
    HoneycombGeometry,
    RandomModelSpec,
    RegionPartition,
    adjacent_bipartition,
    build_chain,
    build_honeycomb,
    build_random_hopping,
    check_hermitian,
    corner_region,
)


def test_chain_l4_matrix_elements():
    h = build_chain(4, t=1, mu=1, pbc=True)
    expected = np.array(
        [[-1, -1, 0, -1], [-1, -1, -1, 0], [0, -1, -1, -1], [-1, 0, -1, -1]], dtype=float
    )
    np.testing.assert_array_equal(h.real, expected)
    assert not np.any(h.imag)


def test_chain_two_sites_open():
    ev = np.linalg.eigvalsh(build_chain(2, t=1, mu=0, pbc=False))
    np.testing.assert_allclose(ev, [-1, 1], atol=1e-14)


@pytest.mark.parametrize("L,t,mu", [(12, 1.0, 1.0), (7, 0.5, -0.3), (30, 2.0, 0.0)])
def test_chain_dispersion(L, t, mu):
    k = np.arange(L)
    analytic = np.sort(-mu - 2 * t * np.cos(2 * np.pi * k / L))
    np.testing.assert_allclose(np.linalg.eigvalsh(build_chain(L, t, mu)), analytic, atol=1e-12)


def test_chain_open_boundary_has_no_wrap_bond():
    h = build_chain(5, pbc=False)
    assert h[0, 4] == 0 and h[4, 0] == 0


@pytest.mark.parametrize("L,t", [(1, 1.0), (0, 1.0), (4, 0.0), (4, -1.0)])
def test_chain_rejects_bad_geometry(L, t):
    with pytest.raises(GeometryError):
        build_chain(L, t)


def test_honeycomb_coordination():
    h, geo = build_honeycomb(3, t=1, mu=0)
    assert geo.n_sites == 18
    off = h - np.diag(np.diag(h))
    assert np.all(np.count_nonzero(off, axis=1) == 3)
    np.testing.assert_array_equal(off[off != 0], -1)


def test_honeycomb_particle_hole_symmetric():
    ev = np.linalg.eigvalsh(build_honeycomb(3, t=1, mu=0)[0])
    np.testing.assert_allclose(ev, -ev[::-1], atol=1e-12)


def test_honeycomb_trace():
    h, geo = build_honeycomb(6, t=1, mu=1)
    assert geo.n_sites == 72
    assert np.trace(h).real == pytest.approx(-72)


def test_honeycomb_dirac_points_at_zero_energy():
    # L divisible by 3 samples the K points, where the two bands touch
    ev = np.linalg.eigvalsh(build_honeycomb(6)[0])
    assert np.sum(np.abs(ev) < 1e-10) == 4


def test_honeycomb_bands_match_bloch_oracle():
    L, t = 6, 1.3
    ev = np.linalg.eigvalsh(build_honeycomb(L, t)[0])
    k = 2 * np.pi * np.arange(L) / L
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    f = np.abs(1 + np.exp(1j * k1) + np.exp(1j * k2)).ravel()
    np.testing.assert_allclose(ev, np.sort(np.concatenate([-t * f, t * f])), atol=1e-12)


def test_honeycomb_requires_multiple_of_three():
    with pytest.raises(GeometryError):
        build_honeycomb(4)


def test_honeycomb_index_wraps():
    geo = HoneycombGeometry(3)
    assert geo.index(3, -1, 1) == geo.index(0, 2, 1)


@pytest.mark.parametrize("L,l,size_a", [(3, 1, 2), (6, 2, 8), (9, 3, 18)])
def test_corner_region_counts(L, l, size_a):
    part = corner_region(L, l)
    assert part.size("A") == size_a
    assert part.size("A") + part.size("B") == 2 * L * L
    combined = np.sort(np.concatenate([part.sites("A"), part.sites("B")]))
    np.testing.assert_array_equal(combined, np.arange(2 * L * L))


def test_corner_region_l6():
    assert corner_region(6, 2).size("B") == 64


def test_corner_region_needs_third_of_edge():
    with pytest.raises(GeometryError):
        corner_region(9, 2)


def test_random_hopping_exactly_hermitian():
    h = build_random_hopping(RandomModelSpec(12, 3))
    assert np.array_equal(h, h.conj().T)


def test_random_hopping_deterministic():
    a = build_random_hopping(RandomModelSpec(12, 11, 0.7))
    b = build_random_hopping(RandomModelSpec(12, 11, 0.7))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, build_random_hopping(RandomModelSpec(12, 12, 0.7)))


def test_random_hopping_real_spectrum():
    ev = np.linalg.eigvals(build_random_hopping(RandomModelSpec(12, 7)))
    assert np.max(np.abs(ev.imag)) < 1e-12


@given(st.integers(0, 2**32), st.floats(0.1, 5.0))
@settings(max_examples=25, deadline=None)
def test_random_hopping_entries_within_range(seed, r):
    h = build_random_hopping(RandomModelSpec(6, seed, r))
    assert np.max(np.abs(h.real)) <= r and np.max(np.abs(h.imag)) <= r


@pytest.mark.parametrize("kw", [dict(n_sites=0, seed=0), dict(n_sites=3, seed=-1), dict(n_sites=3, seed=0, range=0)])
def test_random_spec_validation(kw):
    with pytest.raises(GeometryError):
        RandomModelSpec(**kw)


def test_check_hermitian_rejects():
    with pytest.raises(ContractError):
        check_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


class TestRegionPartition:
    def test_pattern_round_trip(self):
        for pattern in ("AABB", "11BB22", "1B2B", "AAAA"):
            assert RegionPartition.from_pattern(pattern).pattern() == pattern

    def test_tripartite_regions(self):
        part = RegionPartition.from_pattern("11BB22")
        assert part.regions == ("A1", "A2", "B")
        np.testing.assert_array_equal(part.sites("A1", "A2"), [0, 1, 4, 5])

    def test_mixed_labels_rejected(self):
        with pytest.raises(GeometryError):
            RegionPartition.from_pattern("A1B")

    def test_bad_characters_rejected(self):
        with pytest.raises(GeometryError):
            RegionPartition.from_pattern("AXB")

    def test_double_assignment_rejected(self):
        with pytest.raises(GeometryError):
            RegionPartition.from_sites(4, {"A": [0, 1], "C": [1]}, rest="B")

    def test_unknown_region(self):
        with pytest.raises(GeometryError):
            adjacent_bipartition(4, 2).sites("Q")

    def test_empty_region_needs_permission(self):
        with pytest.raises(GeometryError):
            RegionPartition(("A", "A"), ("A", "C"))
        part = RegionPartition(("A", "A"), ("A", "C"), frozenset({"C"}))
        assert part.size("C") == 0

    def test_restrict_reindexes(self):
        part = RegionPartition.from_pattern("1BB2B")
        sub = part.restrict(part.sites("A1", "A2"))
        assert sub.labels == ("A1", "A2") and sub.n_sites == 2

    def test_adjacent_bounds(self):
        with pytest.raises(GeometryError):
            adjacent_bipartition(4, 0)
        assert adjacent_bipartition(4, 4).size("B") == 0
