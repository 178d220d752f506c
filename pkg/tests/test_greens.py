import numpy as np
import pytest
from scipy.linalg import block_diag

from conftest import random_occupied
from fermineg import fock
from fermineg.errors import ContractError, GeometryError
from fermineg.greens import (
    LN_SQRT2,
    RestrictedKernel,
    bpt_upper_bound,
    restrict_kernel,
    transformed_covariances,
    upt_negativity_gaussian,
)
from fermineg.model import RegionPartition, adjacent_bipartition, build_chain
from fermineg.overlap import bipartite_negativity, region_spectrum
from fermineg.spectrum import OccupiedOrbitals, correlation_kernel, ground_state


def _exact_tripartite(occ, part):
    psi = fock.ground_state_expansion(occ)
    rho = fock.reduced_density_matrix(psi, part, ("A1", "A2"))
    sub = part.restrict(part.sites("A1", "A2"))
    return fock.log_negativity_exact(rho, sub, "A2")


def test_empty_a2_gives_a1_block():
    occ = ground_state(build_chain(8, 1, 0.2))
    K = correlation_kernel(occ)
    part = RegionPartition.from_sites(8, {"A1": [0, 1, 2], "A2": []}, rest="B", allow_empty={"A2"})
    rk = restrict_kernel(K, part)
    np.testing.assert_array_equal(rk.K, K[:3, :3])
    assert rk.n2 == 0
    assert upt_negativity_gaussian(rk) == pytest.approx(0, abs=1e-12)


def test_empty_kernel():
    assert upt_negativity_gaussian(RestrictedKernel(np.zeros((0, 0)), 0)) == 0.0


def test_full_system_kernel_is_projector():
    occ = ground_state(build_chain(10, 1, 0.4))
    rk = restrict_kernel(correlation_kernel(occ), RegionPartition.from_pattern("1111122222"))
    ev = np.linalg.eigvalsh(rk.K)
    assert np.all(np.minimum(np.abs(ev), np.abs(ev - 1)) < 1e-10)


def test_block_diagonal_kernel_stays_block_diagonal():
    h = block_diag(build_chain(4, 1, 0.3), build_chain(4, 1, -0.1))
    K = correlation_kernel(ground_state(h))
    rk = restrict_kernel(K, RegionPartition.from_pattern("11BB22BB"))
    assert np.all(rk.K[:2, 2:] == 0)


def test_overlapping_regions_rejected():
    part = RegionPartition.from_pattern("1B2B")
    with pytest.raises(GeometryError):
        restrict_kernel(np.eye(4), part, ("A1", "A1"))


@pytest.mark.parametrize("l", [3, 6, 8])
def test_pure_bipartite_matches_overlap(l):
    occ = ground_state(build_chain(12, 1, 1))
    pattern = "1" * l + "2" * (12 - l)
    rk = restrict_kernel(correlation_kernel(occ), RegionPartition.from_pattern(pattern))
    expected = bipartite_negativity(region_spectrum(occ, adjacent_bipartition(12, l)))
    assert upt_negativity_gaussian(rk) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize("pattern", ["111BBB222BBB", "11BB22BB1122", "1111BB2222BB", "12B12B12B12B"])
def test_tripartite_matches_fock(pattern):
    occ = ground_state(build_chain(12, 1, 1))
    part = RegionPartition.from_pattern(pattern)
    rk = restrict_kernel(correlation_kernel(occ), part)
    assert upt_negativity_gaussian(rk) == pytest.approx(_exact_tripartite(occ, part), abs=1e-8)


@pytest.mark.parametrize("seed", range(3))
def test_tripartite_random_states_match_fock(seed):
    occ = random_occupied(10, 5, seed)
    part = RegionPartition.from_pattern("1B2B12BB21")
    rk = restrict_kernel(correlation_kernel(occ), part)
    assert upt_negativity_gaussian(rk) == pytest.approx(_exact_tripartite(occ, part), abs=1e-8)


def test_product_state_bound():
    U = np.zeros((4, 2), dtype=complex)
    U[0, 0] = U[3, 1] = 1
    occ = OccupiedOrbitals(U, np.zeros(2))
    rk = restrict_kernel(correlation_kernel(occ), RegionPartition.from_pattern("1122"))
    assert bpt_upper_bound(rk) == pytest.approx(LN_SQRT2, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_bound_holds_for_ten_site_samples(seed):
    occ = random_occupied(10, 4, 50 + seed)
    part = RegionPartition.from_pattern("11B22B1B2B")
    psi = fock.ground_state_expansion(occ)
    rho = fock.reduced_density_matrix(psi, part, ("A1", "A2"))
    sub = part.restrict(part.sites("A1", "A2"))
    e_bpt = fock.log_negativity_exact(rho, sub, "A2", "bpt")
    assert e_bpt <= bpt_upper_bound(restrict_kernel(correlation_kernel(occ), part)) + 1e-8


def test_transformed_covariances_structure():
    occ = ground_state(build_chain(8, 1, 0.5))
    rk = restrict_kernel(correlation_kernel(occ), RegionPartition.from_pattern("11BB22BB"))
    cov = transformed_covariances(rk)
    n1 = rk.n1
    np.testing.assert_allclose(cov.gamma_plus[:n1, :n1], -cov.gamma[:n1, :n1])
    np.testing.assert_allclose(cov.gamma_plus[n1:, n1:], cov.gamma[n1:, n1:])
    np.testing.assert_allclose(cov.gamma_plus[:n1, n1:], 1j * cov.gamma[:n1, n1:])
    np.testing.assert_allclose(cov.gamma_minus[:n1, n1:], -1j * cov.gamma[:n1, n1:])


def test_transform_is_well_conditioned():
    # 1 + G+ G- is unitarily similar to 1 + Gamma^2, eigenvalues in [1, 2]
    occ = random_occupied(9, 4, 21)
    rk = restrict_kernel(correlation_kernel(occ), RegionPartition.from_pattern("112B2B1B2"))
    cov = transformed_covariances(rk)
    assert np.linalg.cond(np.eye(rk.K.shape[0]) + cov.gamma_plus @ cov.gamma_minus) <= 2 + 1e-12


def test_stable_form_matches_eigenvalue_form():
    # generic mixed case: no pure modes, so the textbook form is accurate
    occ = random_occupied(10, 5, 22)
    rk = restrict_kernel(correlation_kernel(occ), RegionPartition.from_pattern("1B2B1B2B12"))
    nu = np.linalg.eigvals(transformed_covariances(rk).gamma_cross)
    g = np.linalg.eigvalsh(np.eye(rk.K.shape[0]) - 2 * rk.K.conj())
    textbook = np.sum(np.log(np.sqrt((1 + nu) / 2) + np.sqrt((1 - nu) / 2))) + 0.5 * np.sum(np.log((1 + g**2) / 2))
    assert abs(textbook.imag) < 1e-10
    assert upt_negativity_gaussian(rk) == pytest.approx(textbook.real, abs=1e-10)


def test_non_projector_kernel_rejected():
    with pytest.raises(ContractError):
        upt_negativity_gaussian(RestrictedKernel(np.diag([1.5, 0.2]).astype(complex), 1))
