"""Shared fixtures and brute-force oracles.

The oracles here build fermion operators explicitly as ``2^N x 2^N`` matrices
through the Jordan-Wigner map, with site 0 as the most significant bit, so
they share no code with the library's Fock routines.
"""

from functools import reduce
from itertools import product

import numpy as np
import pytest

from fermineg.model import RandomModelSpec, build_random_hopping
from fermineg.spectrum import OccupiedOrbitals, ground_state

_Z = np.diag([1.0, -1.0])
_I = np.eye(2)
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1| annihilates


def annihilators(n):
    """Jordan-Wigner ``c_j`` with strings on the sites before ``j``."""
    ops = []
    for j in range(n):
        factors = [_Z] * j + [_LOWER] + [_I] * (n - j - 1)
        ops.append(reduce(np.kron, factors).astype(complex))
    return ops


def slater_state(U_occ):
    """``f_1^dag ... f_M^dag |0>`` by repeated operator application."""
    n, m = U_occ.shape
    c = annihilators(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    for alpha in reversed(range(m)):
        f_dag = sum(U_occ[i, alpha] * c[i].conj().T for i in range(n))
        psi = f_dag @ psi
    return psi


def majoranas(n):
    c = annihilators(n)
    out = []
    for cj in c:
        out.append(cj + cj.conj().T)
        out.append(1j * (cj.conj().T - cj))
    return out


def upt_by_majorana_expansion(rho, transposed_sites):
    """Fermionic partial transpose ``a_k -> i a_k`` for Majoranas on ``transposed_sites``.

    ``rho`` is expanded in the orthogonal basis of ordered Majorana monomials;
    each monomial picks up ``i`` per Majorana on a transposed site.
    """
    dim = rho.shape[0]
    n = int(np.log2(dim))
    a = majoranas(n)
    on_b = np.array([(k // 2) in set(transposed_sites) for k in range(2 * n)])
    out = np.zeros_like(rho, dtype=complex)
    for bits in product((0, 1), repeat=2 * n):
        mono = np.eye(dim, dtype=complex)
        for k, b in enumerate(bits):
            if b:
                mono = mono @ a[k]
        w = np.trace(mono.conj().T @ rho) / dim
        if w == 0:
            continue
        out += (1j ** int(np.sum(on_b & np.array(bits, bool)))) * w * mono
    return out


def random_occupied(n, m, seed, real=False):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, n))
    if not real:
        z = z + 1j * rng.normal(size=(n, n))
    q, _ = np.linalg.qr(z)
    return OccupiedOrbitals(q[:, :m].astype(complex), np.zeros(m))


@pytest.fixture
def random_ground_state():
    def make(n, seed, m=None):
        h = build_random_hopping(RandomModelSpec(n, seed))
        return ground_state(h, n // 2 if m is None else m)

    return make
