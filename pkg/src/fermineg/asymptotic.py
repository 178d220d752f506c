"""Fisher-Hartwig asymptotics for a contiguous block of a periodic chain.

A bipartite measure that is a sum ``sum_gamma f(P_gamma)`` over overlap-matrix
eigenvalues behaves for large systems as::

    E ~ c_f * log_argument + k_f

with the weight coefficient ``c_f = (1/pi^2) int_0^1 f(x) / (x (1 - x)) dx``
(:func:`weighted_integral`) and the next-to-leading constant::

    k_f = (1 / (2 pi^2)) int_0^1 f(x) / (x (x - 1))
          [psi(1/2 - i W(x)) + psi(1/2 + i W(x))] dx,
    W(x) = ln((1 - x) / x) / (2 pi)

(:func:`correction_term`).  Three choices of the logarithm are offered by
:func:`leading_term`; see :data:`CONVENTIONS`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import AccuracyError, DomainError, GeometryError

EULER_GAMMA = 0.57721566490153286061

# B_2k / (2k) for k = 1..8
_ASYMPTOTIC_COEFFS = np.array(
    [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510]
) / (2 * np.arange(1, 9))
_SHIFT_RADIUS = 12.0


def digamma_complex(z):
    """Digamma function ``psi(z) = d ln Gamma(z) / dz`` for complex arguments.

    Uses reflection for ``Re z < 1/2``, the recurrence
    ``psi(z) = psi(z + 1) - 1/z`` until ``|z| >= 12`` and then the asymptotic
    series through ``B_16``.  Accepts scalars or arrays.

    Raises
    ------
    DomainError
        At the poles ``z = 0, -1, -2, ...``.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise DomainError(f"digamma has a pole at {z[pole][0].real:g}")
    reflect = z.real < 0.5
    w = np.where(reflect, 1 - z, z)
    acc = np.zeros_like(w)
    small = np.abs(w) < _SHIFT_RADIUS
    while np.any(small):
        acc[small] -= 1 / w[small]
        w[small] += 1
        small = np.abs(w) < _SHIFT_RADIUS
    inv2 = 1 / (w * w)
    series = np.zeros_like(w)
    for c in _ASYMPTOTIC_COEFFS[::-1]:
        series = (series + c) * inv2
    out = np.log(w) - 0.5 / w - series + acc
    if np.any(reflect):
        # cot has period 1; reducing first keeps pi*z exact near distant poles
        zr = z[reflect]
        zr = zr - np.round(zr.real)
        out[reflect] -= np.pi / np.tan(np.pi * zr)
    return out[0] if scalar else out


@dataclass(frozen=True)
class WeightFunction:
    """Per-mode contribution ``f(P)`` of a bipartite measure.

    ``evaluator(x, y)`` receives ``x`` and ``y = 1 - x`` separately so that
    both endpoints can be resolved without cancellation.
    """

    name: str
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, x, y=None):
        x = np.asarray(x, dtype=float)
        y = 1.0 - x if y is None else np.asarray(y, dtype=float)
        return self.evaluator(x, y)


def negativity_weight() -> WeightFunction:
    return WeightFunction("negativity", lambda x, y: np.log1p(2 * np.sqrt(x * y)))


def _xlogx(x):
    return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


def von_neumann_weight() -> WeightFunction:
    return WeightFunction("vonNeumann", lambda x, y: -_xlogx(x) - _xlogx(y))


def renyi_weight(n: float) -> WeightFunction:
    if n <= 0 or n == 1:
        raise ValueError(f"Renyi order must be positive and != 1, got {n}")
    return WeightFunction(f"renyi({n:g})", lambda x, y: np.log(x**n + y**n) / (1 - n))


def weight_by_name(name: str) -> WeightFunction:
    """``negativity``, ``vonNeumann`` or ``renyi(n)``."""
    if name == "negativity":
        return negativity_weight()
    if name in ("vonNeumann", "von_neumann", "S"):
        return von_neumann_weight()
    if name.startswith("renyi(") and name.endswith(")"):
        return renyi_weight(float(name[6:-1]))
    raise ValueError(f"unknown weight function {name!r}")


def _theta_integral(g: Callable[[float], float], half: bool, tol: float) -> float:
    """Integrate ``g(theta)`` over ``(0, pi/2)``, or twice over ``(0, pi/4)``."""
    upper = np.pi / 4 if half else np.pi / 2
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(g, 0.0, upper, epsabs=1e-12, epsrel=1e-12, limit=500)
        except IntegrationWarning as exc:
            # quad flags roundoff at the 1e-12 request; accept if the
            # relaxed request converges within tolerance
            val, err = quad(g, 0.0, upper, epsabs=tol / 10, epsrel=0.0, limit=500)
            if not err <= tol:
                raise AccuracyError(f"quadrature did not converge: {exc}") from exc
    if not err <= tol:
        raise AccuracyError(f"quadrature error estimate {err:.2e} exceeds {tol:.0e}")
    return 2 * val if half else val


def _sin2(theta: float) -> tuple[float, float]:
    return np.sin(theta) ** 2, np.cos(theta) ** 2


def weighted_integral(w: WeightFunction, half: bool = False, tol: float = 1e-8) -> float:
    """``(1/pi^2) int_0^1 f(x) / (x (1 - x)) dx``.

    The substitution ``x = sin^2(theta)`` turns the measure into
    ``4 dtheta / sin(2 theta)`` and removes the endpoint singularities.
    ``half=True`` integrates ``theta`` over ``(0, pi/4)`` and doubles, using
    ``f(x) = f(1 - x)``.
    """

    def g(theta):
        x, y = _sin2(theta)
        s = np.sin(2 * theta)
        return float(w(x, y)) * 4.0 / s if s > 0 else 0.0

    return _theta_integral(g, half, tol) / np.pi**2


def correction_term(w: WeightFunction, half: bool = False, tol: float = 1e-8) -> float:
    """Next-to-leading constant (the digamma integral of the module docstring)."""

    def g(theta):
        x, y = _sin2(theta)
        s = np.sin(2 * theta)
        if s <= 0 or x <= 0 or y <= 0:
            return 0.0
        W = np.log(y / x) / (2 * np.pi)
        psi_sum = 2.0 * digamma_complex(0.5 + 1j * W).real
        # 1 / (x (x - 1)) dx = -4 dtheta / sin(2 theta)
        return float(w(x, y)) * (-4.0 / s) * psi_sum

    return _theta_integral(g, half, tol) / (2 * np.pi**2)


@dataclass(frozen=True)
class AsymptoticParams:
    """Chain of ``L`` sites, block of ``l`` sites, ``n_particles`` fermions.

    ``n_particles=None`` means half filling, ``M = L/2``.
    """

    L: int
    l: int
    n_particles: int | None = None

    def __post_init__(self):
        if not 0 < self.l < self.L:
            raise GeometryError(f"block size must satisfy 0 < l < L, got l={self.l}, L={self.L}")
        if self.n_particles is not None and not 0 < self.n_particles < self.L:
            raise GeometryError(f"particle number must satisfy 0 < M < L, got {self.n_particles}")

    @property
    def M(self) -> float:
        return self.L / 2 if self.n_particles is None else self.n_particles

    @property
    def k_F(self) -> float:
        """Arc ``2 pi l / L`` of the overlap-matrix symbol."""
        return 2 * np.pi * self.l / self.L

    @property
    def fermi_momentum(self) -> float:
        return np.pi * self.M / self.L


CONVENTIONS = {
    "system": "ln L + ln(2|sin(k_F/2)|)",
    "filling": "ln M + ln(2|sin(k_F/2)|)",
    "chord": "ln((L/pi) sin(pi l/L)) + ln(2 sin(pi M/L))",
}
"""Logarithm multiplying the weight coefficient.

``system`` and ``filling`` use the overlap-matrix symbol (an arc of length
``k_F`` on an ``M x M`` Toeplitz matrix) with the system size or the matrix
dimension as the large parameter.  ``chord`` is the finite periodic chain
form: chord length ``(L/pi) sin(pi l/L)`` and Fermi momentum ``pi M / L``.
The two symbol forms treat the lattice sum defining the overlap matrix as an
integral, which is not accurate when ``l`` is a finite fraction of ``L``; at
half filling ``system`` exceeds ``chord`` by exactly ``ln(pi)``.
"""


def log_argument(p: AsymptoticParams, convention: str = "chord") -> float:
    s = abs(np.sin(p.k_F / 2))
    if convention == "system":
        return float(np.log(p.L) + np.log(2 * s))
    if convention == "filling":
        return float(np.log(p.M) + np.log(2 * s))
    if convention == "chord":
        return float(np.log(p.L / np.pi * s) + np.log(2 * abs(np.sin(p.fermi_momentum))))
    raise ValueError(f"unknown convention {convention!r}; choose from {sorted(CONVENTIONS)}")


def leading_term(p: AsymptoticParams, w: WeightFunction, convention: str = "chord") -> float:
    """``weighted_integral(w) * log_argument(p, convention)``."""
    return weighted_integral(w) * log_argument(p, convention)


def prediction(p: AsymptoticParams, w: WeightFunction, convention: str = "chord") -> float:
    """Leading term plus the digamma correction."""
    return leading_term(p, w, convention) + correction_term(w)
