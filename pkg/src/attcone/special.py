"""Special functions and the integral identities behind the transform multipliers.

Each identity is exposed as a closed form and as an :class:`IdentityCheck`
that compares the closed form against an independent numerical quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy import special as _sp

from .errors import DomainError, SingularityError

SUPPORTED_ORDERS = (-0.5, 0.0, 0.5, 1.0)
REL_FLOOR = 1e-300
_TAIL_EPS = 1e-16


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex
    rel_error: float

    @classmethod
    def compare(cls, lhs, rhs):
        rel = abs(lhs - rhs) / max(abs(rhs), REL_FLOOR)
        return cls(lhs=lhs, rhs=rhs, rel_error=float(rel))


def gamma(x):
    """Gamma function for real ``x > 0``."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"gamma requires a finite x > 0, got {x}")
    return math.gamma(x)


def _check_order(nu):
    nu = float(nu)
    for supported in SUPPORTED_ORDERS:
        if nu == supported:
            return supported
    raise DomainError(f"Bessel order {nu} not supported; use one of {SUPPORTED_ORDERS}")


def bessel_j(nu, x):
    """Bessel function of the first kind for orders -1/2, 0, 1/2 and 1.

    Half-integer orders use the closed trigonometric forms; integer orders
    are delegated to the Cephes routines in scipy.
    """
    nu = _check_order(nu)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("bessel_j requires x >= 0")
    if nu == 0.0:
        out = _sp.j0(x_arr)
    elif nu == 1.0:
        out = _sp.j1(x_arr)
    elif nu == 0.5:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x_arr > 0, np.sqrt(2.0 / (np.pi * x_arr)) * np.sin(x_arr), 0.0)
    else:
        if np.any(x_arr == 0):
            raise SingularityError("J_{-1/2} is singular at x = 0")
        out = np.sqrt(2.0 / (np.pi * x_arr)) * np.cos(x_arr)
    return float(out) if np.ndim(out) == 0 else out


def sqrt_x_bessel(nu, x):
    """``sqrt(x) * J_nu(x)``, finite at ``x = 0`` for every supported order."""
    nu = _check_order(nu)
    x_arr = np.asarray(x, dtype=float)
    if nu == 0.5:
        out = math.sqrt(2.0 / math.pi) * np.sin(x_arr)
    elif nu == -0.5:
        out = math.sqrt(2.0 / math.pi) * np.cos(x_arr)
    else:
        out = np.sqrt(x_arr) * bessel_j(nu, x_arr)
    return float(out) if np.ndim(out) == 0 else out


def _check_angle(psi):
    if not 0.0 < psi < math.pi / 2:
        raise DomainError(f"opening angle must lie in (0, pi/2), got {psi}")


def alpha_n(n, psi):
    """Constant of the cone-transform multiplier."""
    _check_angle(psi)
    if n < 1 or int(n) != n:
        raise DomainError(f"dimension must be an integer >= 1, got {n}")
    n = int(n)
    return (2.0**n * math.pi ** ((n - 1) / 2) * gamma((n + 1) / 2)
            * math.tan(psi) ** (n - 1) / math.cos(psi))


def beta_n(n, psi):
    """Constant of the auxiliary-transform multiplier (undefined for n = 1)."""
    _check_angle(psi)
    if int(n) != n or n <= 1:
        raise DomainError(f"beta_n needs an integer n >= 2 (Gamma(0) pole at n = 1), got {n}")
    n = int(n)
    return (2.0 ** (n - 1) * math.pi ** ((n - 1) / 2) * gamma((n - 1) / 2)
            * math.tan(psi) ** (n - 1) / math.cos(psi))


# ---------------------------------------------------------------------------
# Plane wave averaged over the sphere
# ---------------------------------------------------------------------------

def sphere_plane_wave_closed(n, sigma):
    """``(2 pi)^{n/2} sigma^{(2-n)/2} J_{(n-2)/2}(sigma)`` with its sigma -> 0 limit."""
    if n not in (2, 3):
        raise DomainError(f"sphere identity implemented for n in {{2, 3}}, got {n}")
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    if n == 2:
        return 2.0 * math.pi * bessel_j(0.0, sigma)
    if sigma == 0:
        return 4.0 * math.pi
    return (2.0 * math.pi) ** 1.5 * sigma**-0.5 * bessel_j(0.5, sigma)


def _sphere_nodes(n, resolution):
    if n == 2:
        phi = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        weights = np.full(resolution, 2.0 * np.pi / resolution)
        return nodes, weights
    m = resolution
    p = 2 * resolution
    s, ws = np.polynomial.legendre.leggauss(m)
    phi = 2.0 * np.pi * np.arange(p) / p
    S, PHI = np.meshgrid(s, phi, indexing="ij")
    rho = np.sqrt(1.0 - S**2)
    nodes = np.stack([rho * np.cos(PHI), rho * np.sin(PHI), S], axis=-1).reshape(-1, 3)
    weights = np.repeat(ws, p) * (2.0 * np.pi / p)
    return nodes, weights


def funk_hecke_check(n, sigma, resolution=None):
    """Sphere quadrature of ``exp(-i sigma theta . omega)`` against the closed form.

    ``theta`` is a fixed non-axis-aligned unit vector. ``n = 2`` uses the
    trapezoid rule on the circle (default 2048 nodes); ``n = 3`` uses a
    Gauss-Legendre x uniform product rule (default 64 x 128 nodes).
    """
    rhs = sphere_plane_wave_closed(n, sigma)
    if n == 2:
        theta = np.array([math.cos(0.3), math.sin(0.3)])
        nodes, w = _sphere_nodes(2, resolution or 2048)
    else:
        theta = np.array([1.0, 2.0, 2.0]) / 3.0
        nodes, w = _sphere_nodes(3, resolution or 64)
    lhs = complex(np.sum(w * np.exp(-1j * sigma * (nodes @ theta))))
    return IdentityCheck.compare(lhs, complex(rhs))


# ---------------------------------------------------------------------------
# Laplace transforms of Bessel functions
# ---------------------------------------------------------------------------

def laplace_hankel_a_closed(nu, a, y):
    """Closed form of ``int_0^inf x^{nu+1/2} e^{-ax} J_nu(xy) (xy)^{1/2} dx``.

    ``a`` may be complex with positive real part (principal branch powers).
    """
    a = complex(a)
    p = nu + 1.5
    val = (math.pi**-0.5 * 2.0 ** (nu + 1) * gamma(nu + 1.5) * a * y ** (nu + 0.5)
           * np.exp(-p * np.log(a * a + y * y)))
    return float(val.real) if a.imag == 0 else complex(val)


def laplace_hankel_b_closed(nu, a, y):
    """Closed form of ``int_0^inf x^{nu-1/2} e^{-ax} J_nu(xy) (xy)^{1/2} dx``."""
    a = complex(a)
    p = nu + 0.5
    val = (math.pi**-0.5 * 2.0**nu * gamma(nu + 0.5) * y ** (nu + 0.5)
           * np.exp(-p * np.log(a * a + y * y)))
    return float(val.real) if a.imag == 0 else complex(val)


def _laplace_quadrature(integrand, a, y):
    # Split at the Bessel half-periods so each adaptive call sees at most
    # one oscillation; the tail beyond e^{-ax} < 1e-16 is dropped.
    x_max = -math.log(_TAIL_EPS) / a
    step = math.pi / y if y > 0 else x_max
    edges = np.arange(0.0, x_max, step)
    edges = np.append(edges, x_max)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)
        total += val
    return total


def _check_laplace_args(nu, a, y, nu_min):
    _check_order(nu)
    if not a > 0:
        raise DomainError(f"a must be > 0, got {a}")
    if not y > 0:
        raise DomainError(f"y must be > 0, got {y}")
    if not nu > nu_min:
        raise DomainError(f"order must exceed {nu_min}, got {nu}")


def laplace_hankel_a(nu, a, y):
    """Adaptive quadrature of the first Laplace-Hankel identity vs its closed form."""
    _check_laplace_args(nu, a, y, -1.0)

    def integrand(x):
        return x ** (nu + 0.5) * math.exp(-a * x) * sqrt_x_bessel(nu, x * y)

    lhs = _laplace_quadrature(integrand, a, y)
    return IdentityCheck.compare(lhs, laplace_hankel_a_closed(nu, a, y))


def laplace_hankel_b(nu, a, y):
    """Adaptive quadrature of the second Laplace-Hankel identity vs its closed form."""
    _check_laplace_args(nu, a, y, -0.5)

    def integrand(x):
        if x == 0.0:
            # x^{nu-1/2} (xy)^{1/2} J_nu(xy) ~ x^{2 nu} y^{nu+1/2} / (2^nu Gamma(nu+1))
            return y**0.5 if nu == 0.0 else 0.0
        return x ** (nu - 0.5) * math.exp(-a * x) * sqrt_x_bessel(nu, x * y)

    lhs = _laplace_quadrature(integrand, a, y)
    return IdentityCheck.compare(lhs, laplace_hankel_b_closed(nu, a, y))


SWEEP_A = (0.5, 1.0, 2.0)
SWEEP_Y = (0.5, 1.0, 2.0, 4.0)
SWEEP_SIGMA = (0.0, 0.5, 1.0, 5.0, 10.0)


def identity_sweep():
    """Run every identity over the standard parameter grid.

    Returns a list of dict rows with keys ``identity, order, a, arg, lhs, rhs,
    rel_error``; ``arg`` is ``y`` for the Laplace-Hankel rows and ``sigma``
    for the sphere rows (whose ``order`` column holds the dimension).
    """
    rows = []
    for n in (2, 3):
        for sigma in SWEEP_SIGMA:
            chk = funk_hecke_check(n, sigma)
            rows.append(dict(identity="funk_hecke", order=n, a=float("nan"), arg=sigma,
                             lhs=chk.lhs.real, rhs=chk.rhs.real, rel_error=chk.rel_error))
    for name, fn, orders in (("laplace_hankel_a", laplace_hankel_a, SUPPORTED_ORDERS),
                             ("laplace_hankel_b", laplace_hankel_b, SUPPORTED_ORDERS[1:])):
        for nu in orders:
            for a in SWEEP_A:
                for y in SWEEP_Y:
                    chk = fn(nu, a, y)
                    rows.append(dict(identity=name, order=nu, a=a, arg=y,
                                     lhs=chk.lhs, rhs=chk.rhs, rel_error=chk.rel_error))
    return rows
