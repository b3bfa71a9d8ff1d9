"""Attenuated cone transform and its auxiliary transform.

Two independent routes are provided for each operator:

* direct quadrature of the cone integral, evaluating the analytic phantom on
  the cone surface (apex ``(u, v)``, axis along +z, half-opening ``psi``,
  weight ``exp(-mu z / cos psi) z^p`` with ``p = n-1`` or ``n-2``);
* spectral application of the closed-form Fourier multipliers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, GeometryError
from .fields import GridSpec, ScalarField, apply_multiplier
from .special import alpha_n, beta_n
from .threads import numba_threads

DENOM_GUARD = 1e-12
EPS_WRAP = 1e-10
GL_PANEL_POINTS = 16


@dataclass(frozen=True)
class TransformParams:
    mu: float
    psi: float
    n: int

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"attenuation mu must be > 0, got {self.mu}")
        if not 0.0 < self.psi < math.pi / 2:
            raise DomainError(f"opening angle psi must lie in (0, pi/2), got {self.psi}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n}")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "psi", float(self.psi))
        object.__setattr__(self, "n", int(self.n))

    @property
    def a(self):
        """Attenuation per unit height, ``mu / cos(psi)``."""
        return self.mu / math.cos(self.psi)

    @property
    def t(self):
        return math.tan(self.psi)

    @property
    def k(self):
        return (self.n + 1) // 2 if self.n % 2 else self.n // 2

    @property
    def alpha(self):
        return alpha_n(self.n, self.psi)

    @property
    def beta(self):
        return beta_n(self.n, self.psi)

    @property
    def prefactor(self):
        return self.t ** (self.n - 1) / math.cos(self.psi)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def sphere_rule(n, resolution=None):
    """Nodes and weights on the unit sphere ``S^{n-1}``.

    n = 1: the two points +-1. n = 2: uniform trapezoid (default 256 nodes).
    n = 3: Gauss-Legendre in ``cos(theta)`` times uniform azimuth, default
    22 x 44 nodes (exact for spherical polynomials of degree 43).
    """
    if n == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if n == 2:
        m = resolution or 256
        phi = 2.0 * np.pi * np.arange(m) / m
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(m, 2.0 * np.pi / m)
    if n == 3:
        m = resolution or 22
        s, ws = np.polynomial.legendre.leggauss(m)
        p = 2 * m
        phi = 2.0 * np.pi * np.arange(p) / p
        S, PHI = np.meshgrid(s, phi, indexing="ij")
        rho = np.sqrt(1.0 - S**2)
        nodes = np.stack([rho * np.cos(PHI), rho * np.sin(PHI), S], axis=-1).reshape(-1, 3)
        return nodes, np.repeat(ws, p) * (2.0 * np.pi / p)
    raise DomainError(f"direct quadrature supports n <= 3, got {n}")


@dataclass(frozen=True)
class ConeQuadratureSpec:
    z_nodes: np.ndarray
    z_weights: np.ndarray
    z_max: float
    sphere_nodes: np.ndarray
    sphere_weights: np.ndarray

    @classmethod
    def build(cls, params, z_max, spacing_z, sphere_resolution=None):
        """Composite 16-point Gauss-Legendre on ``[0, z_max]``.

        Panel width is at most ``min(4 spacing_z, 1/a)`` so both the sampling
        scale and the attenuation length are resolved.
        """
        z_max = float(z_max)
        if not z_max > 0:
            raise GeometryError(f"z_max must be > 0, got {z_max}")
        width = min(4.0 * spacing_z, 1.0 / params.a)
        panels = max(1, math.ceil(z_max / width))
        x, w = np.polynomial.legendre.leggauss(GL_PANEL_POINTS)
        edges = np.linspace(0.0, z_max, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        sn, sw = sphere_rule(params.n, sphere_resolution)
        return cls(nodes, weights, z_max, sn, sw)


def required_z_max(phantom, out_spec):
    """Cone height needed so every apex of ``out_spec`` sees the whole support."""
    if not phantom.terms:
        return 0.0
    top = max(t.center[-1] + t.radius for t in phantom.terms)
    return top - out_spec.origin[-1]


@lru_cache(maxsize=None)
def _kernel():
    import numba

    # skip the TBB probe, which warns on older system TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

    @numba.njit(parallel=True, cache=True)
    def cone_kernel(apex, centers, radii, amps, z_nodes, z_w, omega, omega_w, a, t, power):
        npts, ndim = apex.shape
        n = ndim - 1
        nb = centers.shape[0]
        out = np.zeros(npts)
        for p in numba.prange(npts):
            v = apex[p, n]
            acc = 0.0
            for iz in range(z_nodes.shape[0]):
                z = z_nodes[iz]
                ring = z * t
                ring_sum = 0.0
                for b in range(nb):
                    dz = v + z - centers[b, n]
                    r2 = radii[b] * radii[b]
                    rem = r2 - dz * dz
                    if rem <= 0.0:
                        continue
                    dx2 = 0.0
                    for i in range(n):
                        d = apex[p, i] - centers[b, i]
                        dx2 += d * d
                    gap = math.sqrt(dx2) - ring
                    if gap * gap >= rem:
                        continue
                    for m in range(omega.shape[0]):
                        q = dz * dz
                        for i in range(n):
                            d = apex[p, i] + ring * omega[m, i] - centers[b, i]
                            q += d * d
                        s = q / r2
                        if s < 1.0:
                            ring_sum += omega_w[m] * amps[b] * math.exp(1.0 - 1.0 / (1.0 - s))
                if ring_sum != 0.0:
                    acc += z_w[iz] * math.exp(-a * z) * z**power * ring_sum
            out[p] = acc
        return out

    return cone_kernel


def _direct(phantom, params, out_spec, quad, power):
    if out_spec.ndim != params.n + 1:
        raise ValueError(f"output grid must have n+1 = {params.n + 1} axes")
    if params.n > 3:
        raise DomainError("direct quadrature supports n <= 3")
    if not phantom.terms:
        return ScalarField.zeros(out_spec)
    if phantom.ndim != out_spec.ndim:
        raise ValueError("phantom and output grid dimensions differ")
    need = required_z_max(phantom, out_spec)
    if need <= 0:
        return ScalarField.zeros(out_spec)
    if quad is None:
        quad = ConeQuadratureSpec.build(params, need, out_spec.spacing[-1])
    elif quad.z_max < need * (1 - 1e-12):
        raise GeometryError(f"z_max={quad.z_max:.4g} cannot reach the phantom support "
                            f"(needs {need:.4g})")
    import numba

    centers = np.array([t.center for t in phantom.terms])
    radii = np.array([t.radius for t in phantom.terms])
    amps = np.array([t.amplitude for t in phantom.terms])
    kernel = _kernel()
    numba.set_num_threads(numba_threads())
    vals = kernel(out_spec.points(), centers, radii, amps, quad.z_nodes, quad.z_weights,
                  np.ascontiguousarray(quad.sphere_nodes), quad.sphere_weights,
                  params.a, params.t, float(power))
    return ScalarField(out_spec, vals.reshape(out_spec.dims) * params.prefactor)


def cone_forward_direct(phantom, params, out_spec, quad=None):
    """Attenuated cone transform of an analytic phantom by direct quadrature.

    Apices with no cone reaching the phantom evaluate to exactly zero. A
    supplied ``quad`` whose ``z_max`` cannot reach the top of the support from
    the lowest apex raises :class:`GeometryError`.
    """
    return _direct(phantom, params, out_spec, quad, params.n - 1)


def aux_forward_direct(phantom, params, out_spec, quad=None):
    """Auxiliary transform (radial weight ``z^{n-2}``) by direct quadrature; n >= 2."""
    if params.n < 2:
        raise DomainError("the auxiliary transform needs n >= 2 (z^{n-2} singular for n = 1)")
    return _direct(phantom, params, out_spec, quad, params.n - 2)


# ---------------------------------------------------------------------------
# Fourier multipliers
# ---------------------------------------------------------------------------

def denominator(params, xi_norm, sigma):
    """``(a - i sigma)^2 + (|xi| tan psi)^2``, the symbol of the hyperbolic operator."""
    b = params.a - 1j * np.asarray(sigma, dtype=float)
    y = np.asarray(xi_norm, dtype=float) * params.t
    d = b * b + y * y
    floor = params.a**2 * DENOM_GUARD
    if np.min(np.abs(d)) < floor:
        raise ArithmeticError("multiplier denominator vanished on the frequency grid")
    return d


def cpow(w, p):
    """Principal-branch ``w**p`` via ``exp(p log w)``, shared by every symbol."""
    return np.exp(p * np.log(w))


def multiplier_C(params, xi_norm, sigma):
    """Fourier multiplier of the cone transform."""
    b = params.a - 1j * np.asarray(sigma, dtype=float)
    d = denominator(params, xi_norm, sigma)
    return params.alpha * b * cpow(d, -(params.n + 1) / 2)


def multiplier_A(params, xi_norm, sigma):
    """Fourier multiplier of the auxiliary transform; n >= 2."""
    if params.n < 2:
        raise DomainError("the auxiliary transform needs n >= 2")
    d = denominator(params, xi_norm, sigma)
    return params.beta * cpow(d, -(params.n - 1) / 2)


def default_pad_factors(spec, params, lateral=2.0, eps_wrap=EPS_WRAP):
    """Pad factors for spectral transforms on ``spec``.

    Lateral axes get ``lateral`` (>= 1). The z axis gets a factor 2 plus an
    extra ``-ln(eps_wrap)/a`` of length, all of it added toward -z, where
    cone data decays only like ``exp(a v)``.
    """
    extent_z = spec.dims[-1] * spec.spacing[-1]
    z_factor = 2.0 + (-math.log(eps_wrap) / params.a) / extent_z
    return tuple([float(lateral)] * (spec.ndim - 1) + [z_factor])


def _check_grid(f, params):
    if f.spec.ndim != params.n + 1:
        raise ValueError(f"field has {f.spec.ndim} axes, expected n+1 = {params.n + 1}")


def cone_forward_spectral(f, params, pad_factors=None):
    """Cone transform of a sampled field through its Fourier multiplier.

    With ``pad_factors=None`` the field is treated as periodic on its own
    grid (use a grid from :func:`default_pad_factors`); otherwise it is
    zero-padded, transformed and cropped back.
    """
    _check_grid(f, params)
    return apply_multiplier(f, lambda xi, s: multiplier_C(params, xi, s), pad_factors)


def aux_forward_spectral(f, params, pad_factors=None):
    """Auxiliary transform of a sampled field through its Fourier multiplier; n >= 2."""
    _check_grid(f, params)
    if params.n < 2:
        raise DomainError("the auxiliary transform needs n >= 2")
    return apply_multiplier(f, lambda xi, s: multiplier_A(params, xi, s), pad_factors)


__all__ = [
    "TransformParams", "ConeQuadratureSpec", "GridSpec", "sphere_rule", "required_z_max",
    "cone_forward_direct", "aux_forward_direct", "denominator", "cpow",
    "multiplier_C", "multiplier_A", "default_pad_factors", "cone_forward_spectral",
    "aux_forward_spectral",
]
