"""The hyperbolic operator L, the exponential moment, and the range tests.

``L = a^2 - 2a d/dz + d^2/dz^2 - t^2 Laplacian_x`` with ``a = mu / cos psi`` and
``t = tan psi``; its Fourier symbol is ``(a - i sigma)^2 + (|xi| t)^2``.

Four range tests are provided, one per combination of transform (cone or
auxiliary) and parity of the spatial dimension ``n``. Each computes one
field ``h`` from the data ``g`` in a single fused multiplier pass and checks
that ``h`` is supported in a declared region; the cone-transform tests also
require the exponential moment of ``h`` to vanish along every z-column.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import BoundaryContaminationError, DomainError, StencilError
from .fields import (DEFAULT_SUPPORT_EPS, ScalarField, SupportBox, apply_multiplier,
                     boundary_level, support_box)
from .transforms import cpow, denominator, multiplier_A

THEOREMS = ("c-odd", "c-even", "a-odd", "a-even")
BOUNDARY_FACTOR = 100.0


def L_symbol(params, xi_norm, sigma):
    return denominator(params, xi_norm, sigma)


def _parity(theorem, params):
    n = params.n
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem tag {theorem!r}; use one of {THEOREMS}")
    odd = theorem.endswith("odd")
    if odd != (n % 2 == 1):
        raise DomainError(f"{theorem} needs {'odd' if odd else 'even'} n, got n = {n}")
    if theorem == "a-odd" and n < 3:
        raise DomainError("the auxiliary odd case needs n >= 3 (the auxiliary transform is undefined at n = 1)")


def range_symbol(theorem, params, xi_norm, sigma):
    """Symbol of the map ``g -> h`` used by the range test ``theorem``.

    c-odd: ``L^k``; c-even: ``L^{2k}`` after the auxiliary transform;
    a-odd: ``L^{k-1}``; a-even: ``L^{2k-1}`` after the auxiliary transform.
    The auxiliary factor is fused into a single symbol.
    """
    _parity(theorem, params)
    k = params.k
    d = denominator(params, xi_norm, sigma)
    if theorem == "c-odd":
        return cpow(d, k)
    if theorem == "a-odd":
        return cpow(d, k - 1)
    power = 2 * k if theorem == "c-even" else 2 * k - 1
    return cpow(d, power) * multiplier_A(params, xi_norm, sigma)


def _boundary_guard(g, eps_support):
    level = boundary_level(g)
    if level > BOUNDARY_FACTOR * eps_support:
        raise BoundaryContaminationError(
            f"field reaches {level:.3e} of its peak on the grid boundary "
            f"(limit {BOUNDARY_FACTOR * eps_support:.1e}); enlarge the grid or padding")


def _apply(g, symbol, pad_factors, eps_support, check_boundary):
    if check_boundary:
        _boundary_guard(g, eps_support)
    return apply_multiplier(g, symbol, pad_factors)


def L_apply_spectral(g, params, k=1, pad_factors=None, eps_support=DEFAULT_SUPPORT_EPS,
                     check_boundary=True):
    """``L^k g`` as one multiplier pass with symbol ``denominator**k``."""
    if int(k) != k or k < 1:
        raise ValueError(f"power k must be an integer >= 1, got {k}")
    return _apply(g, lambda xi, s: cpow(denominator(params, xi, s), int(k)),
                  pad_factors, eps_support, check_boundary)


def apply_range_map(g, theorem, params, pad_factors=None, eps_support=DEFAULT_SUPPORT_EPS,
                    check_boundary=True):
    """The field ``h`` whose properties decide the range test ``theorem``."""
    _parity(theorem, params)
    return _apply(g, lambda xi, s: range_symbol(theorem, params, xi, s),
                  pad_factors, eps_support, check_boundary)


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def _d1(v, h, axis):
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[1] = (v[2] - v[0]) / (2.0 * h)
    out[-2] = (v[-1] - v[-3]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def _d2(v, h, axis):
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    out[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2] + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
    out[1] = (v[0] - 2.0 * v[1] + v[2]) / (h * h)
    out[-2] = (v[-3] - 2.0 * v[-2] + v[-1]) / (h * h)
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return np.moveaxis(out, 0, axis)


def L_apply_fd(g, params):
    """``L g`` with fourth-order central differences in the interior.

    The two outermost samples on each side use second-order stencils.
    """
    if min(g.spec.dims) < 5:
        raise StencilError(f"finite differences need >= 5 samples per axis, got {g.spec.dims}")
    a, t = params.a, params.t
    v = g.values
    zax = g.spec.ndim - 1
    out = a * a * v - 2.0 * a * _d1(v, g.spec.spacing[zax], zax) + _d2(v, g.spec.spacing[zax], zax)
    for ax in range(zax):
        out -= t * t * _d2(v, g.spec.spacing[ax], ax)
    return ScalarField(g.spec, out)


# ---------------------------------------------------------------------------
# Moment condition and reports
# ---------------------------------------------------------------------------

def _z_window(spec, z_range):
    z = spec.axis(spec.ndim - 1)
    if z_range is None:
        return slice(None), z
    lo, hi = z_range
    idx = np.flatnonzero((z >= lo - 1e-9 * spec.spacing[-1]) & (z <= hi + 1e-9 * spec.spacing[-1]))
    if idx.size < 2:
        raise ValueError(f"z window {z_range} holds fewer than two samples")
    return slice(idx[0], idx[-1] + 1), z[idx[0]:idx[-1] + 1]


def moment_residual(h, params, z_range=None):
    """Relative size of the exponential moment ``int e^{-az} h dz`` over all columns.

    Returns ``max_x |m(x)| / max_x int e^{-az} |h| dz`` (0 for an all-zero
    field). ``z_range`` limits the integral to a window known to contain the
    support of ``h``; the weight is shifted to the window's lower end, which
    leaves the ratio unchanged.
    """
    sl, z = _z_window(h.spec, z_range)
    vals = h.values[..., sl]
    w = np.exp(-params.a * (z - z[0]))
    dz = h.spec.spacing[-1]
    signed = trapezoid(vals * w, dx=dz, axis=-1)
    absolute = trapezoid(np.abs(vals) * w, dx=dz, axis=-1)
    den = absolute.max(initial=0.0)
    if den == 0.0:
        return 0.0
    return float(np.abs(signed).max() / den)


@dataclass(frozen=True)
class RangeTolerances:
    region: SupportBox
    eps_support: float = DEFAULT_SUPPORT_EPS
    moment_tol: float = 1e-4

    def __post_init__(self):
        if not 0 < self.eps_support < 1:
            raise ValueError("eps_support must lie in (0, 1)")
        if not self.moment_tol > 0:
            raise ValueError("moment_tol must be > 0")
        if self.region is None or self.region.empty:
            raise ValueError("a non-empty region is required")

    @classmethod
    def around(cls, phantom, spec, cells=4, **kw):
        """Region = phantom bounding box inflated by ``cells`` grid spacings."""
        lo, hi = phantom.bounding_box()
        region = SupportBox.box(lo, hi).inflate(np.asarray(spec.spacing) * cells)
        return cls(region, **kw)


@dataclass(frozen=True)
class RangeReport:
    theorem: str
    support_ok: bool
    support_box: SupportBox
    margin: tuple
    moment_residual: float
    passed: bool
    eps_support: float
    moment_tol: float

    def to_dict(self):
        row = dict(theorem=self.theorem, passed=self.passed, support_ok=self.support_ok)
        for i, m in enumerate(self.margin):
            row[f"margin_{i}"] = m
        row.update(moment_residual=self.moment_residual, eps_support=self.eps_support,
                   moment_tol=self.moment_tol)
        return row


def check_range(g, theorem, params, tol, pad_factors=None):
    """Run the range test ``theorem`` on ``g`` and return a :class:`RangeReport`."""
    h = apply_range_map(g, theorem, params, pad_factors, tol.eps_support)
    box = support_box(h, tol.eps_support)
    support_ok = box.within(tol.region)
    margin = box.margins(tol.region)
    if theorem.startswith("c"):
        moment = moment_residual(h, params, (tol.region.lo[-1], tol.region.hi[-1]))
        passed = support_ok and moment <= tol.moment_tol
    else:
        moment = 0.0
        passed = support_ok
    return RangeReport(theorem, bool(support_ok), box, tuple(float(m) for m in margin),
                       float(moment), bool(passed), tol.eps_support, tol.moment_tol)


def check_range_C_odd(g, params, tol, pad_factors=None):
    return check_range(g, "c-odd", params, tol, pad_factors)


def check_range_C_even(g, params, tol, pad_factors=None):
    return check_range(g, "c-even", params, tol, pad_factors)


def check_range_A_odd(g, params, tol, pad_factors=None):
    return check_range(g, "a-odd", params, tol, pad_factors)


def check_range_A_even(g, params, tol, pad_factors=None):
    return check_range(g, "a-even", params, tol, pad_factors)


__all__ = [
    "THEOREMS", "L_symbol", "range_symbol", "L_apply_spectral", "apply_range_map", "L_apply_fd",
    "moment_residual", "RangeTolerances", "RangeReport", "check_range", "check_range_C_odd",
    "check_range_C_even", "check_range_A_odd", "check_range_A_even",
]
