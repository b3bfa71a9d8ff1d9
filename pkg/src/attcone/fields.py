"""Uniformly sampled fields on (n+1)-D boxes and their Fourier transforms.

Axes are ordered ``x_1 .. x_n, z``; arrays are C-ordered so ``z`` varies
fastest. The forward transform approximates the continuous Fourier integral
with kernel ``exp(-i xi . x)`` using physical coordinates, so frequency-domain
multipliers can be written directly as functions of ``(|xi|, sigma)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import reduce

import numpy as np
import scipy.fft as sfft

from .errors import AlignmentError, SymmetryError
from .threads import get_threads

DEFAULT_SUPPORT_EPS = 1e-6
SYMMETRY_TOL = 1e-6
_ALIGN_TOL = 1e-6


@dataclass(frozen=True)
class GridSpec:
    dims: tuple
    origin: tuple
    spacing: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        origin = tuple(float(o) for o in self.origin)
        spacing = tuple(float(s) for s in self.spacing)
        if not (len(dims) == len(origin) == len(spacing)):
            raise ValueError("dims, origin and spacing must have equal length")
        if len(dims) < 2:
            raise ValueError("a grid needs at least two axes (x and z)")
        if any(d < 2 for d in dims):
            raise ValueError(f"every axis needs >= 2 samples, got {dims}")
        if any(not (s > 0 and math.isfinite(s)) for s in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def from_extent(cls, dims, lo, hi):
        """Grid with ``dims[a]`` samples starting at ``lo[a]``, step ``(hi-lo)/dims``.

        The upper bound is excluded, which suits periodic DFT grids: 256
        samples over [-2, 2] put a sample exactly at 0.
        """
        dims = tuple(int(d) for d in dims)
        lo = np.broadcast_to(np.asarray(lo, float), (len(dims),))
        hi = np.broadcast_to(np.asarray(hi, float), (len(dims),))
        spacing = (hi - lo) / np.asarray(dims)
        return cls(dims, tuple(lo), tuple(spacing))

    @property
    def ndim(self):
        return len(self.dims)

    @property
    def size(self):
        return reduce(lambda p, d: p * d, self.dims, 1)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def lo(self):
        return self.origin

    @property
    def hi(self):
        return tuple(o + (d - 1) * s for o, d, s in zip(self.origin, self.dims, self.spacing))

    def axis(self, a):
        return self.origin[a] + self.spacing[a] * np.arange(self.dims[a])

    def mesh(self):
        """Sparse coordinate arrays broadcastable to ``dims``."""
        return np.meshgrid(*[self.axis(a) for a in range(self.ndim)], indexing="ij", sparse=True)

    def points(self):
        """All sample coordinates as a ``(size, ndim)`` array."""
        return np.stack([np.broadcast_to(m, self.dims).ravel() for m in self.mesh()], axis=1)

    def freq_axes(self):
        return [2.0 * np.pi * sfft.fftfreq(d, s) for d, s in zip(self.dims, self.spacing)]


@dataclass(frozen=True)
class ScalarField:
    spec: GridSpec
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.shape != self.spec.dims:
            if vals.size != self.spec.size:
                raise ValueError(f"values shape {vals.shape} does not match grid {self.spec.dims}")
            vals = vals.reshape(self.spec.dims)
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, spec):
        return cls(spec, np.zeros(spec.dims))

    def with_values(self, values):
        return ScalarField(self.spec, values)

    def __add__(self, other):
        _require_same_grid(self.spec, other.spec)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _require_same_grid(self.spec, other.spec)
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(self.values * float(c))

    __rmul__ = __mul__


@dataclass(frozen=True)
class SpectralField:
    spec: GridSpec
    coeffs: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != self.spec.dims:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.spec.dims}")
        object.__setattr__(self, "coeffs", c)

    @property
    def freq_axes(self):
        return self.spec.freq_axes()


@dataclass(frozen=True)
class SupportBox:
    lo: tuple | None
    hi: tuple | None
    threshold: float
    empty: bool = False

    @classmethod
    def box(cls, lo, hi, threshold=0.0):
        lo = tuple(float(v) for v in lo)
        hi = tuple(float(v) for v in hi)
        if any(l > h for l, h in zip(lo, hi)):
            raise ValueError("support box needs lo <= hi on every axis")
        return cls(lo, hi, threshold)

    def inflate(self, amounts):
        amounts = np.broadcast_to(np.asarray(amounts, float), (len(self.lo),))
        return SupportBox.box(np.subtract(self.lo, amounts), np.add(self.hi, amounts), self.threshold)

    def translate(self, shift):
        return SupportBox.box(np.add(self.lo, shift), np.add(self.hi, shift), self.threshold)

    def margins(self, region):
        """Per-axis slack between this box and ``region`` (negative means sticking out)."""
        if self.empty:
            return tuple(float("inf") for _ in region.lo)
        return tuple(float(min(l - rl, rh - h))
                     for l, h, rl, rh in zip(self.lo, self.hi, region.lo, region.hi))

    def within(self, region):
        return self.empty or all(m >= 0 for m in self.margins(region))


def _require_same_grid(a, b):
    if a != b:
        raise AlignmentError("fields live on different grids")


def _phase(spec, sign):
    """Per-axis phase factors ``exp(sign * i xi_a * origin_a)``."""
    out = []
    for a, k in enumerate(spec.freq_axes()):
        shape = [1] * spec.ndim
        shape[a] = -1
        out.append(np.exp(sign * 1j * k * spec.origin[a]).reshape(shape))
    return out


def dft_forward(f):
    """Riemann-sum approximation of the continuous Fourier transform."""
    coeffs = sfft.fftn(f.values, workers=get_threads()) * f.spec.cell_volume
    for ph in _phase(f.spec, -1.0):
        coeffs *= ph
    return SpectralField(f.spec, coeffs)


def dft_inverse(sf):
    """Exact discrete inverse of :func:`dft_forward`.

    Raises :class:`SymmetryError` when the result carries an imaginary part
    above ``1e-6`` relative, which means the coefficients were not the
    transform of a real field.
    """
    c = sf.coeffs.copy()
    for ph in _phase(sf.spec, 1.0):
        c *= ph
    vals = sfft.ifftn(c, workers=get_threads()) / sf.spec.cell_volume
    scale = np.abs(vals.real).max(initial=0.0)
    resid = np.abs(vals.imag).max(initial=0.0)
    if resid > SYMMETRY_TOL * max(scale, np.finfo(float).tiny):
        raise SymmetryError(f"imaginary residue {resid:.3e} vs real scale {scale:.3e}")
    return ScalarField(sf.spec, vals.real)


# ---------------------------------------------------------------------------
# Padding and cropping
# ---------------------------------------------------------------------------

def _next_odd_smooth(n):
    """Smallest odd integer >= n whose prime factors are 3, 5 or 7.

    Odd lengths have no Nyquist bin, so real-to-real multiplier round trips
    are exact on every frequency.
    """
    m = max(int(n), 1)
    if m % 2 == 0:
        m += 1
    while True:
        k = m
        for p in (3, 5, 7):
            while k % p == 0:
                k //= p
        if k == 1:
            return m
        m += 2


def pad_spec(spec, factors):
    """Grid enlarged by ``factors`` per axis, sharing the samples of ``spec``.

    Lateral axes are padded symmetrically; the z axis is padded entirely
    toward -z. New sizes are rounded up to odd 3-5-7-smooth lengths.
    """
    factors = np.broadcast_to(np.asarray(factors, float), (spec.ndim,))
    if np.any(factors < 1):
        raise ValueError(f"pad factors must be >= 1, got {factors}")
    dims, origin = [], []
    for a, (d, o, s, f) in enumerate(zip(spec.dims, spec.origin, spec.spacing, factors)):
        new = _next_odd_smooth(math.ceil(d * f - 1e-9))
        extra = new - d
        before = extra if a == spec.ndim - 1 else extra // 2
        dims.append(new)
        origin.append(o - before * s)
    return GridSpec(tuple(dims), tuple(origin), spec.spacing)


def _offsets(outer, inner):
    offs = []
    for a in range(outer.ndim):
        if not math.isclose(outer.spacing[a], inner.spacing[a], rel_tol=1e-9):
            raise AlignmentError(f"spacing mismatch on axis {a}")
        shift = (inner.origin[a] - outer.origin[a]) / outer.spacing[a]
        k = round(shift)
        if abs(shift - k) > _ALIGN_TOL:
            raise AlignmentError(f"origin on axis {a} is off-grid by {shift - k:.3g} cells")
        if k < 0 or k + inner.dims[a] > outer.dims[a]:
            raise AlignmentError(f"target extends outside the source grid on axis {a}")
        offs.append(int(k))
    return offs


def embed(f, target, fill=0.0):
    """Place ``f`` inside the larger commensurate grid ``target``."""
    if target.ndim != f.spec.ndim:
        raise AlignmentError("dimension mismatch")
    offs = _offsets(target, f.spec)
    out = np.full(target.dims, float(fill))
    out[tuple(slice(o, o + d) for o, d in zip(offs, f.spec.dims))] = f.values
    return ScalarField(target, out)


def pad(f, factors, fill=0.0):
    return embed(f, pad_spec(f.spec, factors), fill)


def crop(f, target):
    """Restrict ``f`` to the commensurate sub-grid ``target``."""
    if target.ndim != f.spec.ndim:
        raise AlignmentError("dimension mismatch")
    offs = _offsets(f.spec, target)
    vals = f.values[tuple(slice(o, o + d) for o, d in zip(offs, target.dims))]
    return ScalarField(target, vals)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def support_box(f, epsilon=DEFAULT_SUPPORT_EPS):
    """Tight bounding box of the samples with ``|v| > epsilon * max|v|``."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    absval = np.abs(f.values)
    peak = absval.max()
    if peak == 0:
        return SupportBox(None, None, epsilon, empty=True)
    mask = absval > epsilon * peak
    lo, hi = [], []
    for a in range(f.spec.ndim):
        other = tuple(b for b in range(f.spec.ndim) if b != a)
        idx = np.flatnonzero(mask.any(axis=other))
        lo.append(float(f.spec.origin[a] + idx[0] * f.spec.spacing[a]))
        hi.append(float(f.spec.origin[a] + idx[-1] * f.spec.spacing[a]))
    return SupportBox(tuple(lo), tuple(hi), epsilon)


def norms(f):
    """``(l2, linf)`` with the L2 norm weighted by the cell volume."""
    v = f.values
    return math.sqrt(float(np.sum(v * v)) * f.spec.cell_volume), float(np.abs(v).max(initial=0.0))


def boundary_level(f):
    """Largest ``|v|`` on the faces of the grid, relative to ``max|v|``."""
    peak = np.abs(f.values).max()
    if peak == 0:
        return 0.0
    level = 0.0
    for a in range(f.spec.ndim):
        first = np.take(f.values, 0, axis=a)
        last = np.take(f.values, -1, axis=a)
        level = max(level, np.abs(first).max(), np.abs(last).max())
    return float(level / peak)


def rel_l2(a, b):
    """``||a - b|| / ||b||`` over a shared grid."""
    _require_same_grid(a.spec, b.spec)
    den = np.linalg.norm(b.values)
    return float(np.linalg.norm(a.values - b.values) / den) if den > 0 else float(np.linalg.norm(a.values))


# ---------------------------------------------------------------------------
# Radial Fourier multipliers
# ---------------------------------------------------------------------------

def _check_hermitian(symbol, xi_max, sigma_max):
    xi = np.linspace(0.0, xi_max, 7)[:, None]
    sig = np.linspace(0.0, sigma_max, 9)[None, :]
    plus = symbol(xi, sig)
    minus = symbol(xi, -sig)
    scale = np.abs(plus).max()
    if np.abs(minus - np.conj(plus)).max() > SYMMETRY_TOL * max(scale, np.finfo(float).tiny):
        raise SymmetryError("multiplier is not conjugate-symmetric in sigma; output would be complex")


def _block_rows(shape, budget=1 << 22):
    per_row = max(1, int(np.prod(shape[1:])))
    return max(1, budget // per_row)


def apply_multiplier(f, symbol, pad_factors=None):
    """Apply a multiplier depending on ``(|xi|, sigma)`` to a real field.

    ``symbol(xi_norm, sigma)`` must accept broadcastable arrays and satisfy
    ``symbol(xi, -sigma) == conj(symbol(xi, sigma))``; this is verified on a
    sample of frequencies before the transform. The field is treated as
    periodic on its grid unless ``pad_factors`` is given, in which case it is
    zero-padded first and the result cropped back.
    """
    work = pad(f, pad_factors) if pad_factors is not None else f
    spec = work.spec
    freqs = spec.freq_axes()
    sigma = 2.0 * np.pi * sfft.rfftfreq(spec.dims[-1], spec.spacing[-1])
    xi_max = math.sqrt(sum(float(np.abs(k).max()) ** 2 for k in freqs[:-1]))
    _check_hermitian(symbol, xi_max, float(sigma.max()))

    xi2 = np.zeros(spec.dims[:-1] + (1,))
    for a, k in enumerate(freqs[:-1]):
        shape = [1] * spec.ndim
        shape[a] = -1
        xi2 = xi2 + (k**2).reshape(shape)
    xi_norm = np.sqrt(xi2)

    coeffs = sfft.rfftn(work.values, workers=get_threads())
    step = _block_rows(coeffs.shape)
    for start in range(0, coeffs.shape[0], step):
        sl = slice(start, start + step)
        coeffs[sl] *= symbol(xi_norm[sl], sigma)
    out = sfft.irfftn(coeffs, s=spec.dims, workers=get_threads())
    result = ScalarField(spec, out)
    return crop(result, f.spec) if pad_factors is not None else result
