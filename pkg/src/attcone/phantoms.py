"""Smooth, exactly compactly supported test functions built from bumps."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField


@dataclass(frozen=True)
class Bump:
    """``amplitude * exp(1 - 1/(1 - |p - center|^2 / radius^2))`` inside the ball."""

    center: tuple
    radius: float
    amplitude: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError(f"bump radius must be > 0, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "amplitude", float(self.amplitude))

    def _s(self, pts):
        d = pts - np.asarray(self.center)
        return np.einsum("...i,...i->...", d, d) / self.radius**2

    def value(self, pts):
        s = self._s(pts)
        out = np.zeros(s.shape)
        inside = s < 1.0
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    def gradient_axis(self, pts, axis):
        s = self._s(pts)
        out = np.zeros(s.shape)
        inside = s < 1.0
        si = s[inside]
        val = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - si))
        dist = pts[..., axis][inside] - self.center[axis]
        out[inside] = -val / (1.0 - si) ** 2 * 2.0 * dist / self.radius**2
        return out


@dataclass(frozen=True)
class PhantomSpec:
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if terms:
            nd = len(terms[0].center)
            if any(len(t.center) != nd for t in terms):
                raise ValueError("all bumps must share one dimension")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, ndim, radius=0.5, amplitude=1.0, center=None):
        c = (0.0,) * ndim if center is None else center
        return cls((Bump(c, radius, amplitude),))

    @property
    def ndim(self):
        return len(self.terms[0].center) if self.terms else 0

    def bounding_box(self):
        """Axis-aligned box containing every bump ball, as ``(lo, hi)``."""
        c = np.array([t.center for t in self.terms])
        r = np.array([t.radius for t in self.terms])[:, None]
        return tuple((c - r).min(axis=0)), tuple((c + r).max(axis=0))

    def shifted(self, shift):
        return PhantomSpec(tuple(Bump(np.add(t.center, shift), t.radius, t.amplitude)
                                 for t in self.terms))

    def scaled(self, factor):
        return PhantomSpec(tuple(Bump(t.center, t.radius, t.amplitude * factor)
                                 for t in self.terms))


def evaluate(phantom, points):
    """Phantom value at ``points`` (shape ``(..., ndim)``); exactly 0 off-support."""
    pts = np.asarray(points, dtype=float)
    out = np.zeros(pts.shape[:-1])
    for t in phantom.terms:
        out += t.value(pts)
    return float(out) if out.ndim == 0 else out


def evaluate_dz(phantom, points):
    """Analytic derivative along the last (z) axis."""
    pts = np.asarray(points, dtype=float)
    out = np.zeros(pts.shape[:-1])
    for t in phantom.terms:
        out += t.gradient_axis(pts, pts.shape[-1] - 1)
    return float(out) if out.ndim == 0 else out


def _sample_terms(phantom, spec, method, *args):
    values = np.zeros(spec.dims)
    # slab-wise along the first axis to bound memory on large grids
    axes = [spec.axis(a) for a in range(spec.ndim)]
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1)
    for i, x0 in enumerate(axes[0]):
        pts = np.concatenate([np.full(rest.shape[:-1] + (1,), x0), rest], axis=-1)
        for t in phantom.terms:
            if abs(x0 - t.center[0]) < t.radius:
                values[i] += getattr(t, method)(pts, *args)
    return ScalarField(spec, values)


def sample(phantom, spec):
    """Evaluate the phantom at every grid sample.

    Warns when some bump is not strictly inside the grid box.
    """
    if phantom.terms:
        if phantom.ndim != spec.ndim:
            raise ValueError(f"phantom is {phantom.ndim}-D but grid is {spec.ndim}-D")
        lo, hi = phantom.bounding_box()
        if any(l <= g for l, g in zip(lo, spec.lo)) or any(h >= g for h, g in zip(hi, spec.hi)):
            warnings.warn("phantom support is not strictly inside the grid box", stacklevel=2)
    return _sample_terms(phantom, spec, "value")


def sample_dz(phantom, spec):
    """Analytic z-derivative sampled on the grid."""
    return _sample_terms(phantom, spec, "gradient_axis", spec.ndim - 1)
