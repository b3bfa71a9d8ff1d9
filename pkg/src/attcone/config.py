"""Experiment configuration: ``key = value`` text files with dotted keys.

Example::

    # n = 1 round trip
    params.mu = 1.0
    params.psi = 0.7853981633974483
    params.n = 1
    grid.dims = 256,256
    grid.extent = -2,2
    phantom.bump.0.center = 0,0
    phantom.bump.0.radius = 0.5
    phantom.bump.0.amplitude = 1.0

``grid.extent`` is either one ``LO,HI`` pair used for every axis or one pair
per axis. The echoed config written next to every output lists every key
with full float precision, so feeding it back reproduces the run exactly.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

from .fields import GridSpec
from .phantoms import Bump, PhantomSpec
from .transforms import TransformParams

DEFAULT_MU = 2.0
DEFAULT_PSI = math.pi / 4
DEFAULT_DIMS = {1: 256, 2: 96, 3: 32}
DEFAULT_EXTENT = (-2.0, 2.0)

_BUMP_KEY = re.compile(r"phantom\.bump\.(\d+)\.(center|radius|amplitude)$")
SCALAR_KEYS = {
    "params.mu": float, "params.psi": float, "params.n": int,
    "pad.lateral": float, "tolerances.eps_support": float, "tolerances.moment_tol": float,
    "method": str, "transform": str, "theorem": str, "power": int, "rule": str,
    "seed": int, "input": str,
}
LIST_KEYS = {"grid.dims": int, "grid.extent": float}


class ConfigError(ValueError):
    pass


def parse_text(text):
    """Parse config text into a flat ``{key: raw string}`` mapping."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCALAR_KEYS and key not in LIST_KEYS and not _BUMP_KEY.match(key):
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _floats(text, what):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _convert(key, value):
    if key in SCALAR_KEYS:
        try:
            return SCALAR_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {value!r}") from None
    if key in LIST_KEYS:
        vals = _floats(value, key)
        if LIST_KEYS[key] is int:
            if any(v != int(v) for v in vals):
                raise ConfigError(f"{key}: expected integers, got {value!r}")
            vals = tuple(int(v) for v in vals)
        return vals
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    params: TransformParams
    grid: GridSpec
    phantom: PhantomSpec
    lateral: float | None = None
    eps_support: float = 1e-6
    moment_tol: float = 1e-4
    method: str = "spectral"
    transform: str = "cone"
    theorem: str | None = None
    power: int = 1
    rule: str = "cubic"
    seed: int = 0
    input: str | None = None
    extent: tuple = DEFAULT_EXTENT

    def __post_init__(self):
        if self.method not in ("direct", "spectral"):
            raise ConfigError(f"method must be 'direct' or 'spectral', got {self.method!r}")
        if self.method == "direct" and self.params.n > 3:
            raise ConfigError("direct quadrature needs n <= 3")
        if self.grid.ndim != self.params.n + 1:
            raise ConfigError(f"grid has {self.grid.ndim} axes but n + 1 = {self.params.n + 1}")
        if self.phantom.terms and self.phantom.ndim != self.grid.ndim:
            raise ConfigError("phantom bump centers must have n + 1 coordinates")
        if self.lateral is not None and self.lateral < 1:
            raise ConfigError("pad factor must be >= 1")

    @classmethod
    def resolve(cls, mapping):
        """Build a config from ``{dotted key: value}``; missing keys get defaults.

        Values may be raw strings (from a file) or already-typed values
        (from command-line flags).
        """
        vals = {k: _convert(k, v) if isinstance(v, str) else v for k, v in mapping.items()}
        n = int(vals.get("params.n", 1))
        params = TransformParams(vals.get("params.mu", DEFAULT_MU),
                                 vals.get("params.psi", DEFAULT_PSI), n)
        ndim = n + 1
        dims = tuple(vals.get("grid.dims", (DEFAULT_DIMS.get(n, 16),) * ndim))
        if len(dims) == 1:
            dims = dims * ndim
        if len(dims) != ndim:
            raise ConfigError(f"grid.dims needs 1 or {ndim} entries, got {len(dims)}")
        extent = tuple(vals.get("grid.extent", DEFAULT_EXTENT))
        if len(extent) == 2:
            lo, hi = (extent[0],) * ndim, (extent[1],) * ndim
        elif len(extent) == 2 * ndim:
            lo, hi = extent[0::2], extent[1::2]
        else:
            raise ConfigError(f"grid.extent needs 2 or {2 * ndim} entries, got {len(extent)}")
        if any(l >= h for l, h in zip(lo, hi)):
            raise ConfigError("grid.extent needs LO < HI on every axis")
        grid = GridSpec.from_extent(dims, lo, hi)
        phantom = _phantom(vals, ndim)
        return cls(params=params, grid=grid, phantom=phantom,
                   lateral=vals.get("pad.lateral"),
                   eps_support=vals.get("tolerances.eps_support", 1e-6),
                   moment_tol=vals.get("tolerances.moment_tol", 1e-4),
                   method=vals.get("method", "spectral"),
                   transform=vals.get("transform", "cone"),
                   theorem=vals.get("theorem"), power=vals.get("power", 1),
                   rule=vals.get("rule", "cubic"), seed=vals.get("seed", 0),
                   input=vals.get("input"), extent=extent)

    def to_text(self):
        """Fully resolved config, one ``key = value`` per line."""
        p = self.params
        lines = [f"params.mu = {p.mu!r}", f"params.psi = {p.psi!r}", f"params.n = {p.n}",
                 "grid.dims = " + ",".join(str(d) for d in self.grid.dims),
                 "grid.extent = " + ",".join(repr(float(v)) for v in self.extent)]
        if self.lateral is not None:
            lines.append(f"pad.lateral = {float(self.lateral)!r}")
        lines += [f"tolerances.eps_support = {float(self.eps_support)!r}",
                  f"tolerances.moment_tol = {float(self.moment_tol)!r}",
                  f"method = {self.method}", f"transform = {self.transform}"]
        if self.theorem is not None:
            lines.append(f"theorem = {self.theorem}")
        lines += [f"power = {self.power}", f"rule = {self.rule}", f"seed = {self.seed}"]
        if self.input is not None:
            lines.append(f"input = {self.input}")
        for i, b in enumerate(self.phantom.terms):
            lines.append(f"phantom.bump.{i}.center = " + ",".join(repr(c) for c in b.center))
            lines.append(f"phantom.bump.{i}.radius = {b.radius!r}")
            lines.append(f"phantom.bump.{i}.amplitude = {b.amplitude!r}")
        return "\n".join(lines) + "\n"

    def with_(self, **changes):
        return replace(self, **changes)


def default_radius(n):
    # a 32^4 grid over [-2, 2] resolves a radius-0.5 bump with only 4 samples
    return 1.5 if n >= 3 else 0.5


def _phantom(vals, ndim):
    groups = {}
    for key, value in vals.items():
        m = _BUMP_KEY.match(key)
        if m:
            groups.setdefault(int(m.group(1)), {})[m.group(2)] = value
    if not groups:
        return PhantomSpec.single(ndim, radius=default_radius(ndim - 1))
    terms = []
    for idx in sorted(groups):
        g = groups[idx]
        center = g.get("center")
        if center is None:
            raise ConfigError(f"phantom.bump.{idx} has no center")
        if isinstance(center, str):
            center = _floats(center, f"phantom.bump.{idx}.center")
        if len(center) != ndim:
            raise ConfigError(f"phantom.bump.{idx}.center needs {ndim} coordinates")
        terms.append(Bump(center, float(g.get("radius", default_radius(ndim - 1))),
                          float(g.get("amplitude", 1.0))))
    return PhantomSpec(tuple(terms))


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse_text(fh.read())
