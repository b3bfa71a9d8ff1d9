"""End-to-end helpers: phantom -> range data -> tests and reconstructions.

Cone data do not decay inside the phantom's box: they spread laterally and
fall off only like ``exp(a v)`` toward -z. Everything here therefore works
on a padded *working grid* that contains the requested grid, treats it as
periodic, and crops results back at the end.
"""
from __future__ import annotations

from .errors import DomainError
from .fields import crop, pad_spec, rel_l2
from .inversion import INVERTERS
from .phantoms import sample
from .rangeops import RangeTolerances, check_range
from .transforms import (EPS_WRAP, aux_forward_direct, aux_forward_spectral,
                         cone_forward_direct, cone_forward_spectral, default_pad_factors)

# Lateral pad factors that keep boundary levels below 1e-4 for mu >= 1 (n = 1)
# and mu >= 2 (n >= 2) at psi = pi/4; the boundary guard catches other cases.
DEFAULT_LATERAL = {1: 4.0}
FALLBACK_LATERAL = 2.0


def default_lateral(params):
    return DEFAULT_LATERAL.get(params.n, FALLBACK_LATERAL)


def working_spec(spec, params, lateral=None, eps_wrap=EPS_WRAP):
    lateral = default_lateral(params) if lateral is None else lateral
    return pad_spec(spec, default_pad_factors(spec, params, lateral, eps_wrap))


def theorem_for(params, transform):
    """Range-test tag matching ``transform`` ('cone' or 'aux') and the parity of n."""
    parity = "odd" if params.n % 2 else "even"
    prefix = {"cone": "c", "aux": "a"}.get(transform)
    if prefix is None:
        raise ValueError(f"transform must be 'cone' or 'aux', got {transform!r}")
    return f"{prefix}-{parity}"


def transform_for(theorem):
    return "cone" if theorem.startswith("c") else "aux"


def range_data(phantom, params, spec, transform="cone", lateral=None):
    """Sample the phantom on the working grid and apply the spectral transform there.

    Returns ``(work_spec, f_work, g_work)``.
    """
    if transform == "aux" and params.n < 2:
        raise DomainError("the auxiliary transform needs n >= 2")
    work = working_spec(spec, params, lateral)
    f = sample(phantom, work)
    op = cone_forward_spectral if transform == "cone" else aux_forward_spectral
    return work, f, op(f, params)


def forward(phantom, params, spec, method="spectral", transform="cone", lateral=None, full=False):
    """Transform data of ``phantom`` on ``spec`` by either route.

    ``full=True`` (spectral only) returns the working-grid field instead of
    cropping it.
    """
    if method == "direct":
        if full:
            raise ValueError("full working-grid output is only available for the spectral method")
        op = cone_forward_direct if transform == "cone" else aux_forward_direct
        return op(phantom, params, spec)
    if method != "spectral":
        raise ValueError(f"method must be 'direct' or 'spectral', got {method!r}")
    work, _, g = range_data(phantom, params, spec, transform, lateral)
    return g if full else crop(g, spec)


def check_phantom_range(phantom, params, spec, theorem=None, lateral=None, cells=4, **tol_kw):
    """Range test of the phantom's own transform data (forward direction)."""
    theorem = theorem or theorem_for(params, "cone")
    _, _, g = range_data(phantom, params, spec, transform_for(theorem), lateral)
    tol = RangeTolerances.around(phantom, spec, cells, **tol_kw)
    return check_range(g, theorem, params, tol)


def roundtrip(phantom, params, spec, theorem=None, lateral=None, **kw):
    """Forward transform then reconstruct; the result lives on ``spec``.

    ``rel_l2_error`` compares against the phantom sampled on ``spec``.
    """
    theorem = theorem or theorem_for(params, "cone")
    work, f_work, g = range_data(phantom, params, spec, transform_for(theorem), lateral)
    res = INVERTERS[theorem](g, params, **kw)
    f_hat = crop(res.f_hat, spec)
    truth = crop(f_work, spec)
    diag = dict(res.diagnostics, working_dims=work.dims)
    return type(res)(f_hat, rel_l2(f_hat, truth), diag)
