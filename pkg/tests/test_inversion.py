import math

import numpy as np
import pytest

from attcone.errors import DomainError
from attcone.fields import GridSpec, ScalarField, crop, pad_spec, rel_l2
from attcone.inversion import (INVERTERS, chain_symbol, cumulative_weighted_integral, invert_A_even,
                               invert_A_odd, invert_C_even, invert_C_odd, symbol_exactness,
                               tail_weighted_integral)
from attcone.phantoms import Bump, PhantomSpec, sample, sample_dz
from attcone.pipeline import range_data, roundtrip
from attcone.rangeops import RangeTolerances
from attcone.transforms import TransformParams, aux_forward_spectral, cone_forward_spectral

Q = math.pi / 4
P1 = TransformParams(1.0, Q, 1)
P2 = TransformParams(2.0, Q, 2)
P3 = TransformParams(2.0, Q, 3)


def analytic_h(ph, spec, params):
    """``a f - df/dz`` sampled from the bump formula."""
    return sample(ph, spec) * params.a - sample_dz(ph, spec)


# ---------------------------------------------------------------------------
# z-integrals
# ---------------------------------------------------------------------------

def test_cumulative_zero_and_spike():
    s = GridSpec.from_extent((3, 40), -1, 1)
    assert np.all(cumulative_weighted_integral(ScalarField.zeros(s), P1).values == 0)
    v = np.zeros(s.dims)
    j = 17
    v[:, j] = 2.0
    out = cumulative_weighted_integral(ScalarField(s, v), P1).values
    zj, dz = s.axis(1)[j], s.spacing[1]
    ramp = 2.0 * math.exp(-P1.a * zj) * dz
    assert np.all(out[:, :j] == 0)
    np.testing.assert_allclose(out[:, j], 0.5 * ramp, rtol=1e-14)
    np.testing.assert_allclose(out[:, j + 1:], ramp, rtol=1e-14)


def moment_free_h(spec, params):
    ph = PhantomSpec((Bump((0.0, 0.1), 0.9, 1.0), Bump((0.3, -0.6), 0.5, -2.0)))
    return ph, analytic_h(ph, spec, params)


def test_cumulative_returns_to_zero_for_moment_free_family():
    s = GridSpec.from_extent((16, 1024), -2, 2)
    _, h = moment_free_h(s, P1)
    cum = cumulative_weighted_integral(h, P1).values
    assert np.abs(cum[:, -1]).max() <= 1e-8 * np.abs(cum).max()


def test_tail_integral_spike_and_zero():
    s = GridSpec.from_extent((2, 30), -1, 1)
    assert np.all(tail_weighted_integral(ScalarField.zeros(s), P1).values == 0)
    v = np.zeros(s.dims)
    v[:, 20] = 1.0
    out = tail_weighted_integral(ScalarField(s, v), P1, "trapezoid").values
    assert np.all(out[:, 21:] == 0)
    z, dz = s.axis(1), s.spacing[1]
    # half a cell from each interval touching the spike
    np.testing.assert_allclose(out[:, 20], 0.5 * dz, rtol=1e-14)
    np.testing.assert_allclose(out[:, :20], dz * np.exp(-P1.a * (z[20] - z[:20])) * np.ones((2, 1)),
                               rtol=1e-12)


@pytest.mark.parametrize("rule,order", [("trapezoid", 2), ("linear", 2), ("cubic", 4)])
def test_tail_integral_convergence(rule, order):
    # f = h integrated back exactly: T(h) = f for h = a f - f'
    errs = []
    for nz in (128, 256, 512):
        s = GridSpec.from_extent((4, nz), -2, 2)
        ph, h = moment_free_h(s, P1)
        errs.append(rel_l2(tail_weighted_integral(h, P1, rule), sample(ph, s)))
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert rates[-1] >= order - 0.5, rates


def test_top_down_and_bottom_up_agree_on_moment_free_data():
    s = GridSpec.from_extent((8, 1024), -2, 2)
    ph, h = moment_free_h(s, P1)
    g = ScalarField(s, h.values)
    tail = tail_weighted_integral(g, P1, "trapezoid").values
    z = s.axis(1)
    up = -np.exp(P1.a * z) * cumulative_weighted_integral(g, P1).values
    assert np.abs(tail - up).max() <= 1e-6 * np.abs(tail).max()


def test_unknown_rule_and_method():
    s = GridSpec.from_extent((9, 9), -1, 1)
    with pytest.raises(ValueError):
        tail_weighted_integral(ScalarField.zeros(s), P1, "simpson")
    with pytest.raises(ValueError):
        invert_C_odd(ScalarField.zeros(s), P1, method="sideways")


# ---------------------------------------------------------------------------
# round trips
# ---------------------------------------------------------------------------

def test_roundtrip_C_odd():
    r = roundtrip(PhantomSpec.single(2), P1, GridSpec.from_extent((256, 256), -2, 2))
    assert r.rel_l2_error <= 1e-3
    assert r.diagnostics["method"] == "top-down" and r.diagnostics["rule"] == "cubic"


def test_roundtrip_C_even():
    r = roundtrip(PhantomSpec.single(3, radius=1.0), P2, GridSpec.from_extent((48, 48, 48), -2, 2))
    assert r.rel_l2_error <= 5e-3


def test_roundtrip_A_odd():
    r = roundtrip(PhantomSpec.single(4, radius=1.5), P3, GridSpec.from_extent((24,) * 4, -2, 2), "a-odd")
    assert r.rel_l2_error <= 1e-6


def test_roundtrip_A_even():
    r = roundtrip(PhantomSpec.single(3, radius=1.0), P2, GridSpec.from_extent((48,) * 3, -2, 2), "a-even")
    assert r.rel_l2_error <= 1e-6


@pytest.mark.parametrize("theorem,params,dims", [
    ("c-odd", P1, (15, 17)), ("c-even", P2, (9, 9, 11)),
    ("a-odd", P3, (5, 5, 5, 7)), ("a-even", P2, (9, 9, 11)),
])
def test_zero_linearity_and_scaling(theorem, params, dims):
    s = GridSpec.from_extent(dims, -1, 1)
    inv = INVERTERS[theorem]
    rng = np.random.default_rng(4)
    kw = dict(eps_support=0.5)
    zero = inv(ScalarField.zeros(s), params, **kw).f_hat.values
    assert np.all(zero == 0)
    g1 = ScalarField(s, rng.standard_normal(dims))
    g2 = ScalarField(s, rng.standard_normal(dims))
    both = inv(g1 + g2, params, **kw).f_hat.values
    split = inv(g1, params, **kw).f_hat.values + inv(g2, params, **kw).f_hat.values
    assert np.abs(both - split).max() <= 1e-10 * np.abs(split).max()
    scaled = inv(g1 * 3.5, params, **kw).f_hat.values
    ref = 3.5 * inv(g1, params, **kw).f_hat.values
    assert np.abs(scaled - ref).max() <= 1e-12 * np.abs(ref).max()


def test_aux_forward_of_A_odd_inverse_returns_data():
    _, _, g = range_data(PhantomSpec.single(4, radius=1.5), P3, GridSpec.from_extent((24,) * 4, -2, 2), "aux")
    back = aux_forward_spectral(invert_A_odd(g, P3).f_hat, P3)
    assert rel_l2(back, g) <= 1e-10


def test_A_odd_rejects_n1():
    with pytest.raises(DomainError):
        invert_A_odd(ScalarField.zeros(GridSpec.from_extent((8, 8), -1, 1)), P1)


def test_truth_fills_error():
    s = GridSpec.from_extent((128, 128), -2, 2)
    work, f, g = range_data(PhantomSpec.single(2), P1, s)
    r = invert_C_odd(g, P1, truth=f)
    assert r.rel_l2_error == pytest.approx(rel_l2(r.f_hat, f))
    assert invert_C_odd(g, P1).rel_l2_error is None


def test_warns_on_data_far_outside_range():
    s = GridSpec.from_extent((64, 64), -2, 2)
    ph = PhantomSpec.single(2)
    work = pad_spec(s, (2.0, 3.0))
    raw = sample(ph, work)
    tol = RangeTolerances.around(ph, s)
    with pytest.warns(UserWarning, match="range test"):
        invert_C_odd(raw, P1, tol=tol)


def test_auto_method_switch():
    ph = PhantomSpec.single(2)
    near = GridSpec.from_extent((64, 64), -2, 2)
    _, _, g = range_data(ph, P1, near)
    assert invert_C_odd(g, P1, method="auto").diagnostics["method"] == "bottom-up"
    far = GridSpec((33, 65), (-2.0, 18.0), (0.125, 0.25))
    assert invert_C_odd(ScalarField.zeros(far), P1, method="auto").diagnostics["method"] == "top-down"


# ---------------------------------------------------------------------------
# padding and symbols
# ---------------------------------------------------------------------------

def test_top_down_error_independent_of_z_padding():
    # the whole chain is the local operator a - d/dz and its inverse, so
    # periodic wrap never reaches the reconstruction; only dz matters
    s = GridSpec.from_extent((64, 256), -2, 2)
    ph = PhantomSpec.single(2)
    errs = []
    for fz in (1.0, 2.0, 4.0):
        w = pad_spec(s, (4.0, fz))
        f = sample(ph, w)
        r = invert_C_odd(cone_forward_spectral(f, P1), P1, eps_support=0.4)
        errs.append(rel_l2(crop(r.f_hat, s), crop(f, s)))
    assert max(errs) - min(errs) <= 1e-4 * max(errs)
    assert max(errs) <= 1e-3


def test_roundtrip_converges_in_dz():
    ph = PhantomSpec.single(2)
    errs = [roundtrip(ph, P1, GridSpec.from_extent((64, nz), -2, 2)).rel_l2_error for nz in (256, 512, 1024)]
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert all(r >= 3.5 for r in rates), rates
    assert errs[-1] <= 1e-6


@pytest.mark.parametrize("theorem,params", [("c-odd", P1), ("c-even", P2), ("a-odd", P3), ("a-even", P2),
                                            ("c-odd", TransformParams(0.4, 1.1, 3))])
def test_chain_symbols_invert_forward_multipliers(theorem, params):
    spec = GridSpec.from_extent((15,) * (params.n + 1), -2, 2)
    assert symbol_exactness(theorem, params, spec) <= 1e-12


def test_fused_symbol_conjugate_symmetric():
    rng = np.random.default_rng(3)
    xi, s = rng.uniform(0, 30, 40), rng.uniform(-30, 30, 40)
    for th in ("a-even", "c-even"):
        np.testing.assert_allclose(chain_symbol(th, P2, xi, -s), np.conj(chain_symbol(th, P2, xi, s)),
                                   rtol=1e-13)


def test_inverters_agree_with_direct_symbol_division():
    # oracle: divide by the forward multiplier directly in Fourier space
    from attcone.fields import apply_multiplier
    from attcone.transforms import multiplier_C

    s = GridSpec.from_extent((65, 65), -2, 2)
    rng = np.random.default_rng(0)
    g = ScalarField(s, rng.standard_normal(s.dims))
    oracle = apply_multiplier(g, lambda xi, sg: 1.0 / multiplier_C(P1, xi, sg))
    # the z-integral is not periodic, so compare on the spectral chain only
    from attcone.rangeops import apply_range_map

    h = apply_range_map(g, "c-odd", P1, check_boundary=False)
    chain = apply_multiplier(h, lambda xi, sg: 1.0 / (P1.alpha * (P1.a - 1j * sg)))
    assert rel_l2(chain, oracle) <= 1e-12
