import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attcone import crtf
from attcone.errors import AlignmentError, CRTFFormatError, SymmetryError
from attcone.fields import (GridSpec, ScalarField, SpectralField, SupportBox, apply_multiplier,
                            boundary_level, crop, dft_forward, dft_inverse, embed, norms, pad,
                            pad_spec, rel_l2, support_box)
from attcone.phantoms import PhantomSpec, sample


def grid(dims=(16, 20), lo=-1.0, hi=1.0):
    return GridSpec.from_extent(dims, lo, hi)


def random_field(spec, seed=0):
    return ScalarField(spec, np.random.default_rng(seed).standard_normal(spec.dims))


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec((8,), (0.0,), (1.0,))
    with pytest.raises(ValueError):
        GridSpec((8, 1), (0.0, 0.0), (1.0, 1.0))
    with pytest.raises(ValueError):
        GridSpec((8, 8), (0.0, 0.0), (1.0, 0.0))
    s = GridSpec((4, 5), (1.0, -2.0), (0.5, 0.25))
    assert s.axis(1)[3] == -2.0 + 3 * 0.25
    assert s.size == 20 and s.ndim == 2


def test_from_extent_puts_sample_at_zero():
    s = grid((256, 256), -2.0, 2.0)
    assert s.spacing == (1 / 64, 1 / 64)
    assert 0.0 in s.axis(0)


def test_scalar_field_rejects_nonfinite_and_is_readonly():
    s = grid((4, 4))
    with pytest.raises(ValueError):
        ScalarField(s, np.full((4, 4), np.nan))
    f = ScalarField.zeros(s)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_dft_constant_field():
    s = grid((8, 6), -1.0, 3.0)
    f = ScalarField(s, np.full(s.dims, 2.5))
    c = dft_forward(f).coeffs
    volume = np.prod(np.array(s.dims) * np.array(s.spacing))
    assert c[0, 0] == pytest.approx(2.5 * volume, rel=1e-14)
    assert np.abs(c.ravel()[1:]).max() < 1e-12


def test_dft_pure_tone():
    s = grid((16, 8), -1.0, 1.0)
    k0 = s.freq_axes()[0][3]
    x = s.mesh()[0]
    f = ScalarField(s, np.broadcast_to(np.cos(k0 * x), s.dims))
    c = dft_forward(f).coeffs
    volume = np.prod(np.array(s.dims) * np.array(s.spacing))
    # energy only at +-k0
    mask = np.ones(s.dims, bool)
    mask[3, 0] = mask[-3, 0] = False
    assert np.abs(c[mask]).max() < 1e-12 * np.abs(c).max()
    # physical-coordinate phase: the grid sum of cos(k0 x) e^{-i k0 x} is volume / 2
    assert c[3, 0] == pytest.approx(volume / 2, rel=1e-12)


def test_dft_roundtrip_and_zero():
    f = random_field(grid((9, 12, 10)))
    back = dft_inverse(dft_forward(f))
    assert np.abs(back.values - f.values).max() <= 1e-12 * np.abs(f.values).max()
    z = SpectralField(f.spec, np.zeros(f.spec.dims, complex))
    assert np.all(dft_inverse(z).values == 0)


def test_dft_inverse_of_impulse_is_plane_wave():
    s = grid((8, 8))
    c = np.zeros(s.dims, complex)
    c[2, 1] = 1.0
    c[-2, -1] = 1.0
    out = dft_inverse(SpectralField(s, c)).values
    kx, kz = s.freq_axes()[0][2], s.freq_axes()[1][1]
    x, z = s.mesh()
    expected = 2 * np.cos(kx * x + kz * z) / (s.size * s.cell_volume)
    np.testing.assert_allclose(out, expected, atol=1e-14)


def test_dft_inverse_rejects_asymmetric_coefficients():
    s = grid((8, 8))
    c = np.zeros(s.dims, complex)
    c[2, 1] = 1.0
    with pytest.raises(SymmetryError):
        dft_inverse(SpectralField(s, c))


def test_conjugate_symmetry():
    f = random_field(grid((10, 7)), 3)
    c = dft_forward(f).coeffs
    # coefficient at -k is conj of coefficient at k (index -k mod N)
    flipped = np.roll(np.flip(c, axis=(0, 1)), shift=(1, 1), axis=(0, 1))
    assert np.abs(flipped - np.conj(c)).max() <= 1e-12 * np.abs(c).max()


@settings(max_examples=25, deadline=None)
@given(nx=st.integers(2, 12), nz=st.integers(2, 12), seed=st.integers(0, 1000))
def test_parseval(nx, nz, seed):
    f = random_field(grid((nx, nz)), seed)
    c = dft_forward(f).coeffs
    dfreq = np.prod([2 * np.pi / (d * s) for d, s in zip(f.spec.dims, f.spec.spacing)])
    lhs = np.sum(np.abs(c) ** 2) * dfreq / (2 * np.pi) ** 2
    assert lhs == pytest.approx(norms(f)[0] ** 2, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(fx=st.floats(1.0, 3.0), fz=st.floats(1.0, 3.0), seed=st.integers(0, 100))
def test_pad_crop_roundtrip(fx, fz, seed):
    f = random_field(grid((6, 9)), seed)
    p = pad(f, (fx, fz))
    back = crop(p, f.spec)
    assert back.spec == f.spec
    assert np.array_equal(back.values, f.values)
    assert norms(p)[0] == pytest.approx(norms(f)[0], rel=1e-14)


def test_pad_places_z_padding_below():
    s = grid((10, 10), 0.0, 1.0)
    p = pad_spec(s, (2.0, 2.0))
    assert p.hi[1] == pytest.approx(s.hi[1])
    assert p.origin[1] < s.origin[1]
    assert p.origin[0] < s.origin[0] and p.hi[0] > s.hi[0]
    assert all(d % 2 == 1 for d in p.dims)


def test_pad_zero_field_and_bad_factor():
    z = ScalarField.zeros(grid((4, 4)))
    assert np.all(pad(z, 2.0).values == 0)
    with pytest.raises(ValueError):
        pad(z, 0.5)


def test_crop_identity_and_constant():
    f = ScalarField(grid((5, 6)), np.full((5, 6), 3.0))
    assert np.array_equal(crop(f, f.spec).values, f.values)
    sub = GridSpec((2, 3), (f.spec.axis(0)[1], f.spec.axis(1)[2]), f.spec.spacing)
    assert np.all(crop(f, sub).values == 3.0)


def test_crop_misaligned():
    f = ScalarField.zeros(grid((8, 8)))
    off = GridSpec((2, 2), (f.spec.origin[0] + 0.3 * f.spec.spacing[0], f.spec.origin[1]), f.spec.spacing)
    with pytest.raises(AlignmentError):
        crop(f, off)
    other = GridSpec((2, 2), f.spec.origin, (f.spec.spacing[0] * 2, f.spec.spacing[1]))
    with pytest.raises(AlignmentError):
        crop(f, other)
    with pytest.raises(AlignmentError):
        embed(f, grid((4, 4)))


def test_support_box_of_bump():
    s = grid((81, 81), -2.0, 2.0)
    f = sample(PhantomSpec.single(2, radius=1.0), s)
    box = support_box(f, 1e-6)
    h = s.spacing[0]
    assert all(l >= -1.0 - h for l in box.lo) and all(u <= 1.0 + h for u in box.hi)
    assert box.within(SupportBox.box((-1 - h, -1 - h), (1 + h, 1 + h)))


def test_support_box_empty_and_constant():
    s = grid((6, 6))
    empty = support_box(ScalarField.zeros(s))
    assert empty.empty and empty.within(SupportBox.box((0, 0), (0, 0)))
    full = support_box(ScalarField(s, np.ones(s.dims)))
    assert full.lo == s.lo and full.hi == s.hi


def test_norms_examples():
    s = GridSpec((4, 4), (0, 0), (0.5, 0.25))
    assert norms(ScalarField.zeros(s)) == (0.0, 0.0)
    v = np.zeros(s.dims)
    v[1, 2] = 3.0
    l2, linf = norms(ScalarField(s, v))
    assert l2 == pytest.approx(3.0 * math.sqrt(0.125)) and linf == 3.0
    f = random_field(s)
    assert norms(f * -2.0)[0] == pytest.approx(2 * norms(f)[0])


def test_boundary_level_and_rel_l2():
    s = grid((8, 8))
    v = np.zeros(s.dims)
    v[4, 4] = 1.0
    v[0, 3] = 0.01
    assert boundary_level(ScalarField(s, v)) == pytest.approx(0.01)
    a = ScalarField(s, v)
    assert rel_l2(a, a) == 0.0
    with pytest.raises(AlignmentError):
        rel_l2(a, ScalarField.zeros(grid((8, 9))))


def test_apply_multiplier_requires_conjugate_symmetry():
    f = random_field(grid((9, 9)))
    with pytest.raises(SymmetryError):
        apply_multiplier(f, lambda xi, s: 1j * np.ones(np.broadcast(xi, s).shape))
    same = apply_multiplier(f, lambda xi, s: np.ones(np.broadcast(xi, s).shape, complex))
    np.testing.assert_allclose(same.values, f.values, atol=1e-14)


# ---------------------------------------------------------------------------
# CRTF
# ---------------------------------------------------------------------------

def test_crtf_roundtrip_is_bit_exact(tmp_path):
    f = random_field(GridSpec((3, 4, 5), (-1.0, 0.5, 2.0), (0.1, 0.2, 0.3)))
    path = tmp_path / "f.crtf"
    crtf.write(path, f)
    g = crtf.read(path)
    assert g.spec == f.spec and g.values.tobytes() == f.values.tobytes()
    sf = dft_forward(f)
    back = crtf.decode(crtf.encode(sf))
    assert np.array_equal(back.coeffs, sf.coeffs)


def test_crtf_layout():
    s = GridSpec((2, 3), (1.0, 2.0), (0.5, 0.25))
    f = ScalarField(s, np.arange(6.0).reshape(2, 3))
    buf = crtf.encode(f)
    assert buf[:4] == b"CRTF"
    assert struct.unpack_from("<III", buf, 4) == (1, 0, 2)
    assert struct.unpack_from("<2Q", buf, 16) == (2, 3)
    assert struct.unpack_from("<2d", buf, 32) == (1.0, 2.0)
    assert struct.unpack_from("<2d", buf, 48) == (0.5, 0.25)
    assert np.frombuffer(buf, "<f8", offset=64).tolist() == [0, 1, 2, 3, 4, 5]


@pytest.mark.parametrize("mutate", [
    lambda b: b"XRTF" + b[4:],
    lambda b: b[:4] + struct.pack("<I", 2) + b[8:],
    lambda b: b[:8] + struct.pack("<I", 7) + b[12:],
    lambda b: b[:-1],
    lambda b: b[:20],
])
def test_crtf_rejects_malformed(mutate):
    buf = crtf.encode(ScalarField.zeros(grid((3, 3))))
    with pytest.raises(CRTFFormatError):
        crtf.decode(mutate(buf))
