"""CRTF: bit-exact binary container for sampled fields.

Layout (all little-endian)::

    0   4 bytes  magic b"CRTF"
    4   u32      version (1)
    8   u32      dtype (0 = float64, 1 = complex128 as interleaved re, im)
    12  u32      ndim
    16  u64[ndim] dims
        f64[ndim] origin
        f64[ndim] spacing
        payload, row-major, last axis fastest
"""
import struct

import numpy as np

from .errors import CRTFFormatError
from .fields import GridSpec, ScalarField, SpectralField

MAGIC = b"CRTF"
VERSION = 1
DTYPE_REAL = 0
DTYPE_COMPLEX = 1


def encode(field):
    if isinstance(field, SpectralField):
        dtype, payload = DTYPE_COMPLEX, np.ascontiguousarray(field.coeffs, dtype="<c16")
    elif isinstance(field, ScalarField):
        dtype, payload = DTYPE_REAL, np.ascontiguousarray(field.values, dtype="<f8")
    else:
        raise TypeError(f"cannot encode {type(field).__name__}")
    spec = field.spec
    nd = spec.ndim
    header = MAGIC + struct.pack("<III", VERSION, dtype, nd)
    header += struct.pack(f"<{nd}Q", *spec.dims)
    header += struct.pack(f"<{nd}d", *spec.origin)
    header += struct.pack(f"<{nd}d", *spec.spacing)
    return header + payload.tobytes()


def decode(buf):
    if len(buf) < 16 or buf[:4] != MAGIC:
        raise CRTFFormatError("not a CRTF file (bad magic)")
    version, dtype, nd = struct.unpack_from("<III", buf, 4)
    if version != VERSION:
        raise CRTFFormatError(f"unsupported CRTF version {version}")
    if dtype not in (DTYPE_REAL, DTYPE_COMPLEX):
        raise CRTFFormatError(f"unknown CRTF dtype code {dtype}")
    off = 16
    need = off + nd * 24
    if nd < 1 or len(buf) < need:
        raise CRTFFormatError("truncated CRTF header")
    dims = struct.unpack_from(f"<{nd}Q", buf, off)
    origin = struct.unpack_from(f"<{nd}d", buf, off + 8 * nd)
    spacing = struct.unpack_from(f"<{nd}d", buf, off + 16 * nd)
    try:
        spec = GridSpec(dims, origin, spacing)
    except ValueError as exc:
        raise CRTFFormatError(f"invalid grid in CRTF header: {exc}") from exc
    np_dtype = np.dtype("<c16" if dtype == DTYPE_COMPLEX else "<f8")
    count = spec.size
    if len(buf) != need + count * np_dtype.itemsize:
        raise CRTFFormatError("CRTF payload size does not match header")
    data = np.frombuffer(buf, dtype=np_dtype, count=count, offset=need).reshape(spec.dims)
    if dtype == DTYPE_COMPLEX:
        return SpectralField(spec, data.astype(np.complex128))
    return ScalarField(spec, data.astype(np.float64))


def write(path, field):
    with open(path, "wb") as fh:
        fh.write(encode(field))


def read(path):
    with open(path, "rb") as fh:
        return decode(fh.read())
