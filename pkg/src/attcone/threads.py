"""Process-wide worker count shared by the FFT and quadrature kernels.

Results never depend on the worker count: FFT workers split independent 1-D
transforms, and the quadrature kernel sums each output sample in a fixed order.
"""
import logging
import os

log = logging.getLogger(__name__)

_nthreads = os.cpu_count() or 1


def get_threads():
    return _nthreads


def set_threads(n):
    global _nthreads
    n = int(n)
    if n < 1:
        raise ValueError(f"thread count must be >= 1, got {n}")
    _nthreads = n


def numba_threads():
    """Worker count usable by numba, clamped to its configured pool size."""
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    if _nthreads > limit:
        log.debug("numba pool limited to %d threads (requested %d)", limit, _nthreads)
    return min(_nthreads, limit)
