"""Chain-product kernels behind the transfer-matrix engine.

The hot loop of every sweep and optimisation is the ordered product of 2x2
complex layer matrices

    [[cosh(g*d), eta*sinh(g*d)], [sinh(g*d)/eta, cosh(g*d)]]

with g = i*k0*n and eta = 1/n per layer. Two interchangeable implementations
are provided: numba-compiled loops (the default whenever numba imports) and a
vectorised numpy fallback. Set STRIPCAVITY_DISABLE_NUMBA=1 to force the numpy
path; `benchmarks/bench_tmm.py` compares the two.
"""

from __future__ import annotations

import cmath
import os
import warnings

import numpy as np

ENV_FLAG = "STRIPCAVITY_DISABLE_NUMBA"


def _numba_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


def _chain_product_impl(n, d, k0):
    # input-side first: running = running @ layer
    f11 = 1.0 + 0.0j
    f12 = 0.0 + 0.0j
    f21 = 0.0 + 0.0j
    f22 = 1.0 + 0.0j
    for j in range(n.shape[0]):
        gd = 1j * k0 * n[j] * d[j]
        c = cmath.cosh(gd)
        s = cmath.sinh(gd)
        b = s / n[j]   # eta * sinh
        g = s * n[j]   # sinh / eta
        f11, f12, f21, f22 = (
            f11 * c + f12 * g,
            f11 * b + f12 * c,
            f21 * c + f22 * g,
            f21 * b + f22 * c,
        )
    return f11, f12, f21, f22


def _chain_sweep_impl(n, d, idx, values, k0):
    m = values.shape[0]
    o11 = np.empty(m, np.complex128)
    o12 = np.empty(m, np.complex128)
    o21 = np.empty(m, np.complex128)
    o22 = np.empty(m, np.complex128)
    for p in range(m):
        f11 = 1.0 + 0.0j
        f12 = 0.0 + 0.0j
        f21 = 0.0 + 0.0j
        f22 = 1.0 + 0.0j
        for j in range(n.shape[0]):
            dj = values[p] if j == idx else d[j]
            gd = 1j * k0 * n[j] * dj
            c = cmath.cosh(gd)
            s = cmath.sinh(gd)
            b = s / n[j]
            g = s * n[j]
            f11, f12, f21, f22 = (
                f11 * c + f12 * g,
                f11 * b + f12 * c,
                f21 * c + f22 * g,
                f21 * b + f22 * c,
            )
        o11[p] = f11
        o12[p] = f12
        o21[p] = f21
        o22[p] = f22
    return o11, o12, o21, o22


chain_product_numpy = _chain_product_impl


def chain_sweep_numpy(n, d, idx, values, k0):
    """Vectorised fallback: the chain product batched over the swept axis."""
    m = values.shape[0]
    f11 = np.ones(m, np.complex128)
    f12 = np.zeros(m, np.complex128)
    f21 = np.zeros(m, np.complex128)
    f22 = np.ones(m, np.complex128)
    for j in range(n.shape[0]):
        dj = values if j == idx else d[j]
        gd = 1j * k0 * n[j] * dj
        c = np.cosh(gd)
        s = np.sinh(gd)
        b = s / n[j]
        g = s * n[j]
        f11, f12, f21, f22 = (
            f11 * c + f12 * g,
            f11 * b + f12 * c,
            f21 * c + f22 * g,
            f21 * b + f22 * c,
        )
    return f11, f12, f21, f22


chain_product_numba = None
chain_sweep_numba = None
NUMBA_ENABLED = False

if not _numba_disabled():
    try:
        import numba
    except ImportError:  # pragma: no cover - depends on environment
        warnings.warn(
            "numba is unavailable; falling back to the slower numpy kernels",
            stacklevel=2,
        )
    else:
        chain_product_numba = numba.njit(cache=True)(_chain_product_impl)
        chain_sweep_numba = numba.njit(cache=True)(_chain_sweep_impl)
        NUMBA_ENABLED = True

if NUMBA_ENABLED:
    chain_product = chain_product_numba
    chain_sweep = chain_sweep_numba
else:
    chain_product = chain_product_numpy
    chain_sweep = chain_sweep_numpy
