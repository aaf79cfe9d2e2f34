"""
Hot assembly kernels.

Every kernel has a compiled loop version (``*_numba``) and a vectorized
numpy version (``*_numpy``).  The public name is bound to the compiled one
when numba is importable and ``PHSOLVE_DISABLE_NUMBA`` is unset.  Both
versions must agree to rounding; ``tests/test_kernels.py`` checks that.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit

__all__ = [
    "band_matrix",
    "symmetrized_product",
    "similarity_scale",
    "column_scale",
    "congruence",
]


# -- band_matrix -------------------------------------------------------------

def band_matrix_numpy(n, offsets, weights):
    out = np.zeros((n, n))
    for off, w in zip(offsets, weights):
        if abs(off) >= n:
            continue
        idx = np.arange(max(0, -off), min(n, n - off))
        out[idx, idx + off] = w
    return out


@njit(cache=True)
def band_matrix_numba(n, offsets, weights):
    out = np.zeros((n, n))
    for q in range(offsets.shape[0]):
        off = offsets[q]
        w = weights[q]
        for j in range(n):
            k = j + off
            if 0 <= k < n:
                out[j, k] = w
    return out


# -- symmetrized_product: (w_j + w_k) * D_jk, i.e. W D + D W -----------------

def symmetrized_product_numpy(d, w):
    return (w[:, None] + w[None, :]) * d


@njit(cache=True)
def symmetrized_product_numba(d, w):
    n = d.shape[0]
    out = np.zeros_like(d)
    for j in range(n):
        for k in range(n):
            v = d[j, k]
            if v != 0.0:
                out[j, k] = (w[j] + w[k]) * v
    return out


# -- similarity_scale: M_jk * exp(f_j - f_k) on the nonzero pattern ----------

def similarity_scale_numpy(m, f):
    out = np.zeros_like(m)
    rows, cols = np.nonzero(m)
    expo = f[rows] - f[cols]
    max_expo = float(np.max(np.abs(expo))) if expo.size else 0.0
    if max_expo > 700.0:
        return out, max_expo
    out[rows, cols] = m[rows, cols] * np.exp(expo)
    return out, max_expo


@njit(cache=True)
def similarity_scale_numba(m, f):
    n = m.shape[0]
    out = np.zeros_like(m)
    max_expo = 0.0
    for j in range(n):
        for k in range(n):
            if m[j, k] != 0.0:
                e = abs(f[j] - f[k])
                if e > max_expo:
                    max_expo = e
    if max_expo > 700.0:
        return out, max_expo
    for j in range(n):
        for k in range(n):
            v = m[j, k]
            if v != 0.0:
                out[j, k] = v * np.exp(f[j] - f[k])
    return out, max_expo


# -- column_scale: M diag(w) --------------------------------------------------

def column_scale_numpy(m, w):
    return m * w[None, :]


@njit(cache=True)
def column_scale_numba(m, w):
    n, p = m.shape
    out = np.empty_like(m)
    for j in range(n):
        for k in range(p):
            out[j, k] = m[j, k] * w[k]
    return out


# -- congruence: B = e^{-f} M e^{f} and its antisymmetric defect B - B^T -----

def congruence_numpy(m, f):
    b, _ = similarity_scale_numpy(m, -f)
    return b, b - b.T


@njit(cache=True)
def congruence_numba(m, f):
    b, _ = similarity_scale_numba(m, -f)
    return b, b - b.T


if HAVE_NUMBA:
    band_matrix = band_matrix_numba
    symmetrized_product = symmetrized_product_numba
    similarity_scale = similarity_scale_numba
    column_scale = column_scale_numba
    congruence = congruence_numba
else:
    band_matrix = band_matrix_numpy
    symmetrized_product = symmetrized_product_numpy
    similarity_scale = similarity_scale_numpy
    column_scale = column_scale_numpy
    congruence = congruence_numpy
