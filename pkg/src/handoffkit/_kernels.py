"""Numeric inner loops, in two interchangeable flavours.

Every kernel exists as ``<name>_numba`` (``@njit``) and ``<name>_numpy``.
The unsuffixed name is bound to the numba variant unless the environment
variable ``HANDOFFKIT_DISABLE_NUMBA`` is set to a truthy value or numba
cannot be imported, in which case the numpy variant is used. Both variants
agree to within floating-point rounding (libm vs numpy ``log``); the
test-suite checks that.
"""

import os

import numpy as np

EPS = 1e-6

_flag = os.environ.get("HANDOFFKIT_DISABLE_NUMBA", "").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _disabled


# --------------------------------------------------------------------------
# pure numpy


def normalize_matrix_numpy(raw, lower, upper, eps):
    out = (raw - lower) / (upper - lower)
    return np.minimum(np.maximum(out, eps), 1.0)


def weighted_log_sum_numpy(norm, coeffs):
    # explicit left-to-right accumulation keeps the summation order identical
    # to the compiled loop
    n, m = norm.shape
    out = np.zeros(n)
    logs = np.log(norm)
    for j in range(m):
        out = out + coeffs[j] * logs[:, j]
    return out


def pareto_mask_numpy(values):
    # ge[i, j]: row j >= row i everywhere; gt[i, j]: row j > row i somewhere
    a = values[:, None, :]
    b = values[None, :, :]
    ge = np.all(b >= a, axis=2)
    gt = np.any(b > a, axis=2)
    return ~np.any(ge & gt, axis=1)


def rss_vector_numpy(px, py, cx, cy, radius, p0, d0, n_exp):
    d = np.hypot(cx - px, cy - py)
    rss = p0 - 10.0 * n_exp * np.log10(np.maximum(d, d0) / d0)
    return np.where(d > radius, np.nan, rss)


# --------------------------------------------------------------------------
# numba

if HAS_NUMBA:

    @njit(cache=True)
    def normalize_matrix_numba(raw, lower, upper, eps):
        n, m = raw.shape
        out = np.empty((n, m))
        for i in range(n):
            for j in range(m):
                x = (raw[i, j] - lower[j]) / (upper[j] - lower[j])
                if x < eps:
                    x = eps
                if x > 1.0:
                    x = 1.0
                out[i, j] = x
        return out

    @njit(cache=True)
    def weighted_log_sum_numba(norm, coeffs):
        n, m = norm.shape
        out = np.zeros(n)
        for i in range(n):
            acc = 0.0
            for j in range(m):
                acc = acc + coeffs[j] * np.log(norm[i, j])
            out[i] = acc
        return out

    @njit(cache=True)
    def pareto_mask_numba(values):
        n, k = values.shape
        keep = np.ones(n, dtype=np.bool_)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                ge = True
                gt = False
                for c in range(k):
                    if values[j, c] < values[i, c]:
                        ge = False
                        break
                    if values[j, c] > values[i, c]:
                        gt = True
                if ge and gt:
                    keep[i] = False
                    break
        return keep

    @njit(cache=True)
    def rss_vector_numba(px, py, cx, cy, radius, p0, d0, n_exp):
        n = cx.shape[0]
        out = np.empty(n)
        for i in range(n):
            d = np.hypot(cx[i] - px, cy[i] - py)
            if d > radius[i]:
                out[i] = np.nan
            else:
                r = d if d > d0[i] else d0[i]
                out[i] = p0[i] - 10.0 * n_exp[i] * np.log10(r / d0[i])
        return out

else:  # pragma: no cover
    normalize_matrix_numba = normalize_matrix_numpy
    weighted_log_sum_numba = weighted_log_sum_numpy
    pareto_mask_numba = pareto_mask_numpy
    rss_vector_numba = rss_vector_numpy


if USE_NUMBA:
    normalize_matrix = normalize_matrix_numba
    weighted_log_sum = weighted_log_sum_numba
    pareto_mask = pareto_mask_numba
    rss_vector = rss_vector_numba
else:
    normalize_matrix = normalize_matrix_numpy
    weighted_log_sum = weighted_log_sum_numpy
    pareto_mask = pareto_mask_numpy
    rss_vector = rss_vector_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"


def warmup():
    """Force JIT compilation of every kernel (no-op on the numpy path)."""
    raw = np.array([[0.5, 0.2]])
    lo = np.zeros(2)
    hi = np.ones(2)
    normalize_matrix(raw, lo, hi, EPS)
    weighted_log_sum(raw, np.ones(2))
    pareto_mask(raw)
    one = np.ones(1)
    rss_vector(0.0, 0.0, one, one, one, one, one, one)
