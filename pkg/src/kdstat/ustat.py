"""
Distance matrices, U-centering and the unbiased estimators built on them.

All scalar reductions over ``n x n`` arrays go through :func:`math.fsum`,
so the results do not depend on summation order (and hence are invariant
to relabeling the observations up to the rounding of the centered entries).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, SampleSizeError
from .grouped import as_sample
from .metrics import ResolvedMetric, cross_distances

MIN_U_CENTER = 4


def _fsum(a: np.ndarray) -> float:
    return math.fsum(np.ravel(a).tolist())


def pairwise_distances(s, g: ResolvedMetric) -> np.ndarray:
    """Symmetric, zero-diagonal matrix ``K(s_k, s_l)``."""
    s = as_sample(s)
    d = cross_distances(s, s, g)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


def _square(a, name="matrix") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def u_center(a) -> np.ndarray:
    """U-centered version of a square matrix.

    Off-diagonal entries are
    ``a_kl - r_k/(n-2) - c_l/(n-2) + s/((n-1)(n-2))`` with row sums ``r``,
    column sums ``c`` and total ``s``; the diagonal is zero.
    """
    a = _square(a)
    n = a.shape[0]
    if n < MIN_U_CENTER:
        raise SampleSizeError(f"U-centering needs n >= {MIN_U_CENTER}, got {n}")
    rows = a.sum(axis=1)
    cols = a.sum(axis=0)
    total = math.fsum(rows.tolist())
    out = a - rows[:, None] / (n - 2) - cols[None, :] / (n - 2) + total / ((n - 1) * (n - 2))
    np.fill_diagonal(out, 0.0)
    return out


def u_inner(a_tilde, b_tilde) -> float:
    """``(A . B) = sum_{k != l} a_kl b_kl / (n (n - 3))``."""
    a = _square(a_tilde, "first matrix")
    b = _square(b_tilde, "second matrix")
    if a.shape != b.shape:
        raise DimensionError(f"size mismatch: {a.shape} vs {b.shape}")
    n = a.shape[0]
    if n < MIN_U_CENTER:
        raise SampleSizeError(f"need n >= {MIN_U_CENTER}, got {n}")
    prod = a * b
    np.fill_diagonal(prod, 0.0)
    return _fsum(prod) / (n * (n - 3))


def dcov_sq_unbiased(a, b) -> float:
    """Unbiased squared (generalized) distance covariance from two distance matrices.

    Can be negative for finite samples; ``dcov_sq_unbiased(A, A) >= 0``.
    """
    a = _square(a)
    b = _square(b)
    if a.shape != b.shape:
        raise DimensionError(f"size mismatch: {a.shape} vs {b.shape}")
    ua = u_center(a)
    return u_inner(ua, ua if b is a else u_center(b))


def _offdiag_sum(a: np.ndarray) -> float:
    d = a.copy()
    np.fill_diagonal(d, 0.0)
    return _fsum(d)


def energy_stat(axy, axx, ayy) -> float:
    """Unbiased two-sample energy statistic.

    Parameters
    ----------
    axy:
        ``n x m`` cross distances.
    axx, ayy:
        Within-sample distance matrices; diagonals are ignored.
    """
    axy = np.asarray(axy, dtype=np.float64)
    axx = _square(axx)
    ayy = _square(ayy)
    n, m = axx.shape[0], ayy.shape[0]
    if axy.shape != (n, m):
        raise DimensionError(f"cross matrix has shape {axy.shape}, expected {(n, m)}")
    if n < 2 or m < 2:
        raise SampleSizeError("energy statistic needs n, m >= 2")
    return (
        2.0 * _fsum(axy) / (n * m)
        - _offdiag_sum(axx) / (n * (n - 1))
        - _offdiag_sum(ayy) / (m * (m - 1))
    )


def double_center_cross(kxy) -> np.ndarray:
    """Remove row and column means from an ``n x m`` matrix."""
    k = np.asarray(kxy, dtype=np.float64)
    if k.ndim != 2:
        raise DimensionError("cross matrix must be 2-d")
    if min(k.shape) < 2:
        raise SampleSizeError("double centering needs n, m >= 2")
    rows = k.mean(axis=1, keepdims=True)
    cols = k.mean(axis=0, keepdims=True)
    return k - rows - cols + math.fsum(k.ravel().tolist()) / k.size


def cdcov_sq(kxy) -> float:
    """Cross distance covariance ``sum K_hat^2 / ((n-1)(m-1))``."""
    kh = double_center_cross(kxy)
    n, m = kh.shape
    return _fsum(kh * kh) / ((n - 1) * (m - 1))
