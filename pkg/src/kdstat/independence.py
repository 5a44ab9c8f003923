"""
Studentized distance-covariance t-test of independence.

With ``nu = n(n-3)/2`` and the bias-corrected distance correlation
``R = D2(X,Y) / sqrt(D2(X,X) D2(Y,Y))`` the statistic
``sqrt(nu - 1) R / sqrt(1 - R^2)`` is approximately ``t_{nu-1}`` under
independence when the dimensions are large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import (
    ConfigurationError,
    DegenerateSampleError,
    SampleSizeError,
    SingularStatisticError,
)
from .grouped import GroupSpec, as_sample
from .metrics import ResolvedMetric, resolve_bandwidths
from .statdist import noncentral_t_cdf, t_sf
from .ustat import dcov_sq_unbiased, pairwise_distances, u_center, u_inner


def nu_count(n: int) -> int:
    return n * (n - 3) // 2


@dataclass(frozen=True)
class DependenceResult:
    dcov_sq: float
    dvar_x: float
    dvar_y: float
    dcorr_sq: float
    nu: int
    statistic: float
    p_value: float
    reject: bool
    alpha: float
    metric_x: Optional[ResolvedMetric] = None
    metric_y: Optional[ResolvedMetric] = None

    @property
    def df(self) -> int:
        return self.nu - 1

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "nu": self.nu,
            "p_value": self.p_value,
            "reject": self.reject,
            "dcov_sq": self.dcov_sq,
            "dvar_x": self.dvar_x,
            "dvar_y": self.dvar_y,
            "dcorr_sq": self.dcorr_sq,
        }


def dependence_from_distances(kx, ky, alpha: float = 0.05) -> DependenceResult:
    """Run the test on precomputed ``n x n`` distance matrices."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    kx = np.asarray(kx, dtype=np.float64)
    ky = np.asarray(ky, dtype=np.float64)
    n = kx.shape[0]
    if n < 4:
        raise SampleSizeError(f"the independence test needs n >= 4, got {n}")
    ax, ay = u_center(kx), u_center(ky)
    dxy = u_inner(ax, ay)
    vx = u_inner(ax, ax)
    vy = u_inner(ay, ay)
    if not (vx > 0 and vy > 0):
        raise DegenerateSampleError("a sample has zero distance variance (constant data)")
    r = dxy / math.sqrt(vx * vy)
    if abs(r) >= 1.0:
        raise SingularStatisticError(f"|dcor^2| = {abs(r):.6g} >= 1; the t transform is undefined")
    nu = nu_count(n)
    stat = math.sqrt(nu - 1) * r / math.sqrt(1.0 - r * r)
    p = float(t_sf(stat, nu - 1))
    return DependenceResult(
        dcov_sq=dxy,
        dvar_x=vx,
        dvar_y=vy,
        dcorr_sq=r,
        nu=nu,
        statistic=stat,
        p_value=p,
        reject=p < alpha,
        alpha=alpha,
    )


def dependence_test(
    x,
    y,
    gx: Optional[GroupSpec] = None,
    gy: Optional[GroupSpec] = None,
    alpha: float = 0.05,
) -> DependenceResult:
    """Test ``H0: X and Y are independent`` from paired samples.

    ``gx`` and ``gy`` may use different groupings and semimetric kinds;
    each side's median-heuristic bandwidths come from that side only.
    """
    x = as_sample(x, min_rows=4, name="X")
    y = as_sample(y, min_rows=4, name="Y")
    if x.shape[0] != y.shape[0]:
        raise SampleSizeError(f"X has {x.shape[0]} rows but Y has {y.shape[0]}")
    gx = GroupSpec.unit(x.shape[1]) if gx is None else gx.with_dim(x.shape[1])
    gy = GroupSpec.unit(y.shape[1]) if gy is None else gy.with_dim(y.shape[1])
    mx = resolve_bandwidths(gx, x)
    my = resolve_bandwidths(gy, y)
    res = dependence_from_distances(pairwise_distances(x, mx), pairwise_distances(y, my), alpha)
    return replace(res, metric_x=mx, metric_y=my)


def mdd_sq_unbiased(x, y) -> float:
    """Unbiased squared martingale difference divergence of scalar ``y`` given ``x``.

    The distance-covariance U-statistic with ``|x - x'|`` on the
    predictor side and ``|y - y'|^2 / 2`` on the response side.
    """
    x = as_sample(x, min_rows=4, name="X")
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != x.shape[0]:
        raise SampleSizeError(f"X has {x.shape[0]} rows but y has {y.size} entries")
    a = cdist(x, x)
    b = 0.5 * (y[:, None] - y[None, :]) ** 2
    return dcov_sq_unbiased(a, b)


def local_alt_power(psi0: float, nu: int, t: float) -> float:
    """``P(t_{nu-1, psi0} <= t)``: limit of ``P(T_n <= t)`` under ``psi = psi0/sqrt(nu)``."""
    if nu < 2:
        raise ConfigurationError(f"nu must be >= 2, got {nu}")
    return noncentral_t_cdf(t, nu - 1, psi0)
