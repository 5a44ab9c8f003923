"""
Two-sample t-test for equality of high-dimensional distributions.

The statistic is the unbiased energy statistic studentized by a pooled
variance built from the cross distance covariance and the two distance
variances; under the null it is approximately ``t`` with
``(n-1)(m-1) + v_n + v_m`` degrees of freedom, ``v_s = s(s-3)/2``.
All pieces cost O((n+m)^2 p~).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ConfigurationError, DegenerateSampleError, DimensionError, SampleSizeError
from .grouped import GroupSpec, as_sample
from .metrics import ResolvedMetric, resolve_bandwidths
from .statdist import chi2_sample, make_rng, normal_cdf, t_sf, t_upper_quantile
from .ustat import cdcov_sq, dcov_sq_unbiased, energy_stat, pairwise_distances


def v_count(s: int) -> int:
    """``s(s-3)/2``."""
    return s * (s - 3) // 2


def homogeneity_df(n: int, m: int) -> int:
    return (n - 1) * (m - 1) + v_count(n) + v_count(m)


def a_nm(n: int, m: int) -> float:
    return math.sqrt(1.0 / (n * m) + 1.0 / (2 * n * (n - 1)) + 1.0 / (2 * m * (m - 1)))


@dataclass(frozen=True)
class HomogeneityResult:
    energy: float
    cdcov_sq: float
    dvar_x: float
    dvar_y: float
    s_pool: float
    a_nm: float
    statistic: float
    df: int
    p_value: float
    reject: bool
    alpha: float
    metric: Optional[ResolvedMetric] = None

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "reject": self.reject,
            "energy": self.energy,
            "s_pool": self.s_pool,
            "components": {
                "cdcov_sq": self.cdcov_sq,
                "dvar_x": self.dvar_x,
                "dvar_y": self.dvar_y,
            },
        }


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


def homogeneity_from_distances(kxx, kyy, kxy, alpha: float = 0.05) -> HomogeneityResult:
    """Run the test on precomputed distance matrices."""
    alpha = _check_alpha(alpha)
    kxx = np.asarray(kxx, dtype=np.float64)
    kyy = np.asarray(kyy, dtype=np.float64)
    n, m = kxx.shape[0], kyy.shape[0]
    if n < 4 or m < 4:
        raise SampleSizeError(f"the homogeneity test needs n, m >= 4 (got n={n}, m={m})")
    energy = energy_stat(kxy, kxx, kyy)
    cd = cdcov_sq(kxy)
    vx = dcov_sq_unbiased(kxx, kxx)
    vy = dcov_sq_unbiased(kyy, kyy)
    vn, vm = v_count(n), v_count(m)
    df = homogeneity_df(n, m)
    s_pool = 4.0 * ((n - 1) * (m - 1) * cd + vn * vx + vm * vy) / df
    if not s_pool > 0.0:
        raise DegenerateSampleError("pooled variance is zero: all pairwise distances are identical")
    a = a_nm(n, m)
    stat = energy / (a * math.sqrt(s_pool))
    p = float(t_sf(stat, df))
    return HomogeneityResult(
        energy=energy,
        cdcov_sq=cd,
        dvar_x=vx,
        dvar_y=vy,
        s_pool=s_pool,
        a_nm=a,
        statistic=stat,
        df=df,
        p_value=p,
        reject=bool(stat > t_upper_quantile(alpha, df)),
        alpha=alpha,
    )


def homogeneity_test(x, y, g: Optional[GroupSpec] = None, alpha: float = 0.05) -> HomogeneityResult:
    """Test ``H0: X and Y have the same distribution``.

    Parameters
    ----------
    x, y:
        ``n x p~`` and ``m x p~`` samples, ``n, m >= 4``.
    g:
        Grouping and semimetric; defaults to unit groups with Euclidean
        ``rho``. Median-heuristic bandwidths are taken from the pooled
        sample.
    alpha:
        Level of the one-sided (upper tail) test.
    """
    x = as_sample(x, min_rows=4, name="X")
    y = as_sample(y, min_rows=4, name="Y")
    if x.shape[1] != y.shape[1]:
        raise DimensionError(f"X has {x.shape[1]} columns, Y has {y.shape[1]}")
    if g is None:
        g = GroupSpec.unit(x.shape[1])
    g.with_dim(x.shape[1])
    pooled = np.vstack([x, y])
    metric = resolve_bandwidths(g, pooled)
    k = pairwise_distances(pooled, metric)
    n = x.shape[0]
    res = homogeneity_from_distances(k[:n, :n], k[n:, n:], k[:n, n:], alpha)
    return replace(res, metric=metric)


@dataclass(frozen=True)
class PowerParams:
    """Limiting variance components and the signal for the power curves.

    ``delta`` is the limiting energy gap used by :func:`exact_power_mc`;
    ``delta0`` and ``alpha0`` (the limit of ``m/n``) drive
    :func:`approx_power`.
    """

    sigma_sq: float = 1.0
    sigma_x_sq: float = 1.0
    sigma_y_sq: float = 1.0
    delta: float = 0.0
    delta0: float = 0.0
    alpha0: float = 1.0

    def __post_init__(self):
        for name in ("sigma_sq", "sigma_x_sq", "sigma_y_sq"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        if not self.alpha0 > 0:
            raise ConfigurationError("alpha0 must be positive")


def sigma_nm(pp: PowerParams, n: int, m: int) -> float:
    return math.sqrt(
        pp.sigma_sq / (n * m)
        + pp.sigma_x_sq / (2 * n * (n - 1))
        + pp.sigma_y_sq / (2 * m * (m - 1))
    )


_MC_BLOCK = 10_000


def _phi_block(pp: PowerParams, n: int, m: int, t: float, seed: int, block: int, size: int) -> np.ndarray:
    rng = make_rng(seed, block)
    dfc, vn, vm = (n - 1) * (m - 1), v_count(n), v_count(m)
    mix = (
        pp.sigma_sq * chi2_sample(dfc, rng, size)
        + pp.sigma_x_sq * chi2_sample(vn, rng, size)
        + pp.sigma_y_sq * chi2_sample(vm, rng, size)
    ) / (dfc + vn + vm)
    return normal_cdf((a_nm(n, m) * np.sqrt(mix) * t - pp.delta) / sigma_nm(pp, n, m))


def exact_power_mc(
    pp: PowerParams,
    n: int,
    m: int,
    t: float,
    reps: int = 50_000,
    seed: int = 0,
    workers: int = 1,
    return_se: bool = False,
):
    """Monte Carlo value of ``phi_{n,m}(t) = lim_p P(T_{n,m} <= t)``.

    The power of the level-``alpha`` test is ``1 - phi`` at
    ``t = q_{alpha, df}``. Draws are split into fixed blocks of 10 000,
    block ``b`` using stream ``b`` of ``seed``, so the estimate does not
    depend on ``workers``.
    """
    if reps < 1:
        raise ConfigurationError("reps must be >= 1")
    if n < 4 or m < 4:
        raise SampleSizeError("n and m must be >= 4")
    sizes = [min(_MC_BLOCK, reps - b0) for b0 in range(0, reps, _MC_BLOCK)]
    jobs = [(pp, n, m, float(t), seed, b, s) for b, s in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda j: _phi_block(*j), jobs))
    else:
        parts = [_phi_block(*j) for j in jobs]
    vals = np.concatenate(parts)
    est = math.fsum(vals.tolist()) / reps
    if not return_se:
        return est
    se = float(vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else float("nan")
    return est, se


def approx_power(pp: PowerParams, t: float) -> float:
    """Large-sample limit of ``phi_{n,m}(t)`` when ``Delta = Delta0/sqrt(nm)``."""
    a0 = pp.alpha0
    s2, sx2, sy2 = pp.sigma_sq, pp.sigma_x_sq, pp.sigma_y_sq
    m0 = (2 * a0 * s2 + sx2 + sy2 * a0 * a0) / (2 * a0 + 1 + a0 * a0)
    scale = math.sqrt((2 * a0 + a0 * a0 + 1) / (2 * a0 * s2 + a0 * a0 * sx2 + sy2))
    shift = pp.delta0 * math.sqrt(2 * a0 / (2 * s2 * a0 + sx2 * a0 * a0 + sy2))
    return float(normal_cdf(scale * math.sqrt(m0) * t - shift))
