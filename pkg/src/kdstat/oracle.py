"""
Definition-level reference implementations.

The hypothesis tests never call into this module. It holds the slow, literal
forms (fourth-order U-statistic kernels, pairwise kernel averages,
group-by-group sums) that the fast estimators are checked against, and
plug-in versions of the population scale quantities.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SampleSizeError
from .grouped import as_sample
from .metrics import ResolvedMetric, cross_distances, kdist, rho_matrix
from .ustat import u_center, u_inner

_PERMS4 = list(itertools.permutations(range(4)))


def _dist_matrix(s: np.ndarray, metric: ResolvedMetric) -> np.ndarray:
    n = s.shape[0]
    d = np.zeros((n, n))
    for k in range(n):
        for l in range(k + 1, n):
            d[k, l] = d[l, k] = kdist(metric, s[k], s[l])
    return d


def dcov_sq_from_kernel(a, b) -> float:
    """Average of the order-four kernel ``h`` over all 4-subsets.

    ``h`` averages ``a_st b_st + a_st b_uv - 2 a_st b_su`` over the 24
    orderings ``(s, t, u, v)`` of the subset.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a.shape[0]
    if n < 4:
        raise SampleSizeError("need n >= 4")
    terms = []
    for quad in itertools.combinations(range(n), 4):
        h = 0.0
        for perm in _PERMS4:
            s, t, u, v = (quad[i] for i in perm)
            h += a[s, t] * b[s, t] + a[s, t] * b[u, v] - 2.0 * a[s, t] * b[s, u]
        terms.append(h / 24.0)
    return math.fsum(terms) / math.comb(n, 4)


def dcov_sq_bruteforce(x, y, metric_x: ResolvedMetric, metric_y: ResolvedMetric) -> float:
    """Squared distance covariance as an explicit fourth-order U-statistic.

    Distances are evaluated pair by pair with :func:`kdist`; O(n^4).
    """
    x = as_sample(x, min_rows=4, name="X")
    y = as_sample(y, min_rows=4, name="Y")
    if not 4 <= x.shape[0] <= 10:
        raise SampleSizeError("brute force is limited to 4 <= n <= 10")
    if x.shape[0] != y.shape[0]:
        raise SampleSizeError("X and Y must have the same number of rows")
    return dcov_sq_from_kernel(_dist_matrix(x, metric_x), _dist_matrix(y, metric_y))


def energy_bruteforce(x, y, metric: ResolvedMetric) -> float:
    """Two-sample kernel average over all pairs ``i<j`` in X and ``k<l`` in Y."""
    x = as_sample(x, min_rows=2, name="X")
    y = as_sample(y, min_rows=2, name="Y")
    n, m = x.shape[0], y.shape[0]
    K = lambda a, b: kdist(metric, a, b)  # noqa: E731
    kxy = [[K(x[i], y[k]) for k in range(m)] for i in range(n)]
    kyy = {(k, l): K(y[k], y[l]) for k, l in itertools.combinations(range(m), 2)}
    terms = []
    for i, j in itertools.combinations(range(n), 2):
        kij = K(x[i], x[j])
        for (k, l), kkl in kyy.items():
            h = 0.5 * (kxy[i][k] + kxy[i][l] + kxy[j][k] + kxy[j][l]) - kij - kkl
            terms.append(h)
    return math.fsum(terms) / (math.comb(n, 2) * math.comb(m, 2))


@dataclass(frozen=True)
class PluginTaus:
    """Empirical mean squared distances within X, within Y and across."""

    tau_x_sq: float
    tau_y_sq: float
    tau_sq: float

    @property
    def tau_x(self) -> float:
        return math.sqrt(self.tau_x_sq)

    @property
    def tau_y(self) -> float:
        return math.sqrt(self.tau_y_sq)

    @property
    def tau(self) -> float:
        return math.sqrt(self.tau_sq)


def _mean_offdiag_sq(d: np.ndarray) -> float:
    n = d.shape[0]
    sq = d * d
    np.fill_diagonal(sq, 0.0)
    return math.fsum(sq.ravel().tolist()) / (n * (n - 1))


def plugin_taus(x, y, metric_x: ResolvedMetric, metric_y: ResolvedMetric | None = None) -> PluginTaus:
    """Plug-in ``tau_X^2, tau_Y^2, tau^2``.

    With one metric the cross term averages ``K(X_k, Y_l)^2`` over all
    pairs. With two metrics (dependence setting, possibly different
    dimensions) the cross term is reported as ``tau_X tau_Y``.
    """
    x = as_sample(x, name="X")
    y = as_sample(y, name="Y")
    my = metric_x if metric_y is None else metric_y
    tx = _mean_offdiag_sq(cross_distances(x, x, metric_x))
    ty = _mean_offdiag_sq(cross_distances(y, y, my))
    if metric_y is None:
        kxy = cross_distances(x, y, metric_x)
        txy = math.fsum((kxy * kxy).ravel().tolist()) / kxy.size
    else:
        txy = math.sqrt(tx * ty)
    return PluginTaus(tx, ty, txy)


def leading_term_homogeneity(x, y, metric: ResolvedMetric) -> float:
    """``2 tau - tau_X - tau_Y`` from plug-in taus."""
    t = plugin_taus(x, y, metric)
    return 2.0 * t.tau - t.tau_x - t.tau_y


def groupwise_dcov_table(x, y, metric_x: ResolvedMetric, metric_y: ResolvedMetric) -> np.ndarray:
    """``p x q`` table of unbiased dCov^2 between group ``i`` of X and group ``j`` of Y."""
    x = as_sample(x, min_rows=4, name="X")
    y = as_sample(y, min_rows=4, name="Y")
    ax = [u_center(rho_matrix(x, x, metric_x, i)) for i in range(metric_x.spec.n_groups)]
    ay = [u_center(rho_matrix(y, y, metric_y, j)) for j in range(metric_y.spec.n_groups)]
    return np.array([[u_inner(a, b) for b in ay] for a in ax])


def leading_term_dependence(x, y, metric_x: ResolvedMetric, metric_y: ResolvedMetric) -> float:
    """``sum_ij dCov^2_n(X_(i), Y_(j)) / (4 tau_X tau_Y)`` with plug-in taus.

    The double sum is evaluated through bilinearity of the U-centered inner
    product, ``sum_ij (A_i . B_j) = (sum_i A_i . sum_j B_j)``, with each
    group matrix U-centered separately, so the cost is O(n^2 (p + q))
    rather than O(n^2 p q). :func:`groupwise_dcov_table` gives the
    individual terms.
    """
    x = as_sample(x, min_rows=4, name="X")
    y = as_sample(y, min_rows=4, name="Y")
    n = x.shape[0]
    sx = np.zeros((n, n))
    for i in range(metric_x.spec.n_groups):
        sx += u_center(rho_matrix(x, x, metric_x, i))
    sy = np.zeros((n, n))
    for j in range(metric_y.spec.n_groups):
        sy += u_center(rho_matrix(y, y, metric_y, j))
    t = plugin_taus(x, y, metric_x, metric_y)
    return u_inner(sx, sy) / (4.0 * t.tau_x * t.tau_y)
