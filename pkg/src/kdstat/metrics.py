"""
Group-wise semimetrics and the aggregate distance

.. math::

    K(x, x') = \\Big(\\sum_{i=1}^p \\rho_i(x_{(i)}, x'_{(i)})\\Big)^r .

With ``r = 1/2`` and Euclidean ``rho_i`` on unit groups this is the square
root of the l1 distance; with squared-Euclidean ``rho_i`` it is the usual
Euclidean distance regardless of the grouping.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import BandwidthError, ConfigurationError, DimensionError
from .grouped import GroupSpec, SemimetricKind, as_sample

# Cap on the number of float64 temporaries materialized per block (32 MB).
_BLOCK_ELEMS = 1 << 22


def _from_sq(kind: SemimetricKind, sq, bandwidth=None):
    """Map squared Euclidean group distances to the group semimetric."""
    if kind is SemimetricKind.SQUARED_EUCLIDEAN:
        return sq
    if kind is SemimetricKind.EUCLIDEAN:
        return np.sqrt(sq)
    if bandwidth is None:
        raise ConfigurationError(f"{kind.value} semimetric needs a resolved bandwidth")
    if kind is SemimetricKind.LAPLACE:
        return -2.0 * np.expm1(-np.sqrt(sq) / bandwidth)
    return -2.0 * np.expm1(-sq / (bandwidth * bandwidth))


def rho_eval(kind, a, b, bandwidth: Optional[float] = None) -> float:
    """Evaluate one group semimetric between two sub-vectors.

    ``laplace`` is ``2(1 - exp(-|a-b|/h))`` and ``gaussian`` is
    ``2(1 - exp(-|a-b|^2/h^2))``: the distances induced by the respective
    kernels.
    """
    kind = SemimetricKind.parse(kind)
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.shape} vs {b.shape}")
    if kind.induced and (bandwidth is None or not bandwidth > 0):
        raise ConfigurationError(f"{kind.value} semimetric needs a positive bandwidth")
    diff = a - b
    return float(_from_sq(kind, float(np.dot(diff, diff)), bandwidth))


@dataclass(frozen=True)
class ResolvedMetric:
    """A :class:`GroupSpec` whose bandwidths are all concrete.

    ``bandwidths`` holds one value per group for induced kinds and is
    ``None`` otherwise.
    """

    spec: GroupSpec
    bandwidths: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.spec.kind.induced:
            if self.bandwidths is None or len(self.bandwidths) != self.spec.n_groups:
                raise ConfigurationError("induced semimetric needs one bandwidth per group")
            if not all(b > 0 for b in self.bandwidths):
                raise BandwidthError("bandwidths must be positive")

    @property
    def kind(self) -> SemimetricKind:
        return self.spec.kind

    @property
    def exponent(self) -> float:
        return self.spec.exponent

    @property
    def dim(self) -> int:
        return self.spec.dim

    def bandwidth(self, i: int) -> Optional[float]:
        return None if self.bandwidths is None else self.bandwidths[i]

    @classmethod
    def from_spec(cls, spec: GroupSpec) -> ResolvedMetric:
        """Resolve a spec whose bandwidths are already concrete."""
        if not spec.kind.induced:
            return cls(spec)
        bw = spec.bandwidth
        if bw is None:
            raise ConfigurationError("bandwidth is 'auto'; resolve it against data first")
        if isinstance(bw, float):
            bw = (bw,) * spec.n_groups
        return cls(spec, tuple(bw))


def _lower_median(values: np.ndarray, axis: int = 0) -> np.ndarray:
    k = (values.shape[axis] - 1) // 2
    return np.take(np.partition(values, k, axis=axis), k, axis=axis)


def group_medians(pooled: np.ndarray, spec: GroupSpec) -> np.ndarray:
    """Lower median of all pairwise Euclidean distances, per group."""
    z = as_sample(pooled, name="pooled sample")
    spec.with_dim(z.shape[1])
    n = z.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    out = np.empty(spec.n_groups)
    if spec.unit_groups:
        step = max(1, _BLOCK_ELEMS // max(1, iu.size))
        for c0 in range(0, spec.dim, step):
            block = z[:, c0:c0 + step]
            out[c0:c0 + step] = _lower_median(np.abs(block[iu] - block[ju]), axis=0)
    else:
        o = spec.offsets
        for i in range(spec.n_groups):
            out[i] = _lower_median(pdist(z[:, o[i]:o[i + 1]]))
    return out


def resolve_bandwidths(g: GroupSpec, pooled) -> ResolvedMetric:
    """Fill in median-heuristic bandwidths from ``pooled``.

    Concrete bandwidths pass through untouched. A group whose median
    pairwise distance is zero raises :class:`BandwidthError`.
    """
    if not g.kind.induced:
        return ResolvedMetric(g)
    if g.bandwidth is not None:
        return ResolvedMetric.from_spec(g)
    pooled = as_sample(pooled, name="pooled sample")
    med = group_medians(pooled, g)
    bad = np.flatnonzero(med <= 0)
    if bad.size:
        raise BandwidthError(
            f"median pairwise distance is zero in group(s) {bad[:5].tolist()}; "
            "the median heuristic is degenerate"
        )
    return ResolvedMetric(g, tuple(float(v) for v in med))


def _group_blocks(spec: GroupSpec, rows: int) -> Iterator[tuple[int, int, int, int]]:
    """Yield (first_group, last_group, first_col, last_col) blocks of whole groups."""
    budget = max(1, _BLOCK_ELEMS // max(1, rows))
    o = spec.offsets
    i = 0
    while i < spec.n_groups:
        j = i + 1
        while j < spec.n_groups and o[j + 1] - o[i] <= budget:
            j += 1
        yield i, j, o[i], o[j]
        i = j


def rho_matrix(a, b, metric: ResolvedMetric, i: int) -> np.ndarray:
    """Matrix of ``rho_i`` between the group-``i`` blocks of two samples."""
    o = metric.spec.offsets
    sq = cdist(a[:, o[i]:o[i + 1]], b[:, o[i]:o[i + 1]], "sqeuclidean")
    return _from_sq(metric.kind, sq, metric.bandwidth(i))


def _rho_sum(a: np.ndarray, b: np.ndarray, metric: ResolvedMetric) -> np.ndarray:
    spec = metric.spec
    kind = metric.kind
    if kind is SemimetricKind.SQUARED_EUCLIDEAN:
        return cdist(a, b, "sqeuclidean")
    if kind is SemimetricKind.EUCLIDEAN and spec.unit_groups:
        return cdist(a, b, "cityblock")
    n, m = a.shape[0], b.shape[0]
    total = np.zeros((n, m))
    if spec.unit_groups:
        bw = None if metric.bandwidths is None else np.asarray(metric.bandwidths)
        for _, _, c0, c1 in _group_blocks(spec, n * m):
            diff = a[:, None, c0:c1] - b[None, :, c0:c1]
            sq = diff * diff
            total += _from_sq(kind, sq, None if bw is None else bw[c0:c1]).sum(axis=2)
        return total
    for i in range(spec.n_groups):
        total += rho_matrix(a, b, metric, i)
    return total


def cross_distances(a, b, metric: ResolvedMetric) -> np.ndarray:
    """``K(a_k, b_l)`` for all row pairs; O(n m p~)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError("samples must be 2-d")
    metric.spec.with_dim(a.shape[1])
    metric.spec.with_dim(b.shape[1])
    s = _rho_sum(a, b, metric)
    r = metric.exponent
    if r == 1.0:
        return s
    if r == 0.5:
        return np.sqrt(s)
    return np.power(s, r)


def kdist(g: ResolvedMetric, x, y) -> float:
    """Aggregate distance between two single observations."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != g.dim or y.size != g.dim:
        raise DimensionError(f"rows have lengths {x.size}, {y.size}; groups need {g.dim}")
    o = g.spec.offsets
    total = 0.0
    for i in range(g.spec.n_groups):
        total += rho_eval(g.kind, x[o[i]:o[i + 1]], y[o[i]:o[i + 1]], g.bandwidth(i))
    return float(total ** g.exponent)
