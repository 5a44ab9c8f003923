import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kdstat.errors import DimensionError, SampleSizeError
from kdstat.grouped import GroupSpec
from kdstat.metrics import ResolvedMetric
from kdstat.statdist import make_rng
from kdstat.ustat import (
    cdcov_sq,
    dcov_sq_unbiased,
    double_center_cross,
    energy_stat,
    pairwise_distances,
    u_center,
    u_inner,
)


def _sym(rng, n):
    a = rng.uniform(0, 5, size=(n, n))
    a = a + a.T
    np.fill_diagonal(a, 0.0)
    return a


def _u_center_loop(a):
    n = a.shape[0]
    out = np.zeros_like(a)
    tot = sum(a[i, j] for i in range(n) for j in range(n))
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            rk = sum(a[k, j] for j in range(n))
            cl = sum(a[i, l] for i in range(n))
            out[k, l] = a[k, l] - rk / (n - 2) - cl / (n - 2) + tot / ((n - 1) * (n - 2))
    return out


def test_u_center_constant_is_zero():
    a = np.full((4, 4), 3.0)
    np.fill_diagonal(a, 0.0)
    np.testing.assert_allclose(u_center(a), 0.0, atol=1e-15)


def test_u_center_matches_scalar_formula():
    a = _sym(np.random.default_rng(1), 4)
    np.testing.assert_allclose(u_center(a), _u_center_loop(a), rtol=1e-13, atol=1e-13)


@settings(max_examples=50)
@given(st.integers(4, 12), st.integers(0, 2**32 - 1))
def test_u_center_rows_sum_to_zero(n, seed):
    a = _sym(np.random.default_rng(seed), n)
    u = u_center(a)
    assert np.abs(u.sum(axis=1)).max() <= 1e-10 * np.abs(a).max()
    assert np.all(np.diag(u) == 0.0)


def test_u_center_small_n():
    with pytest.raises(SampleSizeError):
        u_center(np.zeros((3, 3)))
    with pytest.raises(DimensionError):
        u_center(np.zeros((3, 4)))


def test_u_inner_cases():
    rng = np.random.default_rng(2)
    a, b = u_center(_sym(rng, 6)), u_center(_sym(rng, 6))
    assert u_inner(a, a) >= 0.0
    assert u_inner(np.zeros((6, 6)), b) == 0.0
    naive = sum(a[k, l] * b[k, l] for k in range(6) for l in range(6) if k != l) / (6 * 3)
    assert u_inner(a, b) == pytest.approx(naive, rel=1e-13)


def test_dcov_constant_sample_and_symmetry():
    rng = np.random.default_rng(3)
    a, b = _sym(rng, 7), _sym(rng, 7)
    assert dcov_sq_unbiased(np.zeros((7, 7)), b) == 0.0
    assert dcov_sq_unbiased(a, b) == dcov_sq_unbiased(b, a)
    assert dcov_sq_unbiased(a, a) == pytest.approx(u_inner(u_center(a), u_center(a)), rel=1e-15)
    assert dcov_sq_unbiased(a, a) >= 0.0


@settings(max_examples=40)
@given(st.integers(4, 10), st.integers(0, 2**32 - 1))
def test_joint_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    a, b = _sym(rng, n), _sym(rng, n)
    kxy = rng.uniform(size=(n, n + 1))
    pa = rng.permutation(n)
    pb = rng.permutation(n + 1)
    d0 = dcov_sq_unbiased(a, b)
    d1 = dcov_sq_unbiased(a[np.ix_(pa, pa)], b[np.ix_(pa, pa)])
    assert d1 == pytest.approx(d0, rel=1e-12, abs=1e-12 * np.abs(a).max() * np.abs(b).max())
    kyy = _sym(rng, n + 1)
    e0 = energy_stat(kxy, a, kyy)
    e1 = energy_stat(kxy[np.ix_(pa, pb)], a[np.ix_(pa, pa)], kyy[np.ix_(pb, pb)])
    assert e1 == pytest.approx(e0, rel=1e-12, abs=1e-14)
    assert cdcov_sq(kxy[np.ix_(pa, pb)]) == pytest.approx(cdcov_sq(kxy), rel=1e-12)


def test_energy_examples():
    m = ResolvedMetric(GroupSpec.unit(1))
    z = np.array([[0.0], [1.0], [0.0], [1.0]])
    k = pairwise_distances(z, m)
    assert energy_stat(k[:2, 2:], k[:2, :2], k[2:, 2:]) == pytest.approx(-1.0, abs=1e-15)
    c = np.zeros((5, 5))
    assert energy_stat(c[:2, 2:], c[:2, :2], c[2:, 2:]) == 0.0


def test_double_center_examples():
    np.testing.assert_allclose(double_center_cross(np.full((3, 4), 2.5)), 0.0, atol=1e-15)
    rng = np.random.default_rng(4)
    u, v = rng.normal(size=3), rng.normal(size=5)
    np.testing.assert_allclose(double_center_cross(u[:, None] + v[None, :]), 0.0, atol=1e-14)
    k = rng.normal(size=(3, 4))
    kh = double_center_cross(k)
    scale = np.abs(k).max()
    assert np.abs(kh.mean(axis=0)).max() <= 1e-12 * scale
    assert np.abs(kh.mean(axis=1)).max() <= 1e-12 * scale


def test_cdcov_examples():
    np.testing.assert_allclose(
        double_center_cross([[0.0, 1.0], [1.0, 0.0]]), [[-0.5, 0.5], [0.5, -0.5]]
    )
    assert cdcov_sq([[0.0, 1.0], [1.0, 0.0]]) == pytest.approx(1.0, abs=1e-15)
    assert cdcov_sq(np.ones((4, 3))) == 0.0
    k = np.random.default_rng(6).normal(size=(4, 5))
    n, m = k.shape
    naive = 0.0
    for a in range(n):
        for b in range(m):
            h = k[a, b] - k[a].mean() - k[:, b].mean() + k.mean()
            naive += h * h
    assert cdcov_sq(k) == pytest.approx(naive / ((n - 1) * (m - 1)), rel=1e-13)


def test_dcov_unbiased_under_independence():
    m = ResolvedMetric(GroupSpec.unit(3))
    vals = []
    for rep in range(2000):
        rng = make_rng(99, rep)
        x, y = rng.standard_normal((20, 3)), rng.standard_normal((20, 3))
        vals.append(dcov_sq_unbiased(pairwise_distances(x, m), pairwise_distances(y, m)))
    vals = np.array(vals)
    se = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean()) < 4 * se
