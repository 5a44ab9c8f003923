"""
Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
an "acceptance criteria" section of the terminal summary.
"""
import math
import time
from functools import lru_cache

import numpy as np

from kdstat.grouped import GroupSpec, SemimetricKind
from kdstat.homogeneity import PowerParams, approx_power, exact_power_mc, homogeneity_df
from kdstat.metrics import ResolvedMetric, cross_distances, resolve_bandwidths
from kdstat.oracle import (
    dcov_sq_bruteforce,
    energy_bruteforce,
    leading_term_dependence,
    leading_term_homogeneity,
)
from kdstat.simgen import ScenarioId, empirical_rejection, generate, rates_to_csv, spec_for_test
from kdstat.statdist import make_rng, noncentral_t_cdf, t_cdf, t_upper_quantile
from kdstat.ustat import (
    dcov_sq_unbiased,
    double_center_cross,
    energy_stat,
    pairwise_distances,
    u_center,
)

K = SemimetricKind
SIM_SEED = 2024


def _random_metric(kind, dim, rng):
    cuts = sorted(rng.choice(np.arange(1, dim), size=int(rng.integers(0, dim)), replace=False)) if dim > 1 else []
    sizes = tuple(np.diff([0, *cuts, dim]).tolist())
    bw = tuple(rng.uniform(0.3, 3.0, len(sizes))) if kind.induced else None
    r = float(rng.choice([0.5, 1.0, rng.uniform(0.2, 1.0)]))
    return ResolvedMetric(GroupSpec(sizes, kind, exponent=r), bw)


def _close(fast, slow, scale, rel=1e-10):
    # relative to the value, or to the magnitude of the terms when the value cancels
    return abs(fast - slow) <= rel * max(abs(slow), scale)


def test_criterion_1_oracle_equivalence(acceptance_record):
    t0 = time.perf_counter()
    worst, count, fails = 0.0, 0, 0
    for k_idx, kind in enumerate(K):
        for n in range(4, 9):
            for inst in range(50):
                rng = make_rng(101, (k_idx * 10 + n) * 1000 + inst)
                p = int(rng.integers(1, 7))
                x = rng.standard_normal((n, p))
                y = x ** 2 + rng.standard_normal((n, p)) if inst % 2 else rng.standard_normal((n, p))
                mx, my = _random_metric(kind, p, rng), _random_metric(kind, p, rng)
                a, b = pairwise_distances(x, mx), pairwise_distances(y, my)
                fast = dcov_sq_unbiased(a, b)
                slow = dcov_sq_bruteforce(x, y, mx, my)
                scale = np.abs(a).mean() * np.abs(b).mean()
                ok1 = _close(fast, slow, scale)

                m = int(rng.integers(4, 9))
                y2 = rng.exponential(size=(m, p))
                g = mx
                e_fast = energy_stat(cross_distances(x, y2, g), a, pairwise_distances(y2, g))
                e_slow = energy_bruteforce(x, y2, g)
                e_scale = np.abs(cross_distances(x, y2, g)).mean()
                ok2 = _close(e_fast, e_slow, e_scale)
                worst = max(worst, abs(fast - slow) / max(abs(slow), scale),
                            abs(e_fast - e_slow) / max(abs(e_slow), e_scale))
                count += 2
                fails += (not ok1) + (not ok2)
    dt = time.perf_counter() - t0
    ok = fails == 0 and dt < 10
    acceptance_record(1, ok, f"{count} oracle pairs, {fails} mismatches, worst scaled error {worst:.1e}, {dt:.1f}s")
    assert ok


def test_criterion_2_centering_identities(acceptance_record):
    t0 = time.perf_counter()
    worst_u, worst_d = 0.0, 0.0
    for i in range(100):
        rng = make_rng(202, i)
        n = int(rng.integers(4, 60))
        a = rng.exponential(size=(n, n)) * 10 ** rng.uniform(-3, 3)
        a = a + a.T
        np.fill_diagonal(a, 0.0)
        worst_u = max(worst_u, np.abs(u_center(a).sum(axis=1)).max() / np.abs(a).max())
        kxy = rng.normal(size=(n, int(rng.integers(2, 60)))) * 10 ** rng.uniform(-3, 3)
        kh = double_center_cross(kxy)
        scale = np.abs(kxy).max()
        worst_d = max(worst_d, np.abs(kh.mean(axis=0)).max() / scale, np.abs(kh.mean(axis=1)).max() / scale)
    dt = time.perf_counter() - t0
    ok = worst_u <= 1e-10 and worst_d <= 1e-12 and dt < 1
    acceptance_record(2, ok, f"u_center rows {worst_u:.1e}, cross means {worst_d:.1e}, {dt:.2f}s")
    assert ok


@lru_cache(maxsize=None)
def _rates(scenario, tests, workers=1):
    sid = ScenarioId.parse(scenario, n=50, m=50, p=50)
    t0 = time.perf_counter()
    rows = empirical_rejection(sid, tests, 1000, (0.05, 0.10), seed=SIM_SEED, workers=workers)
    return {(r.test, r.alpha): r.rate for r in rows}, rates_to_csv(rows), time.perf_counter() - t0


def test_criterion_3_size(acceptance_record):
    rates, _, dt = _rates("H1.1", "I,IV")
    ok = all(abs(rates[(t, a)] - a) <= 0.03 for t in ("I", "IV") for a in (0.05, 0.10))
    desc = ", ".join(f"{t}@{a}={rates[(t, a)]:.3f}" for t in ("I", "IV") for a in (0.05, 0.10))
    acceptance_record(3, ok and dt < 300, f"H1.1 {desc} (target nominal +-0.03), {dt:.0f}s")
    assert ok and dt < 300


def test_criterion_4_power_separation(acceptance_record):
    rates, _, dt = _rates("H2.1", "I,II,III,IV")
    kd = [rates[(t, 0.10)] for t in ("I", "II", "III")]
    iv = rates[("IV", 0.10)]
    ok = min(kd) >= 0.99 and abs(iv - 0.102) <= 0.04
    acceptance_record(4, ok and dt < 300, f"H2.1 I-III {kd}, IV {iv:.3f} (target 0.102+-0.04), {dt:.0f}s")
    assert ok and dt < 300


def test_criterion_5_independence(acceptance_record):
    null, _, dt1 = _rates("D1.1", "I")
    alt, _, dt2 = _rates("D2.1", "I,II,III,IV")
    size = null[("I", 0.10)]
    kd = [alt[(t, 0.10)] for t in ("I", "II", "III")]
    iv = alt[("IV", 0.10)]
    ok = abs(size - 0.115) <= 0.03 and min(kd) >= 0.99 and abs(iv - 0.267) <= 0.05
    dt = dt1 + dt2
    acceptance_record(
        5, ok and dt < 300,
        f"D1.1 I {size:.3f} (0.115+-0.03); D2.1 I-III {kd}, IV {iv:.3f} (0.267+-0.05), {dt:.0f}s",
    )
    assert ok and dt < 300


def _population_ratios():
    out = {}
    for p in (20, 100):
        rng = make_rng(606, p)
        n = 1000
        x = rng.standard_normal((n, p))
        y = rng.standard_normal((n, p)) + rng.standard_normal((n, p))
        g = ResolvedMetric(GroupSpec.unit(p, K.SQUARED_EUCLIDEAN))
        kxx, kyy = pairwise_distances(x, g), pairwise_distances(y, g)
        e = energy_stat(cross_distances(x, y, g), kxx, kyy)
        out[("energy", p)] = e / leading_term_homogeneity(x, y, g)
        yp = x + rng.standard_normal((n, p))
        d = dcov_sq_unbiased(kxx, pairwise_distances(yp, g))
        out[("dcov", p)] = d / leading_term_dependence(x, yp, g, g)
    return out


def test_criterion_6_population_ratio(acceptance_record):
    t0 = time.perf_counter()
    ratios = _population_ratios()
    dt = time.perf_counter() - t0
    ok = all(0.95 <= v <= 1.05 for v in ratios.values()) and dt < 120
    desc = ", ".join(f"{k}(p={p})={v:.4f}" for (k, p), v in ratios.items())
    acceptance_record(6, ok, f"{desc}, {dt:.0f}s")
    assert ok


def _leading_term_gaps():
    gaps = {}
    for name in ("D1.1", "D1.2", "D2.1", "D2.2"):
        sid = ScenarioId.parse(name, n=50, p=50)
        worst = 0.0
        for rep in range(20):
            x, y = generate(sid, make_rng(707, rep))
            mx = resolve_bandwidths(spec_for_test("I", 50), x)
            my = resolve_bandwidths(spec_for_test("I", 50), y)
            d = dcov_sq_unbiased(pairwise_distances(x, mx), pairwise_distances(y, my))
            worst = max(worst, abs(d - leading_term_dependence(x, y, mx, my)))
        gaps[name] = worst
    return gaps


def test_criterion_7_leading_term_bound(acceptance_record):
    t0 = time.perf_counter()
    gaps = _leading_term_gaps()
    dt = time.perf_counter() - t0
    ok = max(gaps.values()) < 0.01 and dt < 120
    desc = ", ".join(f"{k} max {v:.1e}" for k, v in gaps.items())
    acceptance_record(7, ok, f"test I metric, {desc}, {dt:.1f}s")
    assert ok


def _power_curves(workers=1):
    n = m = 10
    t = float(t_upper_quantile(0.05, homogeneity_df(n, m)))
    rows = []
    for s in range(11):
        pp = PowerParams(delta=s / math.sqrt(n * m), delta0=float(s), alpha0=1.0)
        exact = exact_power_mc(pp, n, m, t, reps=50_000, seed=808, workers=workers)
        rows.append((s, exact, approx_power(pp, t)))
    return rows


def test_criterion_8_power_curve(acceptance_record):
    t0 = time.perf_counter()
    rows = _power_curves()
    dt = time.perf_counter() - t0
    gap = max(abs(e - a) for _, e, a in rows)
    ok = gap <= 0.05 and dt < 60
    acceptance_record(8, ok, f"n=m=10, s=0..10, max |exact-approx| = {gap:.4f}, {dt:.1f}s")
    assert ok


def test_criterion_9_special_functions(acceptance_record):
    t0 = time.perf_counter()
    cauchy = abs(float(t_cdf(1.0, 1)) - 0.75)
    rng = make_rng(909)
    worst_z = 0.0
    reps = 1_000_000
    for i in range(10):
        t, df, delta = rng.uniform(-3, 3), rng.uniform(1, 60), rng.uniform(-2, 2)
        mc = make_rng(910, i)
        z = mc.standard_normal(reps)
        v = mc.chisquare(df, reps)
        frac = float(np.mean((z + delta) / np.sqrt(v / df) <= t))
        se = math.sqrt(max(frac * (1 - frac), 1.0 / reps) / reps)
        worst_z = max(worst_z, abs(noncentral_t_cdf(t, df, delta) - frac) / se)
    dt = time.perf_counter() - t0
    ok = cauchy <= 1e-10 and worst_z < 4 and dt < 60
    acceptance_record(9, ok, f"|t_cdf(1,1)-0.75| = {cauchy:.1e}; nct worst {worst_z:.2f} SE over 10 triples, {dt:.1f}s")
    assert ok


def test_criterion_10_determinism(acceptance_record):
    t0 = time.perf_counter()
    same = []
    for scenario, tests in [("H1.1", "I,IV"), ("H2.1", "I,II,III,IV"), ("D1.1", "I"), ("D2.1", "I,II,III,IV")]:
        same.append(_rates(scenario, tests, 1)[1] == _rates(scenario, tests, 2)[1])
    same.append(repr(_population_ratios()) == repr(_population_ratios()))
    same.append(repr(_leading_term_gaps()) == repr(_leading_term_gaps()))
    same.append(repr(_power_curves(1)) == repr(_power_curves(4)))
    ok = all(same)
    dt = time.perf_counter() - t0
    acceptance_record(10, ok, f"{sum(same)}/{len(same)} outputs byte-identical across reruns and worker counts, {dt:.0f}s")
    assert ok
