"""
Synthetic scenarios and the seeded rejection-rate harness.

Scenario ids are ``<family>.<variant>``:

* ``H1.1-3``  two-sample null models (iid normal, banded, Toeplitz 0.7)
* ``H2.1-5``  equal first two moments, different laws (Poisson, exponential,
  Rademacher mix, uniform mix, ``R^{1/2}`` times centered exponentials)
* ``H3.1-2``  bivariate groups that differ only jointly
* ``D1.1-3``  independent pairs (normal, AR(1) with opposite signs, Toeplitz)
* ``D2.1-3``  ``Y = X^2`` and ``Y = log|X|`` style component-wise dependence
* ``D3.1-3``  uniform / trigonometric component-wise dependence
* ``P.1``     ``X ~ N(0, I)`` against an independent sample of ``X + N``
* ``P.2``     paired ``(X, X + N)``

Replication ``i`` of a run with seed ``s`` draws from stream ``(s, i)`` of a
counter-based generator, so rate tables do not depend on worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.linalg import toeplitz

from .errors import ConfigurationError, NotPSDError
from .grouped import GroupSpec, SemimetricKind
from .homogeneity import homogeneity_from_distances
from .independence import dependence_from_distances
from .metrics import resolve_bandwidths
from .statdist import make_rng
from .ustat import pairwise_distances

THREADS_ENV = "KDSTAT_THREADS"

_VARIANTS = {"H1": 3, "H2": 5, "H3": 2, "D1": 3, "D2": 3, "D3": 3, "P": 2}


@dataclass(frozen=True)
class ScenarioId:
    """A simulation model plus its sizes.

    ``p`` counts groups; for ``H3`` each group has two coordinates, so the
    data have ``2p`` columns. ``m`` is ignored by the paired families.
    """

    family: str
    variant: int
    n: int = 50
    m: int = 50
    p: int = 50
    beta: float = 0.5
    phi: float = 0.5

    def __post_init__(self):
        fam = self.family.upper()
        object.__setattr__(self, "family", fam)
        if fam not in _VARIANTS:
            raise ConfigurationError(f"unknown scenario family {self.family!r}")
        if not 1 <= self.variant <= _VARIANTS[fam]:
            raise ConfigurationError(f"{fam} has variants 1..{_VARIANTS[fam]}, got {self.variant}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigurationError("beta must lie in (0, 1)")
        if self.n < 1 or self.m < 1 or self.p < 1:
            raise ConfigurationError("n, m and p must be positive")

    @classmethod
    def parse(cls, name: str, **sizes) -> ScenarioId:
        try:
            fam, var = name.strip().split(".")
            return cls(fam, int(var), **sizes)
        except ValueError:
            raise ConfigurationError(f"scenario must look like 'H2.1', got {name!r}") from None

    @property
    def name(self) -> str:
        return f"{self.family}.{self.variant}"

    @property
    def paired(self) -> bool:
        return self.family.startswith("D") or (self.family == "P" and self.variant == 2)

    @property
    def kind(self) -> str:
        """``'dep'`` for independence scenarios, ``'test2'`` otherwise."""
        return "dep" if self.paired else "test2"

    @property
    def group_size(self) -> int:
        return 2 if self.family == "H3" else 1

    @property
    def dim(self) -> int:
        return self.p * self.group_size


def sym_sqrt(r) -> np.ndarray:
    """Symmetric square root of a symmetric PSD matrix."""
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ConfigurationError("sym_sqrt needs a square matrix")
    if not np.allclose(r, r.T, rtol=0, atol=1e-12 * max(1.0, np.abs(r).max())):
        raise ConfigurationError("sym_sqrt needs a symmetric matrix")
    w, v = np.linalg.eigh(0.5 * (r + r.T))
    if w.min() < -1e-10:
        raise NotPSDError(f"matrix has eigenvalue {w.min():.3g} < 0")
    s = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return 0.5 * (s + s.T)


def banded_cov(p: int, rho: float = 0.25, width: int = 2) -> np.ndarray:
    """Unit diagonal, ``rho`` on the first ``width`` off-diagonals."""
    col = np.zeros(p)
    col[0] = 1.0
    col[1:width + 1] = rho
    return toeplitz(col)


def toeplitz_cov(p: int, rho: float = 0.7) -> np.ndarray:
    return toeplitz(rho ** np.arange(p))


@lru_cache(maxsize=32)
def _root(kind: str, p: int) -> np.ndarray:
    cov = banded_cov(p) if kind == "banded" else toeplitz_cov(p)
    return sym_sqrt(cov)


def _mvn(rng, size: int, p: int, root: str | None = None) -> np.ndarray:
    z = rng.standard_normal((size, p))
    return z if root is None else z @ _root(root, p)


def _ar1(rng, size: int, p: int, phi: float) -> np.ndarray:
    eps = rng.standard_normal((size, p))
    out = np.empty_like(eps)
    out[:, 0] = eps[:, 0]
    scale = math.sqrt(1.0 - phi * phi)
    for j in range(1, p):
        out[:, j] = phi * out[:, j - 1] + scale * eps[:, j]
    return out


def _bivariate_groups(rng, size: int, p: int, corr: float, mean: float = 1.0) -> np.ndarray:
    cov = np.array([[1.0, corr], [corr, 1.0]])
    root = sym_sqrt(cov)
    z = rng.standard_normal((size, p, 2)) @ root
    return (z + mean).reshape(size, 2 * p)


def _homogeneity_pair(sid: ScenarioId, rng) -> tuple[np.ndarray, np.ndarray]:
    n, m, p = sid.n, sid.m, sid.p
    fam, v = sid.family, sid.variant
    if fam == "H1":
        root = {1: None, 2: "banded", 3: "toeplitz"}[v]
        return _mvn(rng, n, p, root), _mvn(rng, m, p, root)
    if fam == "H2":
        k = int(math.floor(sid.beta * p))
        if v == 1:
            return rng.standard_normal((n, p)) + 1.0, rng.poisson(1.0, (m, p)).astype(float)
        if v == 2:
            return rng.standard_normal((n, p)) + 1.0, rng.exponential(1.0, (m, p))
        if v in (3, 4):
            x = rng.standard_normal((n, p))
            if v == 3:
                head = 2.0 * rng.integers(0, 2, (m, k)) - 1.0
            else:
                head = rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), (m, k))
            y = np.hstack([head, rng.standard_normal((m, p - k))])
            return x, y
        root = _root("banded", p)
        x = rng.standard_normal((n, p)) @ root
        y = (rng.exponential(1.0, (m, p)) - 1.0) @ root
        return x, y
    if fam == "H3":
        if v == 1:
            return _bivariate_groups(rng, n, p, 0.9), _bivariate_groups(rng, m, p, 0.1)
        return _bivariate_groups(rng, n, p, 0.7), rng.exponential(1.0, (m, 2 * p))
    # P.1: independent samples of X and X + N
    x = rng.standard_normal((n, p))
    y = rng.standard_normal((m, p)) + rng.standard_normal((m, p))
    return x, y


def _dependence_pair(sid: ScenarioId, rng) -> tuple[np.ndarray, np.ndarray]:
    n, p = sid.n, sid.p
    fam, v = sid.family, sid.variant
    if fam == "D1":
        if v == 1:
            return rng.standard_normal((n, p)), rng.standard_normal((n, p))
        if v == 2:
            return _ar1(rng, n, p, sid.phi), _ar1(rng, n, p, -sid.phi)
        return _mvn(rng, n, p, "toeplitz"), _mvn(rng, n, p, "toeplitz")
    if fam == "D2":
        x = _mvn(rng, n, p, "toeplitz" if v == 3 else None)
        return x, (np.log(np.abs(x)) if v == 2 else x * x)
    if fam == "D3":
        if v == 1:
            x = rng.uniform(-1.0, 1.0, (n, p))
            return x, x * x
        if v == 2:
            x = rng.uniform(0.0, 1.0, (n, p))
            return x, 4.0 * x * x - 4.0 * x + 2.0
        z = rng.uniform(0.0, 2.0 * math.pi, (n, p))
        return np.sin(z), np.cos(z)
    x = rng.standard_normal((n, p))
    return x, x + rng.standard_normal((n, p))


def generate(sid: ScenarioId, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw one ``(X, Y)`` data set from scenario ``sid``."""
    if sid.paired:
        return _dependence_pair(sid, rng)
    return _homogeneity_pair(sid, rng)


TEST_IDS = ("I", "II", "III", "IV", "V", "VI")

_TESTS = {
    # id: (kind, aggregate over groups?, exponent)
    "I": (SemimetricKind.EUCLIDEAN, True, 0.5),
    "II": (SemimetricKind.LAPLACE, True, 0.5),
    "III": (SemimetricKind.GAUSSIAN, True, 0.5),
    "IV": (SemimetricKind.SQUARED_EUCLIDEAN, False, 0.5),
    "V": (SemimetricKind.LAPLACE, False, 1.0),
    "VI": (SemimetricKind.GAUSSIAN, False, 1.0),
}


def spec_for_test(test: str, dim: int, group_size: int = 1) -> GroupSpec:
    """Group spec behind test ``I``..``VI``.

    I-III aggregate per-group Euclidean / Laplace-induced /
    Gaussian-induced semimetrics under a square root. IV is the Euclidean
    distance. V and VI use a single group with ``r = 1``, i.e. the
    distance induced by a Laplace or Gaussian kernel on the whole vector,
    which turns the energy statistic into MMD and the distance covariance
    into HSIC.
    """
    try:
        kind, grouped, r = _TESTS[test.upper()]
    except KeyError:
        raise ConfigurationError(f"unknown test {test!r}; expected one of {TEST_IDS}") from None
    if not grouped:
        return GroupSpec.single(dim, kind, exponent=r)
    if dim % group_size:
        raise ConfigurationError(f"{dim} columns cannot be split into groups of {group_size}")
    return GroupSpec((group_size,) * (dim // group_size), kind, exponent=r)


def parse_tests(text: str | Sequence[str]) -> tuple[str, ...]:
    items = text.split(",") if isinstance(text, str) else list(text)
    out = tuple(t.strip().upper() for t in items if t.strip())
    for t in out:
        if t not in _TESTS:
            raise ConfigurationError(f"unknown test {t!r}; expected one of {TEST_IDS}")
    if not out:
        raise ConfigurationError("no tests given")
    return out


def p_values(sid: ScenarioId, tests: Sequence[str], x: np.ndarray, y: np.ndarray,
             group_size: int | None = None) -> list[float]:
    """p-value of each named test on one data set."""
    gs = sid.group_size if group_size is None else group_size
    out = []
    if sid.paired:
        for t in tests:
            mx = resolve_bandwidths(spec_for_test(t, x.shape[1], gs), x)
            my = resolve_bandwidths(spec_for_test(t, y.shape[1], gs), y)
            res = dependence_from_distances(pairwise_distances(x, mx), pairwise_distances(y, my))
            out.append(res.p_value)
        return out
    pooled = np.vstack([x, y])
    n = x.shape[0]
    for t in tests:
        metric = resolve_bandwidths(spec_for_test(t, x.shape[1], gs), pooled)
        k = pairwise_distances(pooled, metric)
        res = homogeneity_from_distances(k[:n, :n], k[n:, n:], k[:n, n:])
        out.append(res.p_value)
    return out


def _run_chunk(sid: ScenarioId, tests: tuple[str, ...], seed: int, start: int, stop: int,
               group_size: int | None) -> np.ndarray:
    rows = []
    for rep in range(start, stop):
        x, y = generate(sid, make_rng(seed, rep))
        rows.append(p_values(sid, tests, x, y, group_size))
    return np.array(rows, dtype=np.float64).reshape(stop - start, len(tests))


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def simulate_p_values(sid: ScenarioId, tests: Sequence[str], reps: int, seed: int,
                      workers: int | None = None, group_size: int | None = None) -> np.ndarray:
    """``reps x len(tests)`` array of p-values, one row per replication."""
    tests = parse_tests(tests)
    if reps < 1:
        raise ConfigurationError("reps must be >= 1")
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or reps < 2:
        return _run_chunk(sid, tests, seed, 0, reps, group_size)
    step = max(1, math.ceil(reps / (4 * workers)))
    bounds = [(s, min(reps, s + step)) for s in range(0, reps, step)]
    with ProcessPoolExecutor(workers) as ex:
        futures = [ex.submit(_run_chunk, sid, tests, seed, a, b, group_size) for a, b in bounds]
        parts = [f.result() for f in futures]
    return np.vstack(parts)


@dataclass(frozen=True)
class RateRow:
    scenario: str
    test: str
    alpha: float
    rate: float
    reps: int
    seed: int


def empirical_rejection(sid: ScenarioId, tests: Sequence[str], reps: int,
                        alphas: Sequence[float] = (0.05, 0.10), seed: int = 0,
                        workers: int | None = None,
                        group_size: int | None = None) -> list[RateRow]:
    """Fraction of replications rejecting at each level, per test."""
    tests = parse_tests(tests)
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {a}")
    pv = simulate_p_values(sid, tests, reps, seed, workers, group_size)
    rows = []
    for j, t in enumerate(tests):
        for a in alphas:
            rows.append(RateRow(sid.name, t, float(a), float(np.mean(pv[:, j] < a)), reps, seed))
    return rows


RATE_HEADER = ("scenario", "test", "alpha", "rate", "reps", "seed")


def rates_to_csv(rows: Sequence[RateRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RATE_HEADER)
    for r in rows:
        w.writerow([r.scenario, r.test, f"{r.alpha:.12g}", f"{r.rate:.12g}", r.reps, r.seed])
    return buf.getvalue()


def rates_to_json(rows: Sequence[RateRow]) -> str:
    doc = [
        {"scenario": r.scenario, "test": r.test, "alpha": float(f"{r.alpha:.12g}"),
         "rate": float(f"{r.rate:.12g}"), "reps": r.reps, "seed": r.seed}
        for r in rows
    ]
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
