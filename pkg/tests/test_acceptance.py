"""Acceptance gate: one test per criterion, at the stated tolerances.

Randomised criteria return a digest of their raw outputs; criterion 12
reruns each of them and demands identical bytes.
"""

import hashlib
import math
from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from indsets.annealing import count_ik
from indsets.exact import (
    exact_free_volume, exact_occupancy, exact_tv_distance, independence_polynomial,
    size_distribution,
)
from indsets.glauber import GlauberSampler, seed_words
from indsets.graph import clique, complete_bipartite, is_independent, path, petersen
from indsets.ising import ising_coefficients, ising_partition_exact, sample_fixed_magnetization
from indsets.reduction import (
    VARIANCE_CONSTANT, build_instance, find_gadget, gadget_variance_floor, verify_reduction,
)
from indsets.sample_k import SamplerConfig, sample_k
from indsets.thresholds import alpha_c, lambda_c, lambda_star

_DIGESTS = {}


def _digest(*parts) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p if isinstance(p, bytes) else repr(p).encode())
    return h.hexdigest()


def _suite_lambdas(G):
    """Fugacities {1/4, 1, lambda_c(D)} with D = max(3, max degree), exact."""
    return (Fraction(1, 4), Fraction(1), lambda_c(max(3, G.max_degree), exact=True))


# -- randomised criteria, as pure functions of their seeds ---------------------

def glauber_stationarity():
    tvs, parts = [], []
    sampler = GlauberSampler()
    cases = [(clique(2), 1.0), (clique(2), 4.0), (clique(4), 1.0), (clique(4), 4.0)]
    for i, (G, lam) in enumerate(cases):
        draw = sampler.draw(G, lam, 100_000, 0.01, seed_words(600 + i)[0])
        target = size_distribution(G, lam).probabilities
        emp = np.bincount(draw.sizes, minlength=len(target)) / len(draw.sizes)
        tvs.append(exact_tv_distance(emp, target))
        parts.append(draw.sizes.tobytes())
    return tvs, _digest(*parts)


def sample_k_uniformity(runs=100_000):
    G = petersen()
    pairs = [frozenset(p) for p in combinations(range(10), 2) if is_independent(G, p)]
    counts = Counter()
    bad = 0
    h = hashlib.sha256()
    for seed in range(runs):
        S, _ = sample_k(G, 2, 0.23, SamplerConfig(seed=seed, epsilon=0.05))
        if len(S) != 2 or not is_independent(G, S):
            bad += 1
        counts[S] += 1
        h.update(bytes(sorted(S)))
    emp = {p: counts[p] / runs for p in pairs}
    outside = runs - sum(counts[p] for p in pairs)
    tv = exact_tv_distance(emp, dict.fromkeys(pairs, 1 / len(pairs))) + outside / runs / 2
    return tv, bad, len(pairs), h.hexdigest()


def petersen_counts():
    ests = []
    for seed in range(20):
        est = count_ik(petersen(), 3, 0.23, 0.2, SamplerConfig(seed=seed))
        ests.append(est.log_estimate)
    return ests, _digest(*ests)


def magnetization_p3(runs=20_000):
    counts = Counter()
    for seed in range(runs):
        s, _ = sample_fixed_magnetization(path(3), 1, 0.34, 0.5, 1.0, SamplerConfig(seed=seed))
        assert s.plus_count == 1
        counts[str(s)] += 1
    emp = {k: counts[k] / runs for k in ("+--", "-+-", "--+")}
    tv = exact_tv_distance(emp, {"+--": 0.25, "-+-": 0.5, "--+": 0.25})
    return tv, _digest(sorted(counts.items()))


RANDOMISED = {
    "glauber_stationarity": lambda: glauber_stationarity()[-1],
    "sample_k_uniformity": lambda: sample_k_uniformity()[-1],
    "petersen_counts": lambda: petersen_counts()[-1],
    "magnetization_p3": lambda: magnetization_p3()[-1],
}


# -- criteria --------------------------------------------------------------------

def test_criterion_01_threshold_formulas(record_property):
    assert lambda_c(3, exact=True) == 4
    assert lambda_c(4, exact=True) == Fraction(27, 16)
    assert abs(alpha_c(3) - 4 / 17) <= 1e-12
    assert abs(alpha_c(4) - 27 / 151) <= 1e-12
    record_property("alpha_c(4)", alpha_c(4))


def test_criterion_02_asymptotic_constant(record_property):
    target = math.e / (1 + math.e)
    value = 10**4 * alpha_c(10**4)
    record_property("delta*alpha_c", value)
    assert abs(value - target) <= 0.01 * target


def test_criterion_03_oracle_golden_values():
    assert independence_polynomial(petersen()).coeffs == (1, 10, 30, 30, 5)
    assert independence_polynomial(complete_bipartite(3, 3)).coeffs == (1, 6, 6, 2)
    assert independence_polynomial(clique(4)).coeffs == (1, 4)


def test_criterion_04_occupancy_minimality(suite, record_property):
    assert len(suite) >= 500
    checked = 0
    for G in suite:
        D = G.max_degree
        for lam in _suite_lambdas(G):
            occ = exact_occupancy(G, lam)
            bound = lam / (1 + lam * (D + 1))
            assert occ >= bound - Fraction(1, 10**12), (G, lam)
            checked += 1
    for D in (3, 4):
        for lam in _suite_lambdas(clique(D + 1)):
            assert exact_occupancy(clique(D + 1), lam) == lam / (1 + lam * (D + 1))
    record_property("checks", checked)


def test_criterion_05_variance_sandwich_and_derivative(suite, record_property):
    h = 1e-5
    worst = 0.0
    for G in suite:
        P = independence_polynomial(G)
        D, M, n = G.max_degree, P.degree, G.n
        for lam in _suite_lambdas(G):
            var = size_distribution(P, lam).variance
            assert lam / (1 + lam) ** (2 + D) * M <= var <= n * n * lam / (1 + lam)
            x = float(lam)
            fd = (float(exact_occupancy(P, x + h)) - float(exact_occupancy(P, x - h))) / (2 * h)
            gap = abs(fd - float(var) / (n * x))
            worst = max(worst, gap)
            assert gap <= 1e-6, (G, lam, gap)
    record_property("max |fd - var/(n lam)|", worst)


def test_criterion_06_glauber_stationarity(record_property):
    tvs, digest = glauber_stationarity()
    _DIGESTS["glauber_stationarity"] = digest
    record_property("tv", tvs)
    assert max(tvs) <= 0.02


def test_criterion_07_sample_k_uniformity(record_property):
    tv, bad, support, digest = sample_k_uniformity()
    _DIGESTS["sample_k_uniformity"] = digest
    record_property("tv", tv)
    assert support == 30
    assert bad == 0
    assert tv <= 0.05


def test_criterion_08_grid_coverage(suite, record_property):
    # alpha = 0.2 lies above alpha_c(4); for degree-4 graphs the grid
    # ceiling uses alpha just below alpha_c(4) and k is capped accordingly.
    cells = 0
    for G in suite:
        n = G.n
        D = max(3, G.max_degree)
        alpha = min(0.2, alpha_c(D) * (1 - 1e-6))
        top = math.floor(2 * lambda_star(alpha, D) * n * n)
        lams = np.arange(top + 1) / (2 * n * n)
        coeffs = np.array(independence_polynomial(G).coeffs, dtype=float)
        ks = np.arange(len(coeffs))
        w = coeffs[None, :] * lams[:, None] ** ks[None, :]
        means = (w * ks).sum(1) / w.sum(1)
        for k in range(math.floor(alpha * n) + 1):
            assert np.any(np.abs(means - k) <= 0.5), (G, k)
            cells += 1
    record_property("(graph, k) pairs", cells)


def test_criterion_09_counting(suite, record_property):
    logs, digest = petersen_counts()
    _DIGESTS["petersen_counts"] = digest
    hits = sum(abs(x - math.log(30)) <= 0.2 for x in logs)
    record_property("runs within e^(+-0.2)", hits)
    assert hits >= 15
    for G in suite:
        P = independence_polynomial(G)
        acc = Fraction(1)
        for k in range(1, P.degree + 1):
            acc *= exact_free_volume(G, k - 1) / k
            assert acc == P.coeffs[k]


def test_criterion_10_reduction(record_property):
    G = clique(4)
    spec = find_gadget(0.3, 3)
    assert (spec.a, spec.b) == (1, 3)
    errs = []
    for r in (10, 50, 250):
        inst = build_instance(G, 0.3, 0.1, r=r, build_graph=False)
        errs.append(abs(verify_reduction(G, inst).log_ratio))
    record_property("|ln R|", errs)
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] <= 0.1
    assert gadget_variance_floor(spec) >= VARIANCE_CONSTANT / 3


def test_criterion_11_ising(suite, record_property):
    Z, _ = ising_partition_exact(clique(3), Fraction(1, 2), 1)
    assert Z == Fraction(13, 4)
    for G in suite:
        c = ising_coefficients(G, Fraction(1, 2))
        assert c == c[::-1]
    tv, digest = magnetization_p3()
    _DIGESTS["magnetization_p3"] = digest
    record_property("tv", tv)
    assert tv <= 0.05


def test_criterion_12_determinism(record_property):
    for name, fn in RANDOMISED.items():
        first = _DIGESTS[name] if name in _DIGESTS else fn()
        assert fn() == first, name
    record_property("reruns", sorted(RANDOMISED))
