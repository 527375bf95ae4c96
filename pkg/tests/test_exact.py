import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indsets.errors import PreconditionError, ResourceLimitError
from indsets.exact import (
    ExactHardcoreSampler, IndependencePolynomial, convolve, empirical_distribution,
    evaluate_partition, exact_free_volume, exact_occupancy, exact_tv_distance, exact_variance,
    hardcore_distribution, independence_polynomial, independence_polynomial_bruteforce,
    independent_sets, poly_power, size_distribution,
)
from indsets.graph import (
    clique, complete_bipartite, cycle, empty_graph, from_edge_list, path, petersen,
    random_regular,
)
from strategies import graphs


def test_golden_polynomials():
    assert independence_polynomial(petersen()).coeffs == (1, 10, 30, 30, 5)
    assert independence_polynomial(complete_bipartite(3, 3)).coeffs == (1, 6, 6, 2)
    assert independence_polynomial(clique(4)).coeffs == (1, 4)
    assert independence_polynomial(empty_graph(0)).coeffs == (1,)
    assert independence_polynomial(empty_graph(3)).coeffs == (1, 3, 3, 1)
    # Fibonacci-style counts on paths
    assert independence_polynomial(path(4)).coeffs == (1, 4, 3)


@settings(max_examples=80, deadline=None)
@given(graphs())
def test_branching_matches_bruteforce(G):
    assert independence_polynomial(G) == independence_polynomial_bruteforce(G)


def test_branching_on_larger_graph_matches_bruteforce():
    G = random_regular(20, 3, seed=2)
    assert independence_polynomial(G) == independence_polynomial_bruteforce(G)


def test_size_limit():
    with pytest.raises(ResourceLimitError):
        independence_polynomial(random_regular(42, 3, seed=0))
    assert independence_polynomial(cycle(41), limit=41).n == 41


def test_polynomial_validation():
    with pytest.raises(ValueError):
        IndependencePolynomial((2, 1))
    P = IndependencePolynomial((1, 3, 1))
    assert P.degree == 2 and P.n == 3 and P.coefficient(5) == 0 and P(2) == 11


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 10**30), min_size=1, max_size=30),
       st.lists(st.integers(0, 10**30), min_size=1, max_size=30))
def test_convolve_matches_schoolbook(a, b):
    expect = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            expect[i + j] += x * y
    assert list(convolve(a, b)) == expect


def test_poly_power_matches_repeated_product():
    P = independence_polynomial(clique(4))
    Q = independence_polynomial(complete_bipartite(3, 3))
    acc = IndependencePolynomial((1,))
    for r in range(1, 12):
        acc = acc * P * Q
        assert poly_power(P * Q, r) == acc
    with pytest.raises(PreconditionError):
        poly_power(P, 0)


def test_evaluate_partition_exact_and_log():
    P = independence_polynomial(petersen())
    assert evaluate_partition(P, 1) == 76
    assert evaluate_partition(P, Fraction(1, 2)) == Fraction(1) + 5 + Fraction(30, 4) + Fraction(30, 8) + Fraction(5, 16)
    assert math.isclose(evaluate_partition(P, 2.0, log=True), math.log(1 + 20 + 120 + 240 + 80))
    big = poly_power(P, 400)
    assert math.isclose(evaluate_partition(big, 3.0, log=True), 400 * math.log(P(3)), rel_tol=1e-12)


def test_size_distribution_exact():
    d = size_distribution(clique(3), Fraction(1))
    assert d.probabilities == (Fraction(1, 4), Fraction(3, 4))
    assert d.mean == Fraction(3, 4) and d.variance == Fraction(3, 16)


def test_clique_occupancy_formula():
    for D in (3, 4, 5):
        for lam in (Fraction(1, 3), Fraction(2), Fraction(7, 2)):
            assert exact_occupancy(clique(D + 1), lam) == lam / (1 + (D + 1) * lam)


def test_variance_float_matches_fraction():
    G = petersen()
    assert math.isclose(exact_variance(G, 1.3), float(exact_variance(G, Fraction(13, 10))), rel_tol=1e-12)


def test_hardcore_distribution_and_sets():
    G = path(3)
    dist = hardcore_distribution(G, 1)
    assert sum(dist.values()) == 1
    assert set(dist) == {frozenset(), frozenset({0}), frozenset({1}), frozenset({2}), frozenset({0, 2})}
    assert sorted(map(sorted, independent_sets(petersen(), 4))) == sorted(
        map(sorted, (s for s in independent_sets(petersen()) if len(s) == 4)))


def test_free_volume_oracle():
    assert exact_free_volume(petersen(), 0) == 10
    assert exact_free_volume(petersen(), 1) == 6
    assert exact_free_volume(petersen(), 2) == 3
    # f_j = (j+1) i_{j+1} / i_j
    P = independence_polynomial(cycle(7))
    for j in range(P.degree):
        assert exact_free_volume(cycle(7), j) == Fraction((j + 1) * P.coeffs[j + 1], P.coeffs[j])
    with pytest.raises(PreconditionError):
        exact_free_volume(clique(3), 2)


def test_tv_distance():
    assert exact_tv_distance([0.5, 0.5], [1.0, 0.0]) == 0.5
    assert exact_tv_distance({"a": 1.0}, {"a": 1.0}) == 0.0
    with pytest.raises(ValueError):
        exact_tv_distance([1.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        exact_tv_distance({"a": 1.0}, {"b": 1.0})


def test_empirical_distribution():
    assert empirical_distribution("aab", "abc") == {"a": 2 / 3, "b": 1 / 3, "c": 0.0}
    with pytest.raises(ValueError):
        empirical_distribution("z", "ab")


def test_exact_sampler_matches_distribution():
    G = from_edge_list(3, [(0, 1)])
    draw = ExactHardcoreSampler().draw(G, 1.0, 60_000, 0.01, key=3)
    target = size_distribution(G, 1.0).probabilities
    emp = [float((draw.sizes == k).mean()) for k in range(len(target))]
    assert exact_tv_distance(emp, target) < 0.01
    assert all(len(draw.state(j)) == draw.sizes[j] for j in range(20))
