"""Hardness-reduction instances: G plus r copies of a regular gadget H.

H is ``a`` copies of K_{D,D} and ``b`` copies of K_{D+1}, tuned so that its
occupancy at some supercritical fugacity equals the target density. The
ratio ``i_k(G') / i_k(rH)`` then approximates ``Z_G(lam)`` once r is large;
:func:`verify_reduction` checks this exactly with big-integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

from .errors import InconsistencyError, PreconditionError, ResourceLimitError
from .exact import (
    IndependencePolynomial,
    evaluate_partition,
    independence_polynomial,
    poly_power,
    size_distribution,
)
from .graph import Graph, disjoint_union, gadget, is_regular, replicate
from .thresholds import alpha_c, lambda_c

PAIRS = ((0, 1), (1, 16), (1, 6), (1, 3), (2, 3), (2, 1), (1, 0))
VARIANCE_CONSTANT = 0.00384
DEGREE_CAP = 200_000


@dataclass(frozen=True)
class GadgetSpec:
    a: int
    b: int
    delta: int
    lam: float
    alpha: float

    @property
    def n_h(self) -> int:
        return 2 * self.a * self.delta + self.b * (self.delta + 1)

    def graph(self) -> Graph:
        return gadget(self.a, self.b, self.delta)

    def polynomial(self) -> IndependencePolynomial:
        return gadget_polynomial(self.a, self.b, self.delta)


@dataclass(frozen=True)
class ReductionInstance:
    g_prime: Graph
    r: int
    k: int
    N: int
    gadget: GadgetSpec
    epsilon: float

    def sidecar(self, base: Graph) -> dict:
        """JSON-ready description; carries G itself so it can be re-verified."""
        return {
            "schema_version": 1,
            "a": self.gadget.a,
            "b": self.gadget.b,
            "delta": self.gadget.delta,
            "lambda": self.gadget.lam,
            "alpha": self.gadget.alpha,
            "n_h": self.gadget.n_h,
            "r": self.r,
            "k": self.k,
            "N": self.N,
            "epsilon": self.epsilon,
            "graph": {"n": base.n, "edges": [list(e) for e in base.edges()]},
        }


@lru_cache(maxsize=None)
def _block_polys(delta: int) -> tuple[IndependencePolynomial, IndependencePolynomial]:
    from .graph import clique, complete_bipartite

    return (
        independence_polynomial(complete_bipartite(delta, delta)),
        independence_polynomial(clique(delta + 1)),
    )


def gadget_polynomial(a: int, b: int, delta: int) -> IndependencePolynomial:
    bip, cl = _block_polys(delta)
    out = IndependencePolynomial((1,))
    if a:
        out = out * poly_power(bip, a)
    if b:
        out = out * poly_power(cl, b)
    return out


def gadget_occupancy(a: int, b: int, delta: int, lam: float) -> float:
    """Occupancy of H_{a,b}: the vertex-weighted mean of its block occupancies."""
    bip, cl = _block_polys(delta)
    mean_bip = size_distribution(bip, lam).mean
    mean_cl = size_distribution(cl, lam).mean
    return float(a * mean_bip + b * mean_cl) / (2 * a * delta + b * (delta + 1))


def occupancy_limit(a: int, b: int, delta: int) -> float:
    """Occupancy of H_{a,b} as lam -> infinity."""
    return (a * delta + b) / (2 * a * delta + b * (delta + 1))


def find_gadget(alpha: float, delta: int, tol: float = 1e-10) -> GadgetSpec:
    """First listed pair (a, b) whose occupancy window contains ``alpha``,
    with the fugacity solving occupancy = alpha found by bisection."""
    if not alpha_c(delta) < alpha < 0.5:
        raise PreconditionError(f"need alpha_c({delta}) < alpha < 1/2, got {alpha}")
    lc = lambda_c(delta)
    for a, b in PAIRS:
        if gadget_occupancy(a, b, delta, lc) < alpha < occupancy_limit(a, b, delta):
            break
    else:
        raise InconsistencyError(f"no listed gadget pair is feasible for alpha={alpha}, delta={delta}")

    def f(lam):
        return gadget_occupancy(a, b, delta, lam) - alpha

    lo, hi = lc, 2 * lc
    while f(hi) <= 0:
        lo, hi = hi, 2 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    lam = 0.5 * (lo + hi)
    if abs(f(lam)) > tol:
        raise InconsistencyError(f"bisection stalled: |occupancy - alpha| = {abs(f(lam)):g}")
    return GadgetSpec(a, b, delta, lam, alpha)


def replication_count(n: int, delta: int, epsilon: float, c_reduction: float = 1.0) -> int:
    return max(1, math.ceil(c_reduction * delta * n * n / epsilon))


def build_instance(G: Graph, alpha: float, epsilon: float, c_reduction: float = 1.0,
                   r: int | None = None, delta: int | None = None,
                   build_graph: bool = True) -> ReductionInstance:
    """G' = G plus r copies of the gadget; target size k = floor(alpha N)."""
    delta = delta if delta is not None else G.max_degree
    if delta < 3 or not is_regular(G, delta):
        raise PreconditionError(f"input must be a {delta}-regular graph with degree >= 3")
    spec = find_gadget(alpha, delta)
    if r is None:
        r = replication_count(G.n, delta, epsilon, c_reduction)
    if r < 1:
        raise PreconditionError("replication count must be >= 1")
    N = G.n + r * spec.n_h
    g_prime = disjoint_union(G, replicate(spec.graph(), r)) if build_graph else None
    return ReductionInstance(g_prime, r, math.floor(alpha * N), N, spec, epsilon)


@dataclass
class ReductionReport:
    r: int
    k: int
    N: int
    log_ratio: float
    within: bool
    log_z: float
    max_size_ratio_error: float

    def as_dict(self) -> dict:
        return asdict(self)


def _log_int(x: int) -> float:
    return math.log(x) if x > 0 else -math.inf


def verify_reduction(G: Graph, instance: ReductionInstance,
                     degree_cap: int = DEGREE_CAP) -> ReductionReport:
    """Exact ratio R = i_k(G') / (i_k(rH) Z_G(lam)) and per-size ratio errors.

    ``max_size_ratio_error`` is the largest |ln(i_{k-j}(rH)/i_k(rH)) - j ln lam|
    over ``0 <= j <= min(n, k)``.
    """
    spec, r, k = instance.gadget, instance.r, instance.k
    if r * spec.n_h > degree_cap:
        raise ResourceLimitError(f"r * n_H = {r * spec.n_h} exceeds the degree cap {degree_cap}")
    pg = independence_polynomial(G)
    prh = poly_power(spec.polynomial(), r)
    ik_rh = prh.coefficient(k)
    ik_gp = sum(pg.coefficient(j) * prh.coefficient(k - j) for j in range(min(len(pg), k + 1)))
    log_z = evaluate_partition(pg, spec.lam, log=True)
    log_ratio = _log_int(ik_gp) - _log_int(ik_rh) - log_z
    lam_log = math.log(spec.lam)
    errs = [
        abs(_log_int(prh.coefficient(k - j)) - _log_int(ik_rh) - j * lam_log)
        for j in range(min(G.n, k) + 1)
    ]
    eps = instance.epsilon
    return ReductionReport(
        r=r, k=k, N=instance.N, log_ratio=log_ratio,
        within=abs(log_ratio) <= eps / 2, log_z=log_z,
        max_size_ratio_error=max(errs),
    )


def gadget_variance_floor(spec: GadgetSpec) -> float:
    """Exact variance of |I| on one gadget copy; must be >= 0.00384/delta."""
    var = float(size_distribution(spec.polynomial(), spec.lam).variance)
    floor = VARIANCE_CONSTANT / spec.delta
    if not var >= floor:
        raise InconsistencyError(f"gadget variance {var:g} below the floor {floor:g}")
    return var
