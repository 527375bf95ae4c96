"""Approximate counting of size-k independent sets by annealing over size.

With ``f_j`` the mean free volume of a uniform size-``j`` independent set,
``i_k = prod_{j<k} f_j / (j+1)``. Each factor is estimated by averaging the
free volume of sets drawn by :func:`indsets.sample_k.sample_k`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal, localcontext

import numpy as np

from .errors import InconsistencyError, PreconditionError
from .graph import Graph, greedy_bound, is_independent
from .sample_k import SamplerConfig, sample_k


@dataclass(frozen=True)
class AnnealingPlan:
    k: int
    epsilon: float
    c_anneal: float = 0.5

    def __post_init__(self):
        if self.k < 0:
            raise PreconditionError("k must be non-negative")
        if not self.epsilon > 0 or not self.c_anneal > 0:
            raise PreconditionError("epsilon and c_anneal must be positive")

    @property
    def delta_prime(self) -> float:
        """Per-level failure budget 1/(4k)."""
        return 1.0 / (4 * self.k) if self.k else 0.0

    @property
    def m(self) -> int:
        """Samples per level, ceil(c_anneal eps^-2 k^2 ln max(e, k))."""
        k = max(self.k, 1)
        return max(1, math.ceil(self.c_anneal * k * k * math.log(max(math.e, k)) / self.epsilon**2))

    @property
    def sampler_epsilon(self) -> float:
        """TV accuracy asked of each fixed-size sample: delta'/2."""
        return self.delta_prime / 2 if self.k else 0.5


@dataclass
class CountEstimate:
    k: int
    log_estimate: float
    levels: list[float]
    guarantee_valid: bool

    @property
    def estimate(self) -> float:
        return math.exp(self.log_estimate)

    def decimal(self, digits: int = 17) -> str:
        """The estimate as a plain decimal string with ``digits`` significant digits."""
        if self.log_estimate == -math.inf:
            return "0"
        with localcontext() as ctx:
            ctx.prec = digits
            return format(+Decimal(self.log_estimate).exp(), "f")


def free_volume(G: Graph, J) -> int:
    """Number of vertices neither in ``J`` nor adjacent to it."""
    J = frozenset(J)
    if not is_independent(G, J):
        raise PreconditionError("free volume is defined for independent sets only")
    covered = set(J)
    for v in J:
        covered.update(G.adj[v])
    return G.n - len(covered)


def level_configs(config: SamplerConfig, j: int, plan: AnnealingPlan) -> list[SamplerConfig]:
    """One sampler config per draw at level ``j``; seeds are spawned from (seed, j)."""
    children = np.random.SeedSequence([config.seed, j]).spawn(plan.m)
    return [
        replace(config, seed=int(c.generate_state(1, np.uint64)[0]), epsilon=plan.sampler_epsilon)
        for c in children
    ]


def _level_range(G: Graph, j: int, delta: int) -> tuple[float, float]:
    return (G.n - j * (delta + 1)) / (j + 1), G.n / (j + 1)


def estimate_level(G: Graph, j: int, plan: AnnealingPlan, alpha: float,
                   config: SamplerConfig | None = None, delta: int | None = None,
                   sampler=None) -> float:
    """Sample mean of free_volume(J)/(j+1) over ``plan.m`` draws of size-``j`` sets."""
    if not 0 <= j:
        raise PreconditionError("level index must be non-negative")
    if j == 0:
        return float(G.n)
    config = config or SamplerConfig()
    delta = delta if delta is not None else max(3, G.max_degree)
    lo, hi = _level_range(G, j, delta)
    total = 0.0
    for cfg in level_configs(config, j, plan):
        J, _ = sample_k(G, j, alpha, cfg, delta=delta, sampler=sampler)
        value = free_volume(G, J) / (j + 1)
        if not lo - 1e-12 <= value <= hi + 1e-12:
            raise InconsistencyError(f"level {j} sample {value} outside [{lo}, {hi}]")
        total += value
    return total / plan.m


def count_ik(G: Graph, k: int, alpha: float, epsilon: float,
             config: SamplerConfig | None = None, c_anneal: float = 0.5,
             delta: int | None = None, sampler=None) -> CountEstimate:
    """Estimate ``i_k(G)`` as a product of ``k`` free-volume ratios.

    Only sizes ``0..k-1`` are ever sampled, so the sampler's precondition is
    ``k - 1 <= alpha * n``.
    """
    config = config or SamplerConfig()
    plan = AnnealingPlan(k, epsilon, c_anneal)
    if k > 1 and k - 1 > alpha * G.n * (1 + 1e-12):
        raise PreconditionError(f"k-1={k - 1} exceeds alpha*n={alpha * G.n:g}")
    levels: list[float] = []
    log_est = 0.0
    provable = greedy_bound(G)
    for j in range(k):
        t = estimate_level(G, j, plan, alpha, config, delta, sampler)
        levels.append(t)
        if t == 0.0:
            if j + 1 <= provable:
                raise InconsistencyError(
                    f"level {j} estimated zero free volume but G has an independent "
                    f"set of size {provable}"
                )
            log_est = -math.inf
            break
        log_est += math.log(t)
    guarantee = config.n_samples_override is None and config.mode == "general"
    return CountEstimate(k, log_est, levels, guarantee)
