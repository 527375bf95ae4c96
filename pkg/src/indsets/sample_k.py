"""Approximately uniform independent sets of a prescribed size.

A binary search over the fugacity grid ``t / (2 n^2)`` looks for a value
where the hard-core model's mean size is within 1/4 of ``k``; the first
sampled set of size exactly ``k`` at such a fugacity is returned. Conditioned
on its size, a hard-core sample is uniform over the sets of that size.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .errors import PreconditionError
from .glauber import GlauberSampler, has_mixing_guarantee, seed_words
from .graph import Graph, greedy_independent_set, is_triangle_free
from .thresholds import alpha_c, lambda_star, lambda_star_triangle_free


@dataclass(frozen=True)
class SamplerConfig:
    c_loop: float = 3.0
    c_samples: float = 1.0
    epsilon: float = 0.05
    seed: int = 0
    c_mix: float = 2.0
    mode: str = "general"  # or "triangle_free"
    tf_delta: float = 0.05
    n_samples_override: int | None = None

    def __post_init__(self):
        if self.mode not in ("general", "triangle_free"):
            raise PreconditionError(f"unknown mode {self.mode!r}")
        for name in ("c_loop", "c_samples", "epsilon", "c_mix"):
            if not getattr(self, name) > 0:
                raise PreconditionError(f"{name} must be positive")
        if self.n_samples_override is not None and self.n_samples_override < 1:
            raise PreconditionError("n_samples_override must be >= 1")

    def loop_length(self, n: int) -> int:
        return max(1, math.ceil(self.c_loop * _log_clamped(n)))

    def n_samples(self, n: int) -> int:
        if self.n_samples_override is not None:
            return self.n_samples_override
        inner = max(math.e, _log_clamped(n) / self.epsilon)
        return max(1, math.ceil(self.c_samples * n * n * math.log(inner)))

    def chain_epsilon(self, n: int) -> float:
        """Per-sample TV target eps / (2 * loop length * N)."""
        return self.epsilon / (2 * self.loop_length(n) * self.n_samples(n))


def _log_clamped(n: int) -> float:
    return max(1.0, math.log(n)) if n > 0 else 1.0


@dataclass
class SearchTrace:
    outcome: str = "fallback"  # found | fallback | trivial
    lambda_star: float = 0.0
    grid_size: int = 0
    loop_length: int = 0
    n_samples: int = 0
    chain_epsilon: float = 0.0
    guarantee: bool = True
    records: list[dict] = field(default_factory=list)

    def to_json_lines(self) -> list[str]:
        head = {k: v for k, v in asdict(self).items() if k != "records"}
        lines = [json.dumps({"type": "iteration", **r}, sort_keys=True) for r in self.records]
        lines.append(json.dumps({"type": "summary", **head}, sort_keys=True))
        return lines


def lambda_grid(n: int, lam_star: float) -> list[float]:
    """Fugacities ``t / (2 n^2)`` for ``t = 0..floor(2 lam_star n^2)``."""
    if n < 1 or not lam_star > 0:
        raise PreconditionError("need n >= 1 and lam_star > 0")
    scale = 2 * n * n
    return [t / scale for t in range(math.floor(lam_star * scale) + 1)]


def median_lower(seq):
    """Lower median: the element at index (len - 1) // 2 of a sorted sequence."""
    if len(seq) == 0:
        raise ValueError("median of an empty sequence")
    return seq[(len(seq) - 1) // 2]


def _grid_ceiling(G: Graph, k: int, alpha: float, delta: int, config: SamplerConfig) -> float:
    if G.max_degree > delta:
        raise PreconditionError(f"graph has maximum degree {G.max_degree} > {delta}")
    if k > alpha * G.n * (1 + 1e-12):
        raise PreconditionError(f"k={k} exceeds alpha*n={alpha * G.n:g}")
    if config.mode == "triangle_free":
        if not is_triangle_free(G):
            raise PreconditionError("triangle_free mode needs a triangle-free graph")
        if not 0 < alpha < (1 - config.tf_delta) / delta:
            raise PreconditionError(f"triangle_free mode needs alpha < (1-delta)/{delta}")
        return lambda_star_triangle_free(delta)
    if not alpha < alpha_c(delta):
        raise PreconditionError(f"alpha={alpha} is not below alpha_c({delta})={alpha_c(delta):.6g}")
    return lambda_star(alpha, delta)


def fugacity_search(G: Graph, k: int, lam_max: float, config: SamplerConfig,
                    sampler, fallback) -> tuple:
    """Binary search on the grid ``t / (2 n^2) <= lam_max`` for a fugacity whose
    batch mean is within 1/4 of ``k``, returning the first batch member of
    size ``k`` found there; ``fallback(G, k)`` is used if the loop runs dry."""
    n = G.n
    scale = 2 * n * n
    remaining = range(math.floor(lam_max * scale) + 1)
    loop_len = config.loop_length(n)
    n_samples = config.n_samples(n)
    eps_chain = config.chain_epsilon(n)
    trace = SearchTrace(
        lambda_star=lam_max, grid_size=len(remaining), loop_length=loop_len,
        n_samples=n_samples, chain_epsilon=eps_chain,
        guarantee=config.n_samples_override is None,
    )
    keys = seed_words(config.seed, loop_len)

    for i in range(loop_len):
        if len(remaining) == 0:
            break
        t = median_lower(remaining)
        lam = t / scale
        draw = sampler.draw(G, lam, n_samples, eps_chain, keys[i])
        sizes = draw.sizes
        kappa = float(sizes.mean())
        hits = (sizes == k).nonzero()[0]
        record = {"iteration": i, "t": t, "lambda": lam, "kappa": kappa, "hits": int(len(hits))}
        if abs(kappa - k) <= 0.25 and len(hits):
            record.update(branch="accept", remaining=len(remaining))
            trace.records.append(record)
            trace.outcome = "found"
            return draw.state(int(hits[0])), trace
        lo = remaining.index(t)
        if kappa <= k:
            remaining = remaining[lo + 1:]
            record["branch"] = "up"
        else:
            remaining = remaining[:lo]
            record["branch"] = "down"
        record["remaining"] = len(remaining)
        trace.records.append(record)

    trace.outcome = "fallback"
    return fallback(G, k), trace


def sample_k(G: Graph, k: int, alpha: float, config: SamplerConfig | None = None,
             delta: int | None = None, sampler=None) -> tuple[frozenset[int], SearchTrace]:
    """Approximately uniform independent set of size ``k``, plus the search trace.

    ``delta`` defaults to ``max(3, G.max_degree)``. ``sampler`` may replace
    the Glauber sampler with anything exposing ``draw(G, lam, N, eps, key)``,
    e.g. :class:`indsets.exact.ExactHardcoreSampler`.
    """
    config = config or SamplerConfig()
    delta = delta if delta is not None else max(3, G.max_degree)
    if k < 0:
        raise PreconditionError("k must be non-negative")
    if k == 0:
        return frozenset(), SearchTrace(outcome="trivial")
    lam_max = _grid_ceiling(G, k, alpha, delta, config)
    sampler = sampler or GlauberSampler(config.c_mix)
    result, trace = fugacity_search(G, k, lam_max, config, sampler, greedy_independent_set)
    trace.guarantee = trace.guarantee and has_mixing_guarantee(G, lam_max)
    return result, trace
