"""Anti-ferromagnetic Ising model with a fixed number of + spins.

Weights are ``B^{m(sigma)} lam^{#plus}`` where ``m`` counts monochromatic
edges and ``0 < B < 1``. The fixed-magnetization sampler reuses the fugacity
search of :mod:`indsets.sample_k` with Ising heat-bath chains in place of
hard-core chains, and coefficients ``c_k`` are estimated by telescoping

    c_{j+1} / c_j = E_{nu_j}[ sum_{v minus} B^{delta(v)} ] / (j + 1)

where ``delta(v)`` is (# plus neighbours) - (# minus neighbours). Flipping
v from - to + changes the monochromatic count by exactly ``delta(v)`` and
every size-(j+1) assignment arises from j+1 such flips, hence the identity.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numba import njit

from .annealing import AnnealingPlan, CountEstimate, level_configs
from .errors import InconsistencyError, PreconditionError, ResourceLimitError
from .glauber import (
    _GOLDEN, _LO32, _S32, HardcoreDraw, MixingSchedule, _chain_seed, _mix, seed_words,
)
from .graph import Graph
from .sample_k import SamplerConfig, SearchTrace, fugacity_search

log = logging.getLogger(__name__)

ISING_EXACT_LIMIT = 22


def b_c(delta: int) -> Fraction:
    """(delta - 2) / delta."""
    if delta < 3:
        raise PreconditionError("b_c is defined for delta >= 3")
    return Fraction(delta - 2, delta)


@dataclass(frozen=True)
class IsingParams:
    B: float
    lam: float
    delta: int

    def __post_init__(self):
        if not 0 < self.B < 1:
            raise PreconditionError(f"anti-ferromagnetic regime needs 0 < B < 1, got {self.B}")
        if not 0 < self.lam <= 1:
            raise PreconditionError(f"need 0 < lambda <= 1, got {self.lam}")
        if self.delta < 3:
            raise PreconditionError("delta must be >= 3")

    @property
    def b_c(self) -> Fraction:
        return b_c(self.delta)


@dataclass(frozen=True)
class SpinAssignment:
    """Spins as a tuple of +1 / -1, one per vertex."""

    spins: tuple[int, ...]
    plus_count: int = field(init=False)

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.spins):
            raise PreconditionError("spins must be +1 or -1")
        object.__setattr__(self, "plus_count", sum(1 for s in self.spins if s == 1))

    @classmethod
    def from_plus(cls, n: int, plus) -> SpinAssignment:
        plus = set(plus)
        return cls(tuple(1 if v in plus else -1 for v in range(n)))

    @classmethod
    def all_minus(cls, n: int) -> SpinAssignment:
        return cls((-1,) * n)

    @property
    def n(self) -> int:
        return len(self.spins)

    @property
    def plus(self) -> frozenset[int]:
        return frozenset(v for v, s in enumerate(self.spins) if s == 1)

    def monochromatic_edges(self, G: Graph) -> int:
        return sum(1 for u, v in G.edges() if self.spins[u] == self.spins[v])

    def __str__(self):
        return "".join("+" if s == 1 else "-" for s in self.spins)


def _check_B(B) -> None:
    if not 0 < B <= 1:
        raise PreconditionError(f"need 0 < B <= 1, got {B}")


# -- exact enumeration --------------------------------------------------------

def ising_counts(G: Graph, limit: int = ISING_EXACT_LIMIT) -> np.ndarray:
    """``counts[k, m]`` = number of assignments with k plus spins and m
    monochromatic edges, by enumerating all 2^n assignments."""
    n = G.n
    if n > limit:
        raise ResourceLimitError(f"n={n} exceeds the Ising enumeration limit {limit}")
    codes = np.arange(1 << n, dtype=np.int64)
    k = np.zeros(codes.shape, np.int64)
    for v in range(n):
        k += (codes >> v) & 1
    m = np.zeros(codes.shape, np.int64)
    for u, v in G.edges():
        m += (((codes >> u) ^ (codes >> v)) & 1) == 0
    width = G.num_edges + 1
    flat = np.bincount(k * width + m, minlength=(n + 1) * width)
    return flat.reshape(n + 1, width)


def _exact_kind(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def ising_coefficients(G: Graph, B, limit: int = ISING_EXACT_LIMIT) -> list:
    """``c_k = sum over k-plus assignments of B^m``; exact for int/Fraction B."""
    _check_B(B)
    counts = ising_counts(G, limit)
    if _exact_kind(B):
        B = Fraction(B)
        powers = [B**j for j in range(counts.shape[1])]
        return [sum(int(c) * p for c, p in zip(row, powers)) for row in counts]
    powers = float(B) ** np.arange(counts.shape[1])
    return [float(row @ powers) for row in counts.astype(float)]


def ising_partition_exact(G: Graph, B, lam, limit: int = ISING_EXACT_LIMIT) -> tuple:
    """``(Z, c)`` with ``Z = sum_k c_k lam^k``."""
    if not lam > 0:
        raise PreconditionError("lambda must be positive")
    c = ising_coefficients(G, B, limit)
    if _exact_kind(B, lam):
        lam = Fraction(lam)
    return sum(ck * lam**k for k, ck in enumerate(c)), c


def ising_occupancy(G: Graph, B, lam, limit: int = ISING_EXACT_LIMIT):
    """Expected fraction of + spins, ``lam d/dlam log Z / n``."""
    if G.n == 0:
        raise PreconditionError("occupancy of the empty graph is undefined")
    Z, c = ising_partition_exact(G, B, lam, limit)
    if _exact_kind(B, lam):
        lam = Fraction(lam)
    return sum(k * ck * lam**k for k, ck in enumerate(c)) / (G.n * Z)


def conjectured_alpha_min(B: float, lam: float, delta: int) -> float:
    """Ising occupancy of the clique K_{delta+1}.

    Conjectured (not proven) to be the minimum occupancy over graphs of
    maximum degree ``delta``; reported as an estimate only.
    """
    _check_B(B)
    q = delta + 1
    logs = [
        math.lgamma(q + 1) - math.lgamma(k + 1) - math.lgamma(q - k + 1)
        + (math.comb(k, 2) + math.comb(q - k, 2)) * math.log(B) + k * math.log(lam)
        for k in range(q + 1)
    ]
    top = max(logs)
    w = [math.exp(x - top) for x in logs]
    return sum(k * wk for k, wk in enumerate(w)) / (q * sum(w))


# -- Glauber dynamics ----------------------------------------------------------

@njit(cache=True)
def _ising_advance(indptr, indices, spin, plus_nbrs, plus, thr, dmax, steps, state):
    # Heat-bath update: v becomes + with probability lam B^d / (1 + lam B^d),
    # d = 2 * plus_nbrs[v] - deg(v); thr holds those probabilities * 2^32.
    n = np.uint64(spin.shape[0])
    for _ in range(steps):
        state += _GOLDEN
        z = _mix(state)
        v = ((z >> _S32) * n) >> _S32
        d = indptr[v + 1] - indptr[v]
        new = 1 if (z & _LO32) < thr[2 * plus_nbrs[v] - d + dmax] else 0
        if new != spin[v]:
            spin[v] = new
            step = 1 if new else -1
            plus += step
            for p in range(indptr[v], indptr[v + 1]):
                plus_nbrs[indices[p]] += step
    return state, plus


@njit(cache=True)
def _ising_batch(indptr, indices, n, thr, dmax, steps, key, sizes):
    for j in range(sizes.shape[0]):
        spin = np.zeros(n, np.uint8)
        plus_nbrs = np.zeros(n, np.int32)
        _, sizes[j] = _ising_advance(indptr, indices, spin, plus_nbrs, 0, thr, dmax,
                                     steps, _chain_seed(key, j))


@njit(cache=True)
def _ising_replay(indptr, indices, n, thr, dmax, steps, key, j):
    spin = np.zeros(n, np.uint8)
    plus_nbrs = np.zeros(n, np.int32)
    _ising_advance(indptr, indices, spin, plus_nbrs, 0, thr, dmax, steps, _chain_seed(key, j))
    return spin


def heat_bath_thresholds(B: float, lam: float, dmax: int) -> np.ndarray:
    """Index ``d + dmax`` holds floor(2^32 * lam B^d / (1 + lam B^d)), |d| <= dmax."""
    _check_B(B)
    if lam < 0:
        raise PreconditionError("fugacity must be non-negative")
    d = np.arange(-dmax, dmax + 1, dtype=float)
    # log-domain logistic to stay finite for large |d|
    x = math.log(lam) + d * math.log(B) if lam > 0 else np.full(d.shape, -np.inf)
    p = 1.0 / (1.0 + np.exp(-x))
    return np.floor(p * 2.0**32).astype(np.uint64)


class IsingChain:
    """One heat-bath chain started from all minus."""

    def __init__(self, G: Graph, seed=0, chain: int = 0):
        self.graph = G
        self.spin = np.zeros(G.n, np.uint8)  # 1 = plus
        self.plus_nbrs = np.zeros(G.n, np.int32)
        self.plus_count = 0
        self.rng_state = np.uint64(_chain_seed(seed_words(seed)[0], chain))
        self.steps_taken = 0

    @property
    def assignment(self) -> SpinAssignment:
        return SpinAssignment(tuple(1 if s else -1 for s in self.spin.tolist()))

    def run(self, B: float, lam: float, steps: int) -> IsingChain:
        G = self.graph
        if G.n and steps > 0:
            thr = heat_bath_thresholds(B, lam, G.max_degree)
            self.rng_state, self.plus_count = _ising_advance(
                G.indptr, G.indices, self.spin, self.plus_nbrs, self.plus_count,
                thr, G.max_degree, steps, np.uint64(self.rng_state),
            )
        self.steps_taken += max(steps, 0)
        return self


def ising_glauber_step(state: IsingChain, G: Graph, B: float, lam: float) -> IsingChain:
    """Resample one uniformly chosen spin from its conditional law, in place."""
    if state.graph is not G and state.graph != G:
        raise PreconditionError("chain belongs to a different graph")
    return state.run(B, lam, 1)


class IsingSampler:
    """Batch sampler with the ``draw(G, lam, N, eps, key)`` interface used by
    :func:`indsets.sample_k.fugacity_search`; sizes are plus counts."""

    def __init__(self, B: float, c_mix: float = 2.0):
        _check_B(B)
        self.B = B
        self.schedule = MixingSchedule(c_mix)

    def draw(self, G: Graph, lam: float, n_samples: int, eps: float, key) -> HardcoreDraw:
        if n_samples < 1:
            raise PreconditionError("need at least one sample")
        key = np.uint64(key)
        sizes = np.zeros(n_samples, np.int64)
        if G.n == 0:
            return HardcoreDraw(sizes, lambda j: SpinAssignment(()))
        steps = self.schedule.steps(G.n, eps)
        thr = heat_bath_thresholds(self.B, lam, G.max_degree)
        _ising_batch(G.indptr, G.indices, G.n, thr, G.max_degree, steps, key, sizes)

        def getter(j: int) -> SpinAssignment:
            spin = _ising_replay(G.indptr, G.indices, G.n, thr, G.max_degree, steps, key, j)
            return SpinAssignment(tuple(1 if s else -1 for s in spin.tolist()))

        return HardcoreDraw(sizes, getter)


# -- fixed magnetization --------------------------------------------------------

def lowest_plus(G: Graph, k: int) -> SpinAssignment:
    return SpinAssignment.from_plus(G.n, range(k))


def _check_magnetization(G: Graph, k: int, alpha: float, B: float, lambda_max: float) -> None:
    if not 0 < B < 1:
        raise PreconditionError(f"need 0 < B < 1, got {B}")
    if not 0 < lambda_max <= 1:
        raise PreconditionError(f"need 0 < lambda_max <= 1, got {lambda_max}")
    if not 0 < alpha < 0.5:
        raise PreconditionError(f"need 0 < alpha < 1/2, got {alpha}")
    if k < 0 or k > alpha * G.n * (1 + 1e-12):
        raise PreconditionError(f"k={k} must lie in [0, alpha*n={alpha * G.n:g}]")
    delta = max(3, G.max_degree)
    guess = conjectured_alpha_min(B, lambda_max, delta)
    if alpha >= guess:
        log.warning("alpha=%g is not below the conjectured clique occupancy %.6g; "
                    "the grid may not reach mean %d", alpha, guess, k)


def sample_fixed_magnetization(G: Graph, k: int, alpha: float, B: float, lambda_max: float,
                               config: SamplerConfig | None = None,
                               sampler=None) -> tuple[SpinAssignment, SearchTrace]:
    """Approximate sample from assignments with exactly ``k`` plus spins,
    weighted by ``B^{monochromatic edges}``."""
    config = config or SamplerConfig()
    _check_magnetization(G, k, alpha, B, lambda_max)
    if k == 0:
        return SpinAssignment.all_minus(G.n), SearchTrace(outcome="trivial", guarantee=False)
    sampler = sampler or IsingSampler(B, config.c_mix)
    result, trace = fugacity_search(G, k, lambda_max, config, sampler, lowest_plus)
    trace.guarantee = False  # no proven threshold is available for the grid ceiling
    return result, trace


# -- coefficient estimation -----------------------------------------------------

def flip_weight(G: Graph, sigma: SpinAssignment, B: float):
    """``sum over minus v of B^{(#plus nbrs) - (#minus nbrs)}``."""
    total = 0
    for v, s in enumerate(sigma.spins):
        if s == -1:
            d = sum(sigma.spins[u] for u in G.adj[v])
            total += B**d
    return total


def exact_level_ratio(G: Graph, j: int, B):
    """``E_{nu_j}[flip_weight] / (j + 1)`` by direct enumeration of size-j
    assignments; exact for int/Fraction B. Intended for small graphs."""
    _check_B(B)
    if _exact_kind(B):
        B = Fraction(B)
    num = den = 0
    for plus in itertools.combinations(range(G.n), j):
        sigma = SpinAssignment.from_plus(G.n, plus)
        w = B ** sigma.monochromatic_edges(G)
        num += w * flip_weight(G, sigma, B)
        den += w
    return num / den / (j + 1)


def count_coefficient(G: Graph, k: int, alpha: float, epsilon: float, B: float,
                      lambda_max: float, config: SamplerConfig | None = None,
                      c_anneal: float = 0.5, sampler=None) -> CountEstimate:
    """Estimate ``c_k(G, B)`` from ``c_0 = B^{|E|}`` and ``k`` sampled ratios.

    As with :func:`indsets.annealing.count_ik`, levels ``0..k-1`` are
    sampled, so ``k - 1 <= alpha * n`` suffices.
    """
    config = config or SamplerConfig()
    plan = AnnealingPlan(k, epsilon, c_anneal)
    if not 0 < B < 1:
        raise PreconditionError(f"need 0 < B < 1, got {B}")
    if k > G.n or (k > 1 and k - 1 > alpha * G.n * (1 + 1e-12)):
        raise PreconditionError(f"k={k} needs k <= n and k-1 <= alpha*n={alpha * G.n:g}")
    log_est = G.num_edges * math.log(B)
    levels: list[float] = []
    dmax = G.max_degree
    sampler = sampler or IsingSampler(B, config.c_mix)
    for j in range(k):
        if j == 0:
            t = float(flip_weight(G, SpinAssignment.all_minus(G.n), B))
        else:
            total = 0.0
            for cfg in level_configs(config, j, plan):
                sigma, _ = sample_fixed_magnetization(G, j, alpha, B, lambda_max, cfg, sampler)
                total += flip_weight(G, sigma, B)
            t = total / plan.m / (j + 1)
        lo = (G.n - j) * B**dmax / (j + 1)
        hi = (G.n - j) * B**-dmax / (j + 1)
        if not lo * (1 - 1e-9) <= t <= hi * (1 + 1e-9):
            raise InconsistencyError(f"level {j} ratio {t} outside [{lo}, {hi}]")
        levels.append(t)
        log_est += math.log(t)
    return CountEstimate(k, log_est, levels, guarantee_valid=False)
