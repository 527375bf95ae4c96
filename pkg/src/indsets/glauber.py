"""Glauber dynamics for the hard-core model.

Chains run inside numba-compiled kernels. Every chain owns a splitmix64
counter stream whose starting point is a hash of (batch key, chain index),
so a batch is reproducible from one key and any single chain of it can be
replayed on its own. Batch keys come from ``numpy.random.SeedSequence``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .errors import PreconditionError
from .graph import Graph
from .thresholds import lambda_c

log = logging.getLogger(__name__)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_LO32 = np.uint64(0xFFFFFFFF)


@njit(inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(inline="always")
def _chain_seed(key, j):
    return _mix(key ^ _mix(np.uint64(j) * _GOLDEN + _GOLDEN))


@njit(cache=True)
def _advance(indptr, indices, occ, blocked, size, thresh, steps, state):
    # One step: a 64-bit draw; the high word picks the vertex, the low word
    # is the Bernoulli(lam/(1+lam)) coin deciding insert versus delete.
    n = np.uint64(occ.shape[0])
    for _ in range(steps):
        state += _GOLDEN
        z = _mix(state)
        v = ((z >> _S32) * n) >> _S32
        if (z & _LO32) < thresh:
            if occ[v] == 0 and blocked[v] == 0:
                occ[v] = 1
                size += 1
                for p in range(indptr[v], indptr[v + 1]):
                    blocked[indices[p]] += 1
        elif occ[v] == 1:
            occ[v] = 0
            size -= 1
            for p in range(indptr[v], indptr[v + 1]):
                blocked[indices[p]] -= 1
    return state, size


@njit(cache=True)
def _trajectory(indptr, indices, occ, blocked, size, thresh, steps, state, codes):
    # Same as _advance but records the bitmask code of every visited state.
    n = occ.shape[0]
    for t in range(steps):
        state, size = _advance(indptr, indices, occ, blocked, size, thresh, 1, state)
        code = 0
        for v in range(n):
            if occ[v]:
                code |= 1 << v
        codes[t] = code
    return state, size


@njit(inline="always")
def _advance_bits(nmask, cur, thresh, steps, state):
    # Bitmask twin of _advance for n <= 64; consumes the stream identically.
    # Branch-free: the coin is a fair-ish random bit, so branches mispredict.
    n = np.uint64(nmask.shape[0])
    one = np.uint64(1)
    for _ in range(steps):
        state += _GOLDEN
        z = _mix(state)
        v = ((z >> _S32) * n) >> _S32
        bit = one << v
        coin = np.uint64((z & _LO32) < thresh)
        free = np.uint64((cur & nmask[v]) == 0)
        cur = (cur | (bit * (coin & free))) & ~(bit * (one - coin))
    return state, cur


def _batch_sizes_py(indptr, indices, nmask, n, thresh, steps, key, sizes):
    for j in prange(sizes.shape[0]):
        if n <= 64:
            _, cur = _advance_bits(nmask, np.uint64(0), thresh, steps, _chain_seed(key, j))
            size = 0
            while cur:
                cur &= cur - np.uint64(1)
                size += 1
        else:
            occ = np.zeros(n, np.uint8)
            blocked = np.zeros(n, np.int32)
            _, size = _advance(indptr, indices, occ, blocked, 0, thresh, steps,
                               _chain_seed(key, j))
        sizes[j] = size


_batch_sizes_serial = njit(cache=True)(_batch_sizes_py)
_batch_sizes_parallel = None


def _parallel_kernel():
    # Compiled on first use so single-threaded runs never touch the
    # threading layer.
    global _batch_sizes_parallel
    if _batch_sizes_parallel is None:
        _batch_sizes_parallel = njit(cache=True, parallel=True)(_batch_sizes_py)
    return _batch_sizes_parallel


_threads = numba.config.NUMBA_NUM_THREADS


def set_threads(count: int) -> None:
    """Worker count for batch sampling; 1 keeps everything on the caller's thread."""
    global _threads
    _threads = max(1, min(int(count), numba.config.NUMBA_NUM_THREADS))
    if _threads > 1:
        numba.set_num_threads(_threads)


def get_threads() -> int:
    return _threads


@njit(cache=True)
def _replay_chain(indptr, indices, n, thresh, steps, key, j):
    occ = np.zeros(n, np.uint8)
    blocked = np.zeros(n, np.int32)
    _advance(indptr, indices, occ, blocked, 0, thresh, steps, _chain_seed(key, j))
    return occ


def coin_threshold(lam: float) -> np.uint64:
    """32-bit threshold t with Pr(low word < t) = lam/(1+lam) up to 2**-32."""
    if lam < 0:
        raise PreconditionError("fugacity must be non-negative")
    return np.uint64(math.floor(lam / (1.0 + lam) * 2.0**32))


def seed_words(seed, count: int = 1) -> np.ndarray:
    """``count`` 64-bit keys derived from an int seed or a SeedSequence."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.generate_state(count, np.uint64)


def has_mixing_guarantee(G: Graph, lam: float) -> bool:
    """Whether ``lam`` is below the uniqueness threshold for G's maximum degree."""
    if G.max_degree <= 2:
        return True
    return lam < lambda_c(G.max_degree)


@dataclass(frozen=True)
class MixingSchedule:
    """Burn-in length ceil(c_mix * n * ln(n/eps)) for an eps-approximate sample."""

    c_mix: float = 2.0

    def steps(self, n: int, eps: float) -> int:
        if n == 0:
            return 0
        if not eps > 0:
            raise PreconditionError("epsilon must be positive")
        return max(1, math.ceil(self.c_mix * n * math.log(n / eps)))


class ChainState:
    """A single Glauber chain: current independent set plus its RNG stream."""

    def __init__(self, G: Graph, seed=0, chain: int = 0):
        self.graph = G
        self.occ = np.zeros(G.n, np.uint8)
        # blocked[v] = number of neighbours of v in the current set
        self.blocked = np.zeros(G.n, np.int32)
        self.size = 0
        self.rng_state = np.uint64(_chain_seed(seed_words(seed)[0], chain))
        self.steps_taken = 0

    @property
    def current(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.occ).tolist())

    def run(self, lam: float, steps: int) -> ChainState:
        G = self.graph
        if G.n == 0 or steps <= 0:
            self.steps_taken += max(steps, 0)
            return self
        self.rng_state, self.size = _advance(
            G.indptr, G.indices, self.occ, self.blocked, self.size,
            coin_threshold(lam), steps, np.uint64(self.rng_state),
        )
        self.steps_taken += steps
        return self

    def trajectory(self, lam: float, steps: int) -> np.ndarray:
        """Advance ``steps`` steps and return the bitmask of each visited state."""
        G = self.graph
        if G.n > 62:
            raise PreconditionError("trajectory codes need n <= 62")
        codes = np.zeros(steps, np.int64)
        self.rng_state, self.size = _trajectory(
            G.indptr, G.indices, self.occ, self.blocked, self.size,
            coin_threshold(lam), steps, np.uint64(self.rng_state), codes,
        )
        self.steps_taken += steps
        return codes

    def audit(self) -> bool:
        """Recompute the bookkeeping from scratch and compare."""
        G = self.graph
        members = np.flatnonzero(self.occ)
        expect = np.zeros(G.n, np.int32)
        for v in members:
            for u in G.adj[v]:
                expect[u] += 1
        return (
            int(self.occ.sum()) == self.size
            and np.array_equal(expect, self.blocked)
            and not np.any(self.blocked[members])
        )


def glauber_step(state: ChainState, G: Graph, lam: float) -> ChainState:
    """One Glauber update of ``state`` in place."""
    if state.graph is not G and state.graph != G:
        raise PreconditionError("chain state belongs to a different graph")
    return state.run(lam, 1)


class HardcoreDraw:
    """Sizes of a batch of samples plus lazy access to any sample's set."""

    def __init__(self, sizes: np.ndarray, getter: Callable[[int], frozenset[int]]):
        self.sizes = sizes
        self._getter = getter

    def __len__(self):
        return len(self.sizes)

    def state(self, j: int) -> frozenset[int]:
        return self._getter(j)

    def sets(self) -> list[frozenset[int]]:
        return [self._getter(j) for j in range(len(self.sizes))]


class GlauberSampler:
    """Approximate hard-core sampler: run each chain from the empty set for
    the mixing schedule's number of steps."""

    def __init__(self, c_mix: float = 2.0):
        self.schedule = MixingSchedule(c_mix)

    def draw(self, G: Graph, lam: float, n_samples: int, eps: float, key) -> HardcoreDraw:
        if n_samples < 1:
            raise PreconditionError("need at least one sample")
        key = np.uint64(key)
        sizes = np.zeros(n_samples, np.int64)
        if G.n == 0:
            return HardcoreDraw(sizes, lambda j: frozenset())
        steps = self.schedule.steps(G.n, eps)
        thresh = coin_threshold(lam)
        kernel = _batch_sizes_serial
        if _threads > 1 and n_samples * steps > 1_000_000:
            kernel = _parallel_kernel()
        kernel(G.indptr, G.indices, G.mask_array, G.n, thresh, steps, key, sizes)

        def getter(j: int) -> frozenset[int]:
            occ = _replay_chain(G.indptr, G.indices, G.n, thresh, steps, key, j)
            return frozenset(np.flatnonzero(occ).tolist())

        return HardcoreDraw(sizes, getter)


def sample_batch(G: Graph, lam: float, epsilon: float, n_samples: int,
                 seed=0, c_mix: float = 2.0) -> list[frozenset[int]]:
    """``n_samples`` independent eps-approximate hard-core samples."""
    if not has_mixing_guarantee(G, lam):
        log.warning("lambda=%g is not below lambda_c(%d); no mixing guarantee", lam, G.max_degree)
    draw = GlauberSampler(c_mix).draw(G, lam, n_samples, epsilon, seed_words(seed)[0])
    return draw.sets()


def sample_hardcore(G: Graph, lam: float, epsilon: float, seed=0,
                    c_mix: float = 2.0) -> frozenset[int]:
    """One eps-approximate sample; identical to chain 0 of ``sample_batch``."""
    return sample_batch(G, lam, epsilon, 1, seed=seed, c_mix=c_mix)[0]
