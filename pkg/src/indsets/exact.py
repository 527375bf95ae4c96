"""Exact brute-force ground truth for the hard-core model on small graphs.

Everything here is deterministic and uses arbitrary-precision integers for
polynomial coefficients. Evaluation at a ``Fraction`` fugacity stays exact;
evaluation at a float runs in the log domain so large coefficients never
overflow.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError, ResourceLimitError
from .graph import Graph

EXACT_LIMIT = 40
BRUTE_FORCE_LIMIT = 22


@dataclass(frozen=True)
class IndependencePolynomial:
    """Coefficients ``(i_0, ..., i_M)``; ``i_k`` counts independent sets of size k."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[0] != 1:
            raise ValueError("an independence polynomial starts with i_0 = 1")

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __mul__(self, other: IndependencePolynomial) -> IndependencePolynomial:
        return IndependencePolynomial(convolve(self.coeffs, other.coeffs))

    @property
    def degree(self) -> int:
        """Independence number of the underlying graph."""
        return len(self.coeffs) - 1

    @property
    def n(self) -> int:
        """Vertex count, recovered from ``i_1``."""
        return self.coeffs[1] if len(self.coeffs) > 1 else 0

    def coefficient(self, k: int) -> int:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, lam):
        return evaluate_partition(self, lam)


# -- polynomial arithmetic ----------------------------------------------------

def _convolve_schoolbook(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _convolve_kronecker(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    # Pack each sequence into one big integer at base 2**(8*width), multiply,
    # unpack. width must hold the largest product coefficient, which is at
    # most sum(a) * sum(b) for non-negative inputs.
    bound = sum(a) * sum(b)
    width = max(1, (bound.bit_length() + 8) // 8)
    pa = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in a), "little")
    pb = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in b), "little")
    count = len(a) + len(b) - 1
    raw = (pa * pb).to_bytes(width * count, "little")
    return tuple(
        int.from_bytes(raw[i * width:(i + 1) * width], "little") for i in range(count)
    )


def convolve(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Product of two polynomials with non-negative integer coefficients."""
    if not a or not b:
        return ()
    if min(len(a), len(b)) <= 8:
        return _convolve_schoolbook(a, b)
    return _convolve_kronecker(a, b)


def poly_power(P: IndependencePolynomial, r: int) -> IndependencePolynomial:
    """``P**r`` by binary exponentiation; the polynomial of ``r`` disjoint copies."""
    if r < 1:
        raise PreconditionError(f"power must be a positive integer, got {r}")
    result: tuple[int, ...] = (1,)
    base = P.coeffs
    while r:
        if r & 1:
            result = convolve(result, base)
        r >>= 1
        if r:
            base = convolve(base, base)
    return IndependencePolynomial(result)


# -- independence polynomial --------------------------------------------------

def _component(mask: int, masks: Sequence[int]) -> int:
    comp = mask & -mask
    frontier = comp
    while frontier:
        reach = 0
        f = frontier
        while f:
            low = f & -f
            reach |= masks[low.bit_length() - 1]
            f ^= low
        frontier = reach & mask & ~comp
        comp |= frontier
    return comp


def _poly(mask: int, masks: Sequence[int], memo: dict) -> tuple[int, ...]:
    if mask == 0:
        return (1,)
    hit = memo.get(mask)
    if hit is not None:
        return hit
    comp = _component(mask, masks)
    if comp != mask:
        out = convolve(_poly(comp, masks, memo), _poly(mask & ~comp, masks, memo))
    else:
        # Branch on a vertex of maximum degree inside the component.
        best, best_deg = -1, -1
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            d = (masks[v] & mask).bit_count()
            if d > best_deg:
                best, best_deg = v, d
            m ^= low
        rest = mask & ~(1 << best)
        without = _poly(rest, masks, memo)
        with_v = _poly(rest & ~masks[best], masks, memo)
        size = max(len(without), len(with_v) + 1)
        out_list = [0] * size
        for i, c in enumerate(without):
            out_list[i] += c
        for i, c in enumerate(with_v):
            out_list[i + 1] += c
        out = tuple(out_list)
    memo[mask] = out
    return out


def independence_polynomial(G: Graph, limit: int = EXACT_LIMIT) -> IndependencePolynomial:
    """Exact independence polynomial by include/exclude branching that splits
    into connected components whenever the remaining graph falls apart."""
    if G.n > limit:
        raise ResourceLimitError(f"exact oracle limited to n <= {limit}, got n={G.n}")
    return IndependencePolynomial(_poly((1 << G.n) - 1, G.masks, {}))


def independence_polynomial_bruteforce(G: Graph) -> IndependencePolynomial:
    """Count independent sets by testing all ``2**n`` subsets."""
    if G.n > BRUTE_FORCE_LIMIT:
        raise ResourceLimitError(f"subset enumeration limited to n <= {BRUTE_FORCE_LIMIT}")
    codes = np.arange(1 << G.n, dtype=np.int64)
    ok = np.ones(codes.shape, dtype=bool)
    for v, mv in enumerate(G.masks):
        ok &= ((codes >> v) & 1 == 0) | (codes & mv == 0)
    sizes = np.bitwise_count(codes[ok]) if hasattr(np, "bitwise_count") else np.array(
        [int(c).bit_count() for c in codes[ok]]
    )
    counts = np.bincount(sizes)
    return IndependencePolynomial(tuple(int(c) for c in counts))


def independent_sets(G: Graph, k: int | None = None) -> Iterator[frozenset[int]]:
    """Yield every independent set (of size ``k`` when given) in a fixed order."""

    def rec(v: int, chosen: list[int], blocked: int):
        if k is not None and len(chosen) == k:
            yield frozenset(chosen)
            return
        if v == G.n:
            if k is None:
                yield frozenset(chosen)
            return
        if k is not None and len(chosen) + (G.n - v) < k:
            return
        yield from rec(v + 1, chosen, blocked)
        if not blocked >> v & 1:
            chosen.append(v)
            yield from rec(v + 1, chosen, blocked | G.masks[v])
            chosen.pop()

    if G.masks is None:
        raise ResourceLimitError("set enumeration needs the bitmask adjacency view")
    yield from rec(0, [], 0)


# -- distributions -------------------------------------------------------------

def _as_poly(G_or_P, limit: int = EXACT_LIMIT) -> IndependencePolynomial:
    if isinstance(G_or_P, IndependencePolynomial):
        return G_or_P
    return independence_polynomial(G_or_P, limit)


def _weights(coeffs: Sequence[int], lam):
    """Unnormalised weights c_k lam^k, rescaled in the log domain for floats."""
    if isinstance(lam, (int, Fraction)):
        lam = Fraction(lam)
        return [c * lam**k for k, c in enumerate(coeffs)]
    lam = float(lam)
    if lam == 0.0:
        return [1.0] + [0.0] * (len(coeffs) - 1)
    logs = [math.log(c) + k * math.log(lam) if c else -math.inf for k, c in enumerate(coeffs)]
    top = max(logs)
    return [math.exp(x - top) for x in logs]


def evaluate_partition(P: IndependencePolynomial, lam, log: bool = False):
    """``Z(lam)``; with ``log=True`` returns ``ln Z(lam)`` without overflow."""
    if lam < 0:
        raise PreconditionError("fugacity must be non-negative")
    if isinstance(lam, (int, Fraction)) and not log:
        z = Fraction(0)
        for c in reversed(P.coeffs):
            z = z * lam + c
        return z
    lam = float(lam)
    if lam == 0.0:
        return 0.0 if log else 1.0
    logs = [math.log(c) + k * math.log(lam) for k, c in enumerate(P.coeffs) if c]
    top = max(logs)
    total = top + math.log(math.fsum(math.exp(x - top) for x in logs))
    return total if log else math.exp(total)


@dataclass(frozen=True)
class SizeDistribution:
    lam: float | Fraction
    probabilities: tuple
    mean: float | Fraction
    variance: float | Fraction


def size_distribution(G_or_P, lam, limit: int = EXACT_LIMIT) -> SizeDistribution:
    """Law of ``|I|`` under the hard-core measure at fugacity ``lam``."""
    if lam < 0:
        raise PreconditionError("fugacity must be non-negative")
    P = _as_poly(G_or_P, limit)
    w = _weights(P.coeffs, lam)
    if isinstance(w[0], Fraction):
        z = sum(w)
        probs = tuple(x / z for x in w)
        mean = sum(k * p for k, p in enumerate(probs))
        var = sum((k - mean) ** 2 * p for k, p in enumerate(probs))
    else:
        z = math.fsum(w)
        probs = tuple(x / z for x in w)
        mean = math.fsum(k * p for k, p in enumerate(probs))
        var = math.fsum((k - mean) ** 2 * p for k, p in enumerate(probs))
    return SizeDistribution(lam, probs, mean, var)


def exact_occupancy(G_or_P, lam, limit: int = EXACT_LIMIT):
    """Expected density ``E|I| / n`` of the hard-core model."""
    P = _as_poly(G_or_P, limit)
    if P.n < 1:
        raise PreconditionError("occupancy needs at least one vertex")
    return size_distribution(P, lam).mean / P.n


def exact_variance(G_or_P, lam, limit: int = EXACT_LIMIT):
    return size_distribution(_as_poly(G_or_P, limit), lam).variance


def hardcore_distribution(G: Graph, lam) -> dict[frozenset[int], float]:
    """Exact hard-core probabilities of every independent set."""
    sets = list(independent_sets(G))
    if isinstance(lam, (int, Fraction)):
        w = [Fraction(lam) ** len(s) for s in sets]
        z = sum(w)
    else:
        w = [float(lam) ** len(s) for s in sets]
        z = math.fsum(w)
    return {s: x / z for s, x in zip(sets, w)}


def exact_free_volume(G: Graph, j: int) -> Fraction:
    """Mean of ``|V - (J + N(J))|`` over all independent ``J`` of size ``j``."""
    total = count = 0
    full = (1 << G.n) - 1
    for J in independent_sets(G, j):
        covered = 0
        for v in J:
            covered |= (1 << v) | G.masks[v]
        total += (full & ~covered).bit_count()
        count += 1
    if count == 0:
        raise PreconditionError(f"graph has no independent set of size {j}")
    return Fraction(total, count)


# -- distances -------------------------------------------------------------------

def exact_tv_distance(p, q) -> float:
    """Half the L1 distance between two distributions on the same support.

    Accepts two equal-length sequences or two mappings with identical keys.
    """
    if isinstance(p, Mapping) or isinstance(q, Mapping):
        if not (isinstance(p, Mapping) and isinstance(q, Mapping)) or set(p) != set(q):
            raise ValueError("distributions have mismatched supports")
        return 0.5 * math.fsum(abs(float(p[x]) - float(q[x])) for x in p)
    if len(p) != len(q):
        raise ValueError("distributions have mismatched supports")
    return 0.5 * math.fsum(abs(float(a) - float(b)) for a, b in zip(p, q))


def empirical_distribution(samples, support) -> dict:
    """Relative frequencies over ``support``; raises if a sample falls outside it."""
    counts = dict.fromkeys(support, 0)
    total = 0
    for s in samples:
        if s not in counts:
            raise ValueError(f"sample {s!r} outside the declared support")
        counts[s] += 1
        total += 1
    if total == 0:
        raise ValueError("no samples")
    return {x: c / total for x, c in counts.items()}


class ExactHardcoreSampler:
    """Draws exact hard-core samples by enumeration; a drop-in for the
    Glauber sampler on small graphs, used to isolate Markov chain error."""

    def __init__(self):
        self._cache: dict[Graph, list[frozenset[int]]] = {}

    def _sets(self, G: Graph) -> list[frozenset[int]]:
        if G not in self._cache:
            self._cache[G] = list(independent_sets(G))
        return self._cache[G]

    def draw(self, G: Graph, lam: float, n_samples: int, eps: float, key):
        from .glauber import HardcoreDraw

        sets = self._sets(G)
        w = np.array([float(lam) ** len(s) for s in sets])
        rng = np.random.default_rng(int(key))
        idx = rng.choice(len(sets), size=n_samples, p=w / w.sum())
        chosen = [sets[i] for i in idx]
        sizes = np.array([len(s) for s in chosen], dtype=np.int64)
        return HardcoreDraw(sizes, chosen.__getitem__)
