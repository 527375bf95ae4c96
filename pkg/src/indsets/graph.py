"""Immutable simple graphs, predicates, generators and edge-list I/O.

Vertices are the dense integers ``0..n-1``. Vertex sets are plain
``frozenset`` objects of vertex ids.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .errors import PreconditionError

# Graphs up to this size also carry a neighbour bitmask per vertex.
BITMASK_LIMIT = 128


class Graph:
    """A simple undirected graph with sorted adjacency lists.

    Instances are never mutated after construction. Use
    :func:`from_edge_list` or one of the generators to build one.
    """

    __slots__ = ("n", "adj", "max_degree", "masks", "mask_array", "indptr", "indices", "_m")

    def __init__(self, n: int, adj: Sequence[Sequence[int]]):
        self.n = n
        self.adj = tuple(tuple(sorted(nb)) for nb in adj)
        self.max_degree = max((len(nb) for nb in self.adj), default=0)
        self._m = sum(len(nb) for nb in self.adj) // 2
        if n <= BITMASK_LIMIT:
            self.masks = tuple(sum(1 << u for u in nb) for nb in self.adj)
        else:
            self.masks = None
        # CSR arrays consumed by the compiled Markov chain kernels.
        degs = np.fromiter((len(nb) for nb in self.adj), dtype=np.int64, count=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(degs, out=self.indptr[1:])
        self.indices = np.fromiter(
            (u for nb in self.adj for u in nb), dtype=np.int64, count=2 * self._m
        )
        # uint64 neighbour masks for the n <= 64 fast chain kernel
        if n <= 64:
            self.mask_array = np.array(self.masks, dtype=np.uint64)
        else:
            self.mask_array = np.zeros(0, dtype=np.uint64)
        self.mask_array.flags.writeable = False
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False

    @property
    def num_edges(self) -> int:
        return self._m

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    def degrees(self) -> list[int]:
        return [len(nb) for nb in self.adj]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self):
        return hash((self.n, self.adj))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges}, max_degree={self.max_degree})"


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph on ``n`` vertices; duplicate edges are stored once."""
    if n < 0:
        raise PreconditionError(f"vertex count must be non-negative, got {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise PreconditionError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise PreconditionError(f"self-loop at vertex {u}")
        nbrs[u].add(v)
        nbrs[v].add(u)
    return Graph(n, nbrs)


def empty_graph(n: int) -> Graph:
    return from_edge_list(n, [])


def is_independent(G: Graph, S: Iterable[int]) -> bool:
    S = set(S)
    if any(not 0 <= v < G.n for v in S):
        raise PreconditionError("vertex set is not contained in V(G)")
    return all(S.isdisjoint(G.adj[v]) for v in S)


def is_regular(G: Graph, d: int) -> bool:
    return all(len(nb) == d for nb in G.adj)


def is_triangle_free(G: Graph) -> bool:
    nbsets = [set(nb) for nb in G.adj]
    for u in range(G.n):
        for v in G.adj[u]:
            if v > u and not nbsets[u].isdisjoint(nbsets[v]):
                return False
    return True


def disjoint_union(*graphs: Graph) -> Graph:
    """Disjoint union; the first graph keeps its labels, later ones are shifted."""
    adj: list[list[int]] = []
    offset = 0
    for G in graphs:
        adj.extend([u + offset for u in nb] for nb in G.adj)
        offset += G.n
    return Graph(offset, adj)


def replicate(G: Graph, r: int) -> Graph:
    """``r`` disjoint copies of ``G``."""
    if r < 0:
        raise PreconditionError("replication count must be non-negative")
    adj = [[u + c * G.n for u in nb] for c in range(r) for nb in G.adj]
    return Graph(r * G.n, adj)


def clique(m: int) -> Graph:
    return from_edge_list(m, [(u, v) for u in range(m) for v in range(u + 1, m)])


def complete_bipartite(s: int, t: int) -> Graph:
    return from_edge_list(s + t, [(u, s + v) for u in range(s) for v in range(t)])


def path(m: int) -> Graph:
    return from_edge_list(m, [(i, i + 1) for i in range(m - 1)])


def cycle(m: int) -> Graph:
    if m < 3:
        raise PreconditionError("a simple cycle needs at least 3 vertices")
    return from_edge_list(m, [(i, (i + 1) % m) for i in range(m)])


def petersen() -> Graph:
    """Petersen graph: outer 5-cycle 0..4, spokes i -> i+5, inner pentagram."""
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return from_edge_list(10, outer + spokes + inner)


def gadget(a: int, b: int, delta: int) -> Graph:
    """``a`` copies of K_{delta,delta} followed by ``b`` copies of K_{delta+1}."""
    if a < 0 or b < 0 or a + b < 1:
        raise PreconditionError("need a, b >= 0 with a + b >= 1")
    if delta < 3:
        raise PreconditionError("gadgets are defined for delta >= 3")
    return disjoint_union(
        replicate(complete_bipartite(delta, delta), a),
        replicate(clique(delta + 1), b),
    )


def random_regular(n: int, d: int, seed=None, max_tries: int | None = None) -> Graph:
    """Uniform simple ``d``-regular graph from the pairing model.

    Any pairing with a loop or a repeated edge is discarded and the whole
    pairing is redrawn, so accepted graphs are exactly uniform.
    """
    if d < 0 or d >= n:
        raise PreconditionError(f"need 0 <= d < n, got d={d}, n={n}")
    if (n * d) % 2:
        raise PreconditionError(f"n*d must be even, got n={n}, d={d}")
    if max_tries is None:
        max_tries = max(1, 10 * n * d)
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_tries):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        u, v = pairs[:, 0], pairs[:, 1]
        if np.any(u == v):
            continue
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        if len(np.unique(lo * n + hi)) != len(lo):
            continue
        return from_edge_list(n, zip(lo.tolist(), hi.tolist()))
    raise RuntimeError(f"no simple {d}-regular graph on {n} vertices after {max_tries} pairings")


def random_bounded_degree(n: int, max_deg: int, p: float, seed=None) -> Graph:
    """Random graph: each pair is kept with probability ``p`` unless it would
    push an endpoint above ``max_deg``. Pairs are visited in random order."""
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    order = rng.permutation(len(pairs))
    keep = rng.random(len(pairs)) < p
    deg = [0] * n
    edges = []
    for i in order:
        if not keep[i]:
            continue
        u, v = pairs[i]
        if deg[u] < max_deg and deg[v] < max_deg:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    return from_edge_list(n, edges)


def greedy_independent_set(G: Graph, k: int) -> frozenset[int]:
    """First ``k`` vertices picked by the ascending-id greedy maximal independent set."""
    blocked = [False] * G.n
    chosen: list[int] = []
    for v in range(G.n):
        if len(chosen) == k:
            break
        if blocked[v]:
            continue
        chosen.append(v)
        blocked[v] = True
        for u in G.adj[v]:
            blocked[u] = True
    if len(chosen) < k:
        raise PreconditionError(
            f"greedy found only {len(chosen)} independent vertices, {k} requested"
        )
    return frozenset(chosen)


def greedy_bound(G: Graph) -> int:
    """Guaranteed greedy size ceil(n/(max_degree+1))."""
    return math.ceil(G.n / (G.max_degree + 1)) if G.n else 0


# -- edge-list text format --------------------------------------------------

def parse_edge_list(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``; ``#`` starts a comment."""
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise PreconditionError("edge list is empty")
    header = rows[0]
    if len(header) != 2:
        raise PreconditionError("first line must be 'n m'")
    n, m = int(header[0]), int(header[1])
    body = rows[1:]
    if len(body) != m:
        raise PreconditionError(f"header announces {m} edges, found {len(body)}")
    edges = []
    for row in body:
        if len(row) != 2:
            raise PreconditionError(f"bad edge line: {' '.join(row)}")
        edges.append((int(row[0]), int(row[1])))
    return from_edge_list(n, edges)


def format_edge_list(G: Graph) -> str:
    edges = G.edges()
    lines = [f"{G.n} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(G: Graph, path) -> None:
    Path(path).write_text(format_edge_list(G))
