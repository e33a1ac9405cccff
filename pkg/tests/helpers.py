"""Graph and forest generators shared by the test modules."""

import itertools
import random

import numpy as np

from flashgraph.graph import from_edges


def random_edges(rng: random.Random, n: int, avg_degree: float, weights=None) -> list[tuple]:
    """Uniform random multigraph edges; ``weights=(lo, hi)`` appends integer weights."""
    if n == 0:
        return []
    m = int(round(avg_degree * n / 2))
    out = []
    for _ in range(m):
        u, v = rng.randrange(n), rng.randrange(n)
        out.append((u, v, rng.randint(*weights)) if weights else (u, v))
    return out


def random_graph(rng: random.Random, n: int, avg_degree: float, directed=False, weights=None):
    edges = random_edges(rng, n, avg_degree, weights)
    g = from_edges(n, edges, directed=directed, weight="weight" if weights else None)
    return g, edges


def rmat_edges(scale: int, m: int, seed: int, a=0.57, b=0.19, c=0.19) -> list[tuple[int, int]]:
    """Recursive-matrix edge sampler (Graph500 style quadrant probabilities)."""
    rng = np.random.default_rng(seed)
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    for bit in range(scale):
        r = rng.random(m)
        right = (r >= a) & (r < a + b) | (r >= a + b + c)
        down = r >= a + b
        src |= down.astype(np.int64) << bit
        dst |= right.astype(np.int64) << bit
    return list(zip(src.tolist(), dst.tolist()))


def all_simple_graphs(n: int):
    """Every simple undirected graph on ``n`` labelled vertices."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [p for i, p in enumerate(pairs) if mask >> i & 1]


def all_forests(n: int):
    """Every parent array on ``n`` vertices whose only cycles are root self-loops."""
    for parent in itertools.product(range(n), repeat=n):
        ok = True
        for v in range(n):
            x, seen = v, 0
            while parent[x] != x and seen <= n:
                x, seen = parent[x], seen + 1
            if seen > n:
                ok = False
                break
        if ok:
            yield list(parent)


def random_forest(rng: random.Random, n: int) -> list[int]:
    """Random parent array: each vertex points to itself or to a smaller-ranked vertex of a shuffled order."""
    order = list(range(n))
    rng.shuffle(order)
    parent = [0] * n
    for i, v in enumerate(order):
        parent[v] = v if i == 0 or rng.random() < 0.25 else order[rng.randrange(i)]
    return parent
