"""Seeded corpora and independent oracles shared by the test modules."""

import random
from itertools import combinations

import numpy as np

from geoclique.geom import GeneratorSpec, generate_instance
from geoclique.graph import Graph


def random_graph(rng, n, p=None):
    if p is None:
        p = rng.random()
    return Graph.from_edges(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])


def random_bipartite(rng, n, p=None):
    if p is None:
        p = rng.random()
    side = [rng.randint(0, 1) for _ in range(n)]
    edges = [(u, v) for u, v in combinations(range(n), 2) if side[u] != side[v] and rng.random() < p]
    return Graph.from_edges(n, edges)


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def disjoint_cycles(*lengths):
    edges, off = [], 0
    for k in lengths:
        edges += [(off + i, off + (i + 1) % k) for i in range(k)]
        off += k
    return Graph.from_edges(off, edges)


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def disk_instance(seed, n_lo=1, n_hi=12):
    """Random disks with the box scaled to n so graphs range from sparse to dense."""
    r = random.Random(seed)
    n = r.randint(n_lo, n_hi)
    box = r.uniform(2.0, 2.0 + 1.2 * n)
    spec = GeneratorSpec("disks", n, dim=2, box=(0.0, box), radius=(0.5, 1.5))
    return generate_instance(spec, seed)


def unit_ball_instance(seed, n_lo=1, n_hi=12):
    r = random.Random(seed)
    n = r.randint(n_lo, n_hi)
    box = r.uniform(2.0, 2.0 + 0.5 * n)
    return generate_instance(GeneratorSpec("unit_balls", n, dim=3, box=(0.0, box)), seed)


# -- oracles written independently of the package ------------------------------------

def naive_alpha(g, weights=None):
    best = 0
    for k in range(g.n + 1):
        for sub in combinations(range(g.n), k):
            if all(not g.has_edge(u, v) for u, v in combinations(sub, 2)):
                val = sum(weights[v] for v in sub) if weights else len(sub)
                best = max(best, val)
    return best


def naive_omega(g):
    best = 0
    for k in range(g.n + 1):
        for sub in combinations(range(g.n), k):
            if all(g.has_edge(u, v) for u, v in combinations(sub, 2)):
                best = k
    return best


def odd_girth(g):
    """Shortest odd closed walk length from adjacency powers; it is always a cycle."""
    if g.n == 0:
        return None
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges():
        a[u, v] = a[v, u] = 1
    a2 = (a @ a > 0).astype(np.int64)
    p = a.copy()
    for k in range(1, g.n + 1, 2):
        if np.trace(p) > 0:
            return k
        p = (p @ a2 > 0).astype(np.int64)
    return None


def max_matching_size(g):
    """Maximum matching by brute force over edge subsets, grown greedily with pruning."""
    edges = g.edges()
    best = 0

    def rec(k, used, size):
        nonlocal best
        best = max(best, size)
        if size + (len(edges) - k) <= best:
            return
        for j in range(k, len(edges)):
            u, v = edges[j]
            if not (used >> u) & 1 and not (used >> v) & 1:
                rec(j + 1, used | 1 << u | 1 << v, size + 1)

    rec(0, 0, 0)
    return best


def random_closed_chain(rng, k, spread=10.0):
    return [(rng.uniform(-spread, spread), rng.uniform(-spread, spread)) for _ in range(k)]


def random_odd_chain(rng, p, spread=1.0):
    return [[rng.uniform(-spread, spread) for _ in range(3)] for _ in range(p)]


def long_cycle_graph(rng, g, extra):
    """An odd cycle C_g with random bipartite blocks hung off cut vertices.

    Every odd cycle lies inside one block and only the cycle block is
    non-bipartite, so iocp <= 1 while the shortest odd cycle has length g.
    """
    edges = [(i, (i + 1) % g) for i in range(g)]
    side = {}
    n = g
    while n < g + extra:
        root = rng.randrange(n)
        k = rng.randint(1, 4)
        new = list(range(n, n + k))
        side[root] = 0
        for v in new:
            side[v] = rng.randint(0, 1)
        block = [root] + new
        for v in new:
            # keep each new vertex connected to the block with a bipartite edge
            opts = [u for u in block if u != v and side.get(u) != side[v] and (u == root or u < v)]
            if not opts:
                side[v] = 1
                opts = [root]
            edges.append((v, rng.choice(opts)))
        for a, b in combinations(block, 2):
            if side[a] != side[b] and (a, b) not in edges and (b, a) not in edges and rng.random() < 0.3:
                edges.append((a, b))
        n += k
    return Graph.from_edges(n, edges)


def four_vertex_graphs():
    """The 11 graphs on 4 vertices, one per isomorphism class."""
    from itertools import permutations
    pairs = list(combinations(range(4), 2))
    seen, out = set(), []
    for mask in range(64):
        es = [pairs[b] for b in range(6) if mask >> b & 1]
        key = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in es)) for p in permutations(range(4)))
        if key not in seen:
            seen.add(key)
            out.append(Graph.from_edges(4, es))
    return out


def gadget_corpus():
    rng = random.Random(1)
    out = four_vertex_graphs()
    for _ in range(50):
        out.append(random_graph(rng, rng.randint(1, 7)))
    return out


def starred_cycle(rng, g, stars):
    """Odd cycle C_g; some cycle vertices get a path ending in a large star.

    The stars make alpha large, so the heavy-vertex threshold delta*|I| exceeds
    the at most three I-neighbours a cycle vertex can have.
    """
    edges = [(i, (i + 1) % g) for i in range(g)]
    n = g
    for v in rng.sample(range(g), stars):
        prev = v
        for _ in range(rng.randint(1, 2)):
            edges.append((prev, n))
            prev, n = n, n + 1
        center = prev
        for _ in range(rng.randint(8, 16)):
            edges.append((center, n))
            n += 1
    return Graph.from_edges(n, edges)
