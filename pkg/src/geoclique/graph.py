"""Bitset graphs and the combinatorial kernel.

Vertices are 0..n-1 and every adjacency row is a Python int used as a bitset.
Everything downstream (odd cycles, matchings, exact MIS) runs on this type.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence


def bits(mask: int):
    """Yield the set bits of mask, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class NotBipartite(Exception):
    """Raised when a graph expected to be bipartite has an odd cycle."""

    def __init__(self, cycle, message="graph is not bipartite"):
        super().__init__(f"{message}: odd cycle {list(cycle)}")
        self.cycle = tuple(cycle)


class CapExceeded(Exception):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    rows: tuple
    weights: tuple | None = None

    def __post_init__(self):
        assert len(self.rows) == self.n
        for v, row in enumerate(self.rows):
            assert not (row >> v) & 1, f"self-loop at {v}"
            assert row >> self.n == 0, f"row {v} out of range"
            for u in bits(row):
                assert (self.rows[u] >> v) & 1, f"asymmetric edge {v}-{u}"
        if self.weights is not None:
            assert len(self.weights) == self.n
            for w in self.weights:
                assert math.isfinite(w) and w >= 0, "weights must be finite and nonnegative"

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], weights=None) -> "Graph":
        rows = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows), None if weights is None else tuple(float(w) for w in weights))

    @classmethod
    def empty(cls, n: int = 0) -> "Graph":
        return cls(n, (0,) * n)

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return popcount(self.rows[v])

    def edges(self) -> list:
        return [(u, v) for u in range(self.n) for v in bits(self.rows[u] >> (u + 1) << (u + 1))]

    def num_edges(self) -> int:
        return sum(popcount(r) for r in self.rows) // 2

    def neighborhood(self, mask: int) -> int:
        """Open neighborhood N(S) of a vertex set, S itself excluded."""
        out = 0
        for v in bits(mask):
            out |= self.rows[v]
        return out & ~mask

    def closed_neighborhood(self, mask: int) -> int:
        out = mask
        for v in bits(mask):
            out |= self.rows[v]
        return out

    def is_independent(self, mask: int) -> bool:
        return all(not (self.rows[v] & mask) for v in bits(mask))

    def is_clique(self, mask: int) -> bool:
        return all((self.rows[v] | (1 << v)) & mask == mask for v in bits(mask))

    def weight(self, mask: int) -> float:
        if self.weights is None:
            return float(popcount(mask))
        return float(sum(self.weights[v] for v in bits(mask)))

    def with_weights(self, weights) -> "Graph":
        return Graph(self.n, self.rows, None if weights is None else tuple(float(w) for w in weights))


def complement(g: Graph) -> Graph:
    full = g.all_mask
    rows = tuple(full & ~row & ~(1 << v) for v, row in enumerate(g.rows))
    return Graph(g.n, rows, g.weights)


def induced(g: Graph, vertices: Iterable[int]) -> tuple[Graph, list]:
    """Induced subgraph on the given vertices, plus the new-to-old index map."""
    order = sorted(set(vertices))
    for v in order:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range")
    pos = {v: i for i, v in enumerate(order)}
    rows = []
    for v in order:
        r = 0
        for u in bits(g.rows[v]):
            if u in pos:
                r |= 1 << pos[u]
        rows.append(r)
    w = None if g.weights is None else tuple(g.weights[v] for v in order)
    return Graph(len(order), tuple(rows), w), order


def induced_mask(g: Graph, mask: int) -> tuple[Graph, list]:
    return induced(g, bits(mask))


def lift(mask: int, index_map: Sequence[int]) -> int:
    """Translate a mask over an induced subgraph back to the parent graph."""
    return to_mask(index_map[v] for v in bits(mask))


# -- bipartiteness and odd cycles --------------------------------------------

def _tree_cycle(parent, depth, u, w):
    # walk both endpoints up to their lowest common ancestor
    left, right = [u], [w]
    a, b = u, w
    while depth[a] > depth[b]:
        a = parent[a]
        left.append(a)
    while depth[b] > depth[a]:
        b = parent[b]
        right.append(b)
    while a != b:
        a, b = parent[a], parent[b]
        left.append(a)
        right.append(b)
    right.pop()
    return left[::-1] + right


def two_color(g: Graph, mask: int | None = None) -> list:
    """Proper 2-coloring of g (restricted to mask); raises NotBipartite.

    Vertices outside mask get color -1. The exception carries an odd cycle
    built from the BFS tree and the offending edge.
    """
    if mask is None:
        mask = g.all_mask
    color = [-1] * g.n
    parent = [-1] * g.n
    depth = [0] * g.n
    for s in bits(mask):
        if color[s] != -1:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for u in bits(g.rows[v] & mask):
                if color[u] == -1:
                    color[u] = 1 - color[v]
                    parent[u] = v
                    depth[u] = depth[v] + 1
                    queue.append(u)
                elif color[u] == color[v]:
                    raise NotBipartite(_tree_cycle(parent, depth, v, u))
    return color


def is_bipartite(g: Graph, mask: int | None = None) -> bool:
    try:
        two_color(g, mask)
    except NotBipartite:
        return False
    return True


def shortest_odd_cycle(g: Graph, mask: int | None = None):
    """A minimum-length odd cycle inside mask, or None if bipartite there.

    BFS from every vertex over the bipartite double cover: the first return
    to (s, odd) gives a shortest odd closed walk through s, and the global
    minimum over s is a chordless cycle.
    """
    if mask is None:
        mask = g.all_mask
    rows = g.rows
    best = None
    for s in bits(mask):
        limit = math.inf if best is None else len(best)
        frontiers = [1 << s]
        seen = [1 << s, 0]
        d = 0
        found = False
        while frontiers[-1] and d + 1 < limit:
            nxt = 0
            for v in bits(frontiers[-1]):
                nxt |= rows[v]
            nxt &= mask
            d += 1
            nxt &= ~seen[d & 1]
            seen[d & 1] |= nxt
            frontiers.append(nxt)
            if d & 1 and (nxt >> s) & 1:
                found = True
                break
        if not found:
            continue
        walk = [s]
        cur = s
        for k in range(d - 1, 0, -1):
            cur = next(bits(rows[cur] & frontiers[k]))
            walk.append(cur)
        best = walk
        if len(best) == 3:
            break
    if best is None:
        return None
    return tuple(best)


def odd_cycle_is_valid(g: Graph, cycle: Sequence[int], chordless: bool = False) -> bool:
    k = len(cycle)
    if k < 3 or k % 2 == 0 or len(set(cycle)) != k:
        return False
    for i in range(k):
        if not g.has_edge(cycle[i], cycle[(i + 1) % k]):
            return False
    if chordless:
        for i, j in combinations(range(k), 2):
            if (j - i) % k not in (1, k - 1) and g.has_edge(cycle[i], cycle[j]):
                return False
    return True


# -- matchings and bipartite MIS ---------------------------------------------

def hopcroft_karp(g: Graph, color: Sequence[int], mask: int | None = None) -> dict:
    """Maximum matching of a bipartite graph as a symmetric mate dict."""
    if mask is None:
        mask = to_mask(v for v in range(g.n) if color[v] in (0, 1))
    for v in bits(mask):
        if color[v] not in (0, 1):
            raise ValueError(f"vertex {v} has no color")
        for u in bits(g.rows[v] & mask):
            if color[u] == color[v]:
                raise ValueError(f"coloring not proper on edge ({v},{u})")
    left = [v for v in bits(mask) if color[v] == 0]
    adj = {v: list(bits(g.rows[v] & mask)) for v in left}
    mate: dict = {}
    inf = math.inf

    while True:
        dist = {}
        queue = deque()
        for v in left:
            if v not in mate:
                dist[v] = 0
                queue.append(v)
        found = inf
        while queue:
            v = queue.popleft()
            if dist[v] >= found:
                continue
            for u in adj[v]:
                w = mate.get(u)
                if w is None:
                    found = min(found, dist[v] + 1)
                elif w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        if found is inf:
            break

        for root in left:
            if root in mate:
                continue
            stack, iters, via = [root], [iter(adj[root])], []
            while stack:
                v = stack[-1]
                for u in iters[-1]:
                    w = mate.get(u)
                    if w is None:
                        if dist[v] + 1 == found:
                            via.append(u)
                            for a, b in zip(stack, via):
                                mate[a], mate[b] = b, a
                            stack = []
                            break
                    elif dist.get(w) == dist[v] + 1:
                        via.append(u)
                        stack.append(w)
                        iters.append(iter(adj[w]))
                        break
                else:
                    dist[v] = inf
                    stack.pop()
                    iters.pop()
                    if via:
                        via.pop()
    return mate


def _konig_mis(g: Graph, color, mask: int) -> int:
    mate = hopcroft_karp(g, color, mask)
    left = [v for v in bits(mask) if color[v] == 0]
    reached = 0
    queue = deque(v for v in left if v not in mate)
    for v in queue:
        reached |= 1 << v
    while queue:
        v = queue.popleft()
        for u in bits(g.rows[v] & mask):
            if (reached >> u) & 1 or mate.get(v) == u:
                continue
            reached |= 1 << u
            w = mate.get(u)
            if w is not None and not (reached >> w) & 1:
                reached |= 1 << w
                queue.append(w)
    left_mask = to_mask(left)
    right_mask = mask & ~left_mask
    return (left_mask & reached) | (right_mask & ~reached)


WEIGHT_SCALE = 10**6


def _max_flow_min_cut(n_nodes, arcs, source, sink):
    """Augmenting-path max-flow (shortest paths first).

    Returns the nodes still reachable from the source in the residual graph.
    """
    head = [[] for _ in range(n_nodes)]
    to, cap = [], []
    for a, b, c in arcs:
        head[a].append(len(to))
        to.append(b)
        cap.append(c)
        head[b].append(len(to))
        to.append(a)
        cap.append(0)
    while True:
        via = [-1] * n_nodes
        via[source] = -2
        queue = deque([source])
        while queue and via[sink] == -1:
            v = queue.popleft()
            for e in head[v]:
                if cap[e] > 0 and via[to[e]] == -1:
                    via[to[e]] = e
                    queue.append(to[e])
        if via[sink] == -1:
            return {v for v in range(n_nodes) if via[v] != -1}
        f = math.inf
        v = sink
        while v != source:
            e = via[v]
            f = min(f, cap[e])
            v = to[e ^ 1]
        v = sink
        while v != source:
            e = via[v]
            cap[e] -= f
            cap[e ^ 1] += f
            v = to[e ^ 1]


def _weighted_mis(g: Graph, color, mask: int, weights) -> int:
    verts = list(bits(mask))
    idx = {v: i + 2 for i, v in enumerate(verts)}
    big = WEIGHT_SCALE * (sum(weights[v] for v in verts) + 1) * 4
    arcs = []
    for v in verts:
        w = int(round(weights[v] * WEIGHT_SCALE))
        if color[v] == 0:
            arcs.append((0, idx[v], w))
            for u in bits(g.rows[v] & mask):
                arcs.append((idx[v], idx[u], big))
        else:
            arcs.append((idx[v], 1, w))
    reach = _max_flow_min_cut(len(verts) + 2, arcs, 0, 1)
    out = 0
    for v in verts:
        inside = idx[v] in reach
        if (color[v] == 0) == inside:
            out |= 1 << v
    return out


def mis_bipartite(g: Graph, weights=None, mask: int | None = None) -> int:
    """Maximum (weight) independent set of a bipartite graph, as a mask.

    Raises NotBipartite with an odd cycle if g[mask] has one.
    """
    if mask is None:
        mask = g.all_mask
    if weights is None:
        weights = g.weights
    color = two_color(g, mask)
    if weights is None:
        return _konig_mis(g, color, mask)
    return _weighted_mis(g, color, mask, weights)


# -- exact oracle ------------------------------------------------------------

def brute_force(g: Graph, objective: str = "mis", weights=None, cap: int = 24) -> int:
    """Exact maximum independent set or clique by branch and bound."""
    if objective not in ("mis", "clique"):
        raise ValueError(f"unknown objective {objective!r}")
    if g.n > cap:
        raise CapExceeded(f"n={g.n} exceeds brute-force cap {cap}")
    h = complement(g) if objective == "clique" else g
    if weights is None:
        weights = g.weights
    return _exact_mis(h, h.all_mask, weights)


def _exact_mis(g: Graph, mask: int, weights=None) -> int:
    rows = g.rows
    if weights is None:
        def value(m):
            return popcount(m)
    else:
        def value(m):
            return sum(weights[v] for v in bits(m))
    best = [0, -1.0]

    def rec(cand, chosen, val):
        if not cand:
            if val > best[1]:
                best[0], best[1] = chosen, val
            return
        if val + value(cand) <= best[1]:
            return
        v = (cand & -cand).bit_length() - 1
        # isolated vertices are always taken
        if popcount(rows[v] & cand) == 0:
            rec(cand & ~(1 << v), chosen | 1 << v, val + value(1 << v))
            return
        rec(cand & ~rows[v] & ~(1 << v), chosen | 1 << v, val + value(1 << v))
        rec(cand & ~(1 << v), chosen, val)

    rec(mask, 0, 0.0)
    return best[0]


def bfs_layers(g: Graph, seed: int, mask: int | None = None) -> tuple[list, int]:
    """Distance layers L_1..L_lambda around the seed mask, and the unreached rest."""
    if not seed:
        raise ValueError("empty seed set")
    if mask is None:
        mask = g.all_mask
    seen = seed
    frontier = seed
    layers = []
    while True:
        nxt = 0
        for v in bits(frontier):
            nxt |= g.rows[v]
        nxt &= mask & ~seen
        if not nxt:
            break
        layers.append(nxt)
        seen |= nxt
        frontier = nxt
    return layers, mask & ~seen


# -- serialization -------------------------------------------------------------

def graph_to_json(g: Graph) -> str:
    obj = {"n": g.n, "edges": [list(e) for e in g.edges()]}
    if g.weights is not None:
        obj["weights"] = list(g.weights)
    return json.dumps(obj)


def graph_from_json(text) -> Graph:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode()
    obj = json.loads(text) if isinstance(text, str) else text
    if not isinstance(obj, dict):
        raise ValueError("graph JSON: top level must be an object")
    n = obj.get("n")
    if not isinstance(n, int) or n < 0:
        raise ValueError("graph JSON: field 'n' must be a nonnegative integer")
    edges = obj.get("edges", [])
    if not isinstance(edges, list):
        raise ValueError("graph JSON: field 'edges' must be a list")
    for k, e in enumerate(edges):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) for x in e)):
            raise ValueError(f"graph JSON: edges[{k}] must be a pair of integers")
    weights = obj.get("weights")
    if weights is not None:
        if not isinstance(weights, list) or len(weights) != n:
            raise ValueError("graph JSON: field 'weights' must be a list of length n")
        for k, w in enumerate(weights):
            if not isinstance(w, (int, float)) or not math.isfinite(w) or w < 0:
                raise ValueError(f"graph JSON: weights[{k}] must be finite and >= 0")
    try:
        return Graph.from_edges(n, edges, weights)
    except (ValueError, AssertionError) as exc:
        raise ValueError(f"graph JSON: {exc}") from None


def graph_to_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.num_edges()}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def graph_from_dimacs(text: str) -> Graph:
    n = None
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) != 4:
                raise ValueError(f"DIMACS line {lineno}: bad problem line")
            n = int(parts[2])
        elif parts[0] == "e":
            if n is None or len(parts) != 3:
                raise ValueError(f"DIMACS line {lineno}: bad edge line")
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        else:
            raise ValueError(f"DIMACS line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise ValueError("DIMACS: missing problem line")
    return Graph.from_edges(n, edges)
