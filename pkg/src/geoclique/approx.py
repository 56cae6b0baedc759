"""Maximum independent set on graphs with small induced odd cycle packing number.

The sampling EPTAS and its deterministic variant, the iocp=i
recursion, quasi-polynomial branching, odd cycle covers and the exact
subexponential solvers. Vertex sets are int bitmasks throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .graph import (
    CapExceeded,
    Graph,
    NotBipartite,
    _konig_mis,
    _weighted_mis,
    bfs_layers,
    bits,
    brute_force,
    induced_mask,
    lift,
    mis_bipartite,
    popcount,
    shortest_odd_cycle,
    to_mask,
    two_color,
)

ENUM_CAP = 24
T_MAX = 10**9


class IocpViolation(Exception):
    """A graph that must be bipartite under the iocp promise is not.

    `evidence` holds the odd cycle found and where it surfaced.
    """

    def __init__(self, message, evidence=None):
        super().__init__(message)
        self.evidence = evidence or {}


class ClaimViolation(IocpViolation):
    """The claimed 2-coloring of H'' - S^gamma is improper on an iocp <= 1 input."""


# -- parameters -----------------------------------------------------------------

@dataclass(frozen=True)
class EptasParams:
    eps: float
    beta: float
    d: int
    i: int
    mode: str
    c: int
    delta: float
    s: int
    t: int
    z: int
    layer_budget: int
    max_gamma: int
    s_override: int | None = None
    t_override: int | None = None

    def sample_size(self, n: int) -> int:
        if self.mode == "theory":
            return self.s
        if self.s_override is not None:
            return self.s_override
        x = math.ceil((2 * self.d / self.delta) * math.log(1 / self.delta))
        return max(0, min(x, math.floor(self.beta * n / 2), 8))

    def trials(self) -> int:
        if self.mode == "theory":
            return self.t
        return self.t_override if self.t_override is not None else 50


def _trials_formula(beta: float, s: int, t_max: int) -> int:
    q = (beta / 2) ** s
    if q >= 1:
        return 1
    den = math.log1p(-q)
    ratio = math.log(1e-10) / den if den else math.inf
    if not math.isfinite(ratio) or ratio >= t_max:
        return t_max
    return math.ceil(ratio)


def derive_params(eps: float, beta: float, d: int = 4, i: int = 1, mode: str = "practical",
                  s: int | None = None, t: int | None = None, t_max: int = T_MAX) -> EptasParams:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0,1), got {eps}")
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0,1], got {beta}")
    if d < 0 or int(d) != d:
        raise ValueError(f"d must be a nonnegative integer, got {d}")
    if i < 1:
        raise ValueError(f"i must be positive, got {i}")
    if mode not in ("theory", "practical", "deterministic"):
        raise ValueError(f"unknown mode {mode!r}")
    x = 1 / (beta * eps)
    c = math.ceil(8 * (x * x + x + 1) - 1e-9)
    delta = eps / c
    s_th = math.ceil((10 * d / delta) * math.log(1 / delta)) if d else 0
    t_th = _trials_formula(beta, s_th, t_max)
    if mode == "deterministic" and s is not None and s > 3:
        raise ValueError("deterministic mode enumerates all s-subsets; s is capped at 3")
    return EptasParams(eps, beta, int(d), i, mode, c, delta, s_th, t_th,
                       z=math.ceil(4 * x - 1e-9) + 2,
                       layer_budget=math.ceil(2 * x - 1e-9),
                       max_gamma=math.floor(2 * x + 1e-9),
                       s_override=s, t_override=t)


# -- results ----------------------------------------------------------------------

@dataclass
class SolveResult:
    mask: int
    value: float
    objective: str = "mis"
    trials: int = 0
    paths: dict = field(default_factory=lambda: {"bipartite": 0, "short": 0, "long": 0})
    seed: int | None = None
    certificates: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def vertices(self) -> list:
        return list(bits(self.mask))

    def to_json(self) -> dict:
        value = self.value
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        out = {"value": value, "set": self.vertices, "trials": self.trials,
               "paths": dict(self.paths), "seed": self.seed}
        if self.objective != "mis":
            out["objective"] = self.objective
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def _value(g: Graph, mask: int, weights) -> float:
    if weights is None:
        return popcount(mask)
    return float(sum(weights[v] for v in bits(mask)))


def _finish(g: Graph, mask: int, weights, **kw) -> SolveResult:
    if not g.is_independent(mask):
        raise AssertionError(f"solver produced a non-independent set {list(bits(mask))}")
    return SolveResult(mask, _value(g, mask, weights), **kw)


def _weights(g: Graph, weights):
    return g.weights if weights is None else weights


def _bip(g: Graph, mask: int, weights, where: str) -> int:
    try:
        return mis_bipartite(g, weights, mask)
    except NotBipartite as exc:
        raise IocpViolation(f"{where} is not bipartite",
                            {"where": where, "odd_cycle": list(exc.cycle)}) from None


def _colored_mis(g: Graph, color, mask: int, weights) -> int:
    if weights is None:
        return _konig_mis(g, color, mask)
    return _weighted_mis(g, color, mask, weights)


# -- layer decomposition --------------------------------------------------------------

@dataclass(frozen=True)
class LayerDecomposition:
    cycle: tuple  # v_1..v_g stored 0-based
    layers: tuple  # L_1..L_lambda as masks
    label: dict  # vertex -> 1-based index j of its stratum S_j
    unreached: int
    light_layer: int  # i*, 1-based; may exceed lambda (an empty layer)
    blocks: tuple  # S^gamma masks over the cycle and layers before i*, gamma = 0, 1, ...
    candidate_blocks: tuple  # gammas eligible for removal
    light_block: int
    z: int

    @property
    def g(self) -> int:
        return len(self.cycle)

    @property
    def lam(self) -> int:
        return len(self.layers)

    def stratum(self, k: int, j: int) -> int:
        """L_k^j; k = 0 denotes the cycle itself."""
        base = to_mask(self.cycle) if k == 0 else self.layers[k - 1]
        return to_mask(v for v in bits(base) if self.label[v] == j)

    def layer(self, k: int) -> int:
        return self.layers[k - 1] if 1 <= k <= len(self.layers) else 0

    def near(self) -> int:
        """Vertex set of H'': the cycle and the layers before i*."""
        m = to_mask(self.cycle)
        for k in range(1, min(self.light_layer, len(self.layers) + 1)):
            m |= self.layers[k - 1]
        return m

    def far(self) -> int:
        m = 0
        for k in range(self.light_layer + 1, len(self.layers) + 1):
            m |= self.layers[k - 1]
        return m

    def claimed_coloring(self, n: int) -> list:
        """2-coloring of H'' - S^gamma* that the bipartiteness claim promises."""
        g, z, gam = self.g, self.z, self.light_block
        start = (gam + 1) * z + 1
        color = [-1] * n
        depth = {v: 0 for v in self.cycle}
        for k, layer in enumerate(self.layers, 1):
            for v in bits(layer):
                depth[v] = k
        keep = self.near() & ~self.blocks[gam]
        for v in bits(keep):
            pos = (self.label[v] - start) % g
            color[v] = (pos + depth[v]) % 2
        return color


def decompose_layers(g: Graph, cycle, params: EptasParams, mask: int | None = None,
                     weights=None) -> LayerDecomposition:
    cycle = tuple(cycle)
    if len(cycle) <= params.c:
        raise ValueError(f"cycle length {len(cycle)} is not above c={params.c}")
    if mask is None:
        mask = g.all_mask
    weights = _weights(g, weights)
    cmask = to_mask(cycle)
    layers, unreached = bfs_layers(g, cmask, mask)
    label = {v: j for j, v in enumerate(cycle, 1)}
    prev = cmask
    for layer in layers:
        for v in bits(layer):
            label[v] = min(label[u] for u in bits(g.rows[v] & prev))
        prev = layer

    def wt(m):
        return _value(g, m, weights)

    budget = params.layer_budget
    sizes = [(wt(layers[k - 1]) if k <= len(layers) else 0, k) for k in range(1, budget + 1)]
    light_layer = min(sizes)[1]

    gsz, z = len(cycle), params.z
    nblocks = -(-gsz // z)
    near = cmask
    for k in range(1, min(light_layer, len(layers) + 1)):
        near |= layers[k - 1]
    blocks = []
    for gam in range(nblocks):
        lo, hi = gam * z + 1, min((gam + 1) * z, gsz)
        blocks.append(to_mask(v for v in bits(near) if lo <= label[v] <= hi))
    cands = tuple(gam for gam in range(min(params.max_gamma + 1, nblocks)) if (gam + 1) * z <= gsz)
    light_block = min((wt(blocks[gam]), gam) for gam in cands)[1]
    return LayerDecomposition(cycle, tuple(layers), label, unreached, light_layer,
                              tuple(blocks), cands, light_block, z)


# -- sampling EPTAS ---------------------------------------------------------------------------

def _trial(h: Graph, smask: int, params: EptasParams, weights, solve_bip, strict_claim=True):
    """One pass of the sampling EPTAS after sampling S. Returns (mask, path, certificate)."""
    rest = h.all_mask & ~h.closed_neighborhood(smask)
    cyc = shortest_odd_cycle(h, rest)
    if cyc is None:
        return smask | solve_bip(rest, "H'"), "bipartite", {}
    if len(cyc) <= params.c:
        rest2 = rest & ~h.closed_neighborhood(to_mask(cyc))
        return smask | solve_bip(rest2, "H' - N[C_og]"), "short", {"odd_cycle": list(cyc)}
    dec = decompose_layers(h, cyc, params, rest, weights)
    sol = smask | solve_bip(dec.far(), "far layers") | solve_bip(dec.unreached, "other components")
    keep = dec.near() & ~dec.blocks[dec.light_block]
    color = dec.claimed_coloring(h.n)
    bad = next(((u, v) for u in bits(keep) for v in bits(h.rows[u] & keep) if color[u] == color[v]), None)
    cert = {"odd_cycle": list(cyc), "light_layer": dec.light_layer, "light_block": dec.light_block,
            "claim_proper": bad is None}
    if bad is None:
        sol |= _colored_mis(h, color, keep, weights)
    elif strict_claim:
        raise ClaimViolation("claimed 2-coloring of H'' - S^gamma is improper",
                             {"where": "claim-bip", "edge": list(bad), "odd_cycle": list(cyc)})
    else:
        sol |= solve_bip(keep, "H'' - S^gamma")
    return sol, "long", cert


def _sample(rng, n: int, s: int, weights):
    if s == 0:
        return 0
    if weights is None:
        return to_mask(int(v) for v in rng.choice(n, size=s, replace=False))
    w = np.asarray(weights, dtype=float)
    pos = int((w > 0).sum())
    if pos <= s:
        # not enough positive weight to sample from: take all of it, pad uniformly
        chosen = list(np.flatnonzero(w > 0))
        others = [v for v in range(n) if w[v] <= 0]
        chosen += list(rng.choice(others, size=s - pos, replace=False)) if s > pos else []
        return to_mask(int(v) for v in chosen)
    return to_mask(int(v) for v in rng.choice(n, size=s, replace=False, p=w / w.sum()))


def _algorithm1(h: Graph, params: EptasParams, seed, weights, injected_sample, workers,
                solve_bip, strict_claim) -> SolveResult:
    n = h.n
    paths = {"bipartite": 0, "short": 0, "long": 0}
    meta = {"mode": params.mode, "i": params.i}
    s = params.sample_size(n)
    meta["s"] = s
    # practical s collapses to 0 when beta*n < 2: too small to sample, so solve exactly
    tiny = params.mode == "practical" and params.s_override is None and s == 0 and n <= ENUM_CAP
    if injected_sample is None and (params.beta * n < 2 * s or tiny):
        mask = brute_force(h, "mis", weights, cap=max(ENUM_CAP, n))
        meta["brute_force"] = True
        return _finish(h, mask, weights, trials=0, paths=paths, seed=seed, metadata=meta)

    if injected_sample is not None:
        samples = [to_mask(injected_sample) if not isinstance(injected_sample, int) else injected_sample]
    elif params.mode == "deterministic":
        if s > 3:
            raise ValueError("deterministic mode is capped at s <= 3")
        samples = [to_mask(c) for c in combinations(range(n), s)]
    else:
        t = params.trials()
        rngs = [np.random.default_rng(ss) for ss in np.random.SeedSequence(seed).spawn(t)]
        # trial 0 uses S = {}; exact whenever H itself is bipartite
        samples = [0] + [_sample(r, n, s, weights) for r in rngs]

    cache: dict = {}

    def run(smask):
        if not h.is_independent(smask):
            return None
        if smask not in cache:
            cache[smask] = _trial(h, smask, params, weights, solve_bip, strict_claim)
        return cache[smask]

    if workers and workers > 1:
        uniq = list(dict.fromkeys(s_ for s_ in samples if h.is_independent(s_)))
        with ThreadPoolExecutor(workers) as ex:
            for sm, out in zip(uniq, ex.map(lambda m: _trial(h, m, params, weights, solve_bip, strict_claim), uniq)):
                cache[sm] = out
    results = [run(sm) for sm in samples]

    best, best_val, certs, skipped = None, -1.0, {}, 0
    for k, res in enumerate(results):
        if res is None:
            skipped += 1
            continue
        mask, path, cert = res
        paths[path] += 1
        val = _value(h, mask, weights)
        if val > best_val:
            best, best_val, certs = mask, val, dict(cert, trial=k)
    meta["skipped"] = skipped
    if best is None:
        # only reachable in deterministic mode with every s-subset dependent
        mask, path, cert = _trial(h, 0, params, weights, solve_bip, strict_claim)
        paths[path] += 1
        best, certs = mask, dict(cert, trial=-1)
    return _finish(h, best, weights, trials=len(samples), paths=paths, seed=seed,
                   certificates=certs, metadata=meta)


def mis_eptas(g: Graph, params: EptasParams, seed: int = 0, weights=None,
              injected_sample=None, workers: int | None = None) -> SolveResult:
    """The sampling EPTAS on a graph promised to have iocp <= 1."""
    weights = _weights(g, weights)

    def solve_bip(mask, where):
        return _bip(g, mask, weights, where)

    return _algorithm1(g, params, seed, weights, injected_sample, workers, solve_bip, True)


def mis_iocp_recursive(g: Graph, params: EptasParams, seed: int = 0, weights=None,
                       workers: int | None = None) -> SolveResult:
    """The sampling EPTAS with eps/i, recursing with i-1 on non-bipartite residuals."""
    weights = _weights(g, weights)
    if params.i == 1:
        return mis_eptas(g, params, seed, weights, workers=workers)
    sub_params = derive_params(params.eps / params.i, params.beta, params.d, params.i, params.mode,
                               params.s_override, params.t_override)
    lower = replace(params, i=params.i - 1)
    counter = [0]

    def solve_bip(mask, where):
        try:
            return mis_bipartite(g, weights, mask)
        except NotBipartite:
            pass
        sub, order = induced_mask(g, mask)
        sw = None if weights is None else [weights[v] for v in order]
        counter[0] += 1
        res = mis_iocp_recursive(sub, lower, seed + counter[0], sw)
        return lift(res.mask, order)

    res = _algorithm1(g, sub_params, seed, weights, None, workers, solve_bip, False)
    res.metadata["recursive_calls"] = counter[0]
    res.metadata["i"] = params.i
    return res


# -- QPTAS branching ----------------------------------------------------------------------

def qptas_threshold(n: int, i: int = 1) -> int:
    if n <= 2:
        return 1
    ln = math.log(n)
    t = n / ln**4 if i == 1 else n / (2 * i * ln**5)
    return max(1, math.ceil(t))


def qptas_branch(g: Graph, eps: float = 0.25, i: int = 1, seed: int = 0, weights=None,
                 exact_cap: int = ENUM_CAP, beta: float = 0.25, d: int = 4) -> SolveResult:
    """Branch on high-degree vertices; leaves go to the exact or approximate base solver."""
    weights = _weights(g, weights)
    rows = g.rows
    stats = {"nodes": 0, "leaves": 0, "leaf_exact": True}
    best = [0, -1.0]

    def leaf(mask):
        stats["leaves"] += 1
        sub, order = induced_mask(g, mask)
        sw = None if weights is None else [weights[v] for v in order]
        if sub.n <= exact_cap:
            res = mis_subexp(sub, sw)
        else:
            stats["leaf_exact"] = False
            res = mis_iocp_recursive(sub, derive_params(eps, beta, d, i), seed, sw)
        return lift(res.mask, order)

    def rec(mask, chosen, val):
        stats["nodes"] += 1
        if val + _value(g, mask, weights) <= best[1]:
            return
        thr = qptas_threshold(popcount(mask), i)
        v, dv = -1, -1
        for u in bits(mask):
            du = popcount(rows[u] & mask)
            if du > dv:
                v, dv = u, du
        if dv < thr or v < 0:
            m = chosen | (leaf(mask) if mask else 0)
            mv = _value(g, m, weights)
            if mv > best[1]:
                best[0], best[1] = m, mv
            return
        rec(mask & ~rows[v] & ~(1 << v), chosen | 1 << v, val + _value(g, 1 << v, weights))
        rec(mask & ~(1 << v), chosen, val)

    rec(g.all_mask, 0, 0.0)
    return _finish(g, best[0], weights, seed=seed, metadata=stats)


# -- odd cycle covers and exact solvers ---------------------------------------------------

def odd_cycle_cover(g: Graph, mask: int | None = None) -> int:
    """Iteratively delete the vertices of a shortest odd cycle until bipartite."""
    if mask is None:
        mask = g.all_mask
    cover = 0
    while True:
        cyc = shortest_odd_cycle(g, mask & ~cover)
        if cyc is None:
            return cover
        cover |= to_mask(cyc)


def _independent_subsets(g: Graph, cand: list):
    """Yield every independent subset of the candidate list as a mask."""
    rows = g.rows
    stack = [(0, 0, 0)]  # (next index, chosen, blocked)
    while stack:
        k, chosen, blocked = stack.pop()
        if k == len(cand):
            yield chosen
            continue
        v = cand[k]
        stack.append((k + 1, chosen, blocked))
        if not (blocked >> v) & 1:
            stack.append((k + 1, chosen | 1 << v, blocked | rows[v]))


def _enumerate_over(g: Graph, cover: int, mask: int, weights, cap: int, color=None) -> int:
    if popcount(cover) > cap:
        raise CapExceeded(f"cover of size {popcount(cover)} exceeds enumeration cap {cap}")
    rest = mask & ~cover
    if color is None:
        color = two_color(g, rest)
    best, best_val = 0, -1.0
    for sub in _independent_subsets(g, list(bits(cover))):
        free = rest & ~g.neighborhood(sub)
        m = sub | _colored_mis(g, color, free, weights)
        v = _value(g, m, weights)
        if v > best_val:
            best, best_val = m, v
    return best


def mis_exact_occ(g: Graph, cover, weights=None, cap: int = ENUM_CAP, mask: int | None = None) -> SolveResult:
    weights = _weights(g, weights)
    if mask is None:
        mask = g.all_mask
    cover = (to_mask(cover) if not isinstance(cover, int) else cover) & mask
    try:
        color = two_color(g, mask & ~cover)
    except NotBipartite as exc:
        raise ValueError(f"cover does not bipartize the graph; odd cycle {list(exc.cycle)} survives") from None
    best = _enumerate_over(g, cover, mask, weights, cap, color)
    return _finish(g, best, weights, certificates={"cover": list(bits(cover))},
                   metadata={"route": "occ", "cover_size": popcount(cover)})


def mis_exact_cycle_nbhd(g: Graph, cycle, weights=None, cap: int = ENUM_CAP,
                         mask: int | None = None) -> SolveResult:
    weights = _weights(g, weights)
    if mask is None:
        mask = g.all_mask
    nc = g.closed_neighborhood(to_mask(cycle)) & mask
    try:
        color = two_color(g, mask & ~nc)
    except NotBipartite as exc:
        raise IocpViolation("graph minus N[C] is not bipartite",
                            {"where": "G - N[C]", "cycle": list(cycle), "odd_cycle": list(exc.cycle)}) from None
    best = _enumerate_over(g, nc, mask, weights, cap, color)
    return _finish(g, best, weights, certificates={"cycle": list(cycle), "cover": list(bits(nc))},
                   metadata={"route": "cycle", "cover_size": popcount(nc)})


def _leaf_exact(g: Graph, mask: int, weights, cap: int, stats) -> int:
    try:
        color = two_color(g, mask)
        stats["bipartite_leaves"] += 1
        return _colored_mis(g, color, mask, weights)
    except NotBipartite:
        pass
    cover = odd_cycle_cover(g, mask)
    cyc = shortest_odd_cycle(g, mask)
    nc = g.closed_neighborhood(to_mask(cyc)) & mask
    routes = []
    if is_bip_after(g, mask & ~nc):
        routes.append((popcount(nc), 1, nc))
    routes.append((popcount(cover), 0, cover))
    routes.sort()
    size, kind, chosen = routes[0]
    if size > cap:
        raise CapExceeded(f"both enumeration routes exceed cap {cap} (best {size})")
    stats["cycle_leaves" if kind else "occ_leaves"] += 1
    return _enumerate_over(g, chosen, mask, weights, cap)


def is_bip_after(g: Graph, mask: int) -> bool:
    return shortest_odd_cycle(g, mask) is None


def mis_subexp(g: Graph, weights=None, cap: int = ENUM_CAP) -> SolveResult:
    """Exact MIS: branch on degree >= n^(1/3), then enumerate over the cheaper cover."""
    weights = _weights(g, weights)
    rows = g.rows
    thr = max(1.0, g.n ** (1 / 3))
    stats = {"branch_nodes": 0, "bipartite_leaves": 0, "occ_leaves": 0, "cycle_leaves": 0}
    best = [0, -1.0]

    def rec(mask, chosen, val):
        stats["branch_nodes"] += 1
        if val + _value(g, mask, weights) <= best[1]:
            return
        v, dv = -1, -1
        for u in bits(mask):
            du = popcount(rows[u] & mask)
            if du > dv:
                v, dv = u, du
        if v < 0 or dv < thr:
            m = chosen | _leaf_exact(g, mask, weights, cap, stats)
            mv = _value(g, m, weights)
            if mv > best[1]:
                best[0], best[1] = m, mv
            return
        rec(mask & ~rows[v] & ~(1 << v), chosen | 1 << v, val + _value(g, 1 << v, weights))
        rec(mask & ~(1 << v), chosen, val)

    rec(g.all_mask, 0, 0.0)
    return _finish(g, best[0], weights, metadata=stats)
