"""Maximum clique on disk and unit-ball graphs via MIS on complements."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .approx import IocpViolation, SolveResult, derive_params, mis_eptas, mis_subexp
from .geom import Ball, GeometricInstance, intersection_graph
from .graph import (
    Graph,
    NotBipartite,
    bits,
    brute_force,
    complement,
    induced_mask,
    lift,
    mis_bipartite,
    popcount,
)

BETA_NO_REP = 1 / 36
BETA_REP = 1 / 4
BETA_UNIT = 1 / 30
VC_DIM = 4
PIERCE_PAIR_CAP = 200_000


class NotDiskGraph(IocpViolation):
    """The iocp promise failed on a branch, so the input is not a disk/ball graph."""


@dataclass(frozen=True)
class PipelineConfig:
    eps: float = 0.25
    seed: int = 0
    beta: float | None = None  # None: pick the constant matching the input
    representation: bool | None = None  # None: yes iff a geometric instance is given
    mode: str = "eptas"
    trials: int | None = None
    sample_size: int | None = None
    workers: int | None = None

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0,1), got {self.eps}")
        if self.mode not in ("eptas", "subexp", "exact", "pierce2"):
            raise ValueError(f"unknown mode {self.mode!r}")


def _as_graph(inp):
    if isinstance(inp, Graph):
        return inp, None
    return intersection_graph(inp), inp


def _best_branch(g: Graph, branches, solve, cfg: PipelineConfig) -> SolveResult:
    """Solve MIS on the complement of each branch's vertex set; keep the best clique."""
    best, best_u, trials = 0, None, 0
    paths = {"bipartite": 0, "short": 0, "long": 0}
    for u, mask in branches:
        sub, order = induced_mask(g, mask)
        try:
            res = solve(complement(sub), u)
        except IocpViolation as exc:
            raise NotDiskGraph(f"branch at vertex {u}: {exc}",
                               dict(exc.evidence, branch=u, vertices=order)) from None
        trials += res.trials
        for k in paths:
            paths[k] += res.paths.get(k, 0)
        m = lift(res.mask, order)
        if popcount(m) > popcount(best):
            best, best_u = m, u
    if not g.is_clique(best):
        raise AssertionError(f"pipeline produced a non-clique {list(bits(best))}")
    return SolveResult(best, popcount(best), "clique", trials, paths, cfg.seed,
                       metadata={"mode": cfg.mode, "branch": best_u})


def _solver(cfg: PipelineConfig, beta: float):
    if cfg.mode == "subexp":
        return lambda h, u: mis_subexp(h)
    params = derive_params(cfg.eps, beta, VC_DIM, 1, "practical", cfg.sample_size, cfg.trials)
    return lambda h, u: mis_eptas(h, params, seed=[cfg.seed, u], workers=cfg.workers)


def _exact(g: Graph, cfg: PipelineConfig) -> SolveResult:
    m = brute_force(g, "clique", cap=max(24, g.n))
    return SolveResult(m, popcount(m), "clique", 0, seed=cfg.seed, metadata={"mode": "exact"})


def clique_disk(inp, cfg: PipelineConfig = PipelineConfig()) -> SolveResult:
    """Maximum clique of a disk graph, trying every vertex u as a member of the clique."""
    g, inst = _as_graph(inp)
    if cfg.mode == "exact":
        return _exact(g, cfg)
    if cfg.mode == "pierce2":
        if inst is None:
            raise ValueError("pierce2 needs a geometric representation")
        return clique_pierce2(inst)
    rep = cfg.representation if cfg.representation is not None else inst is not None
    if rep and inst is None:
        raise ValueError("representation requested but input is a bare graph")
    if rep:
        # u is taken as the smallest disk of the clique; larger neighbours only
        radii = [o.r for o in inst.objects]
        branches = [(u, g.closed_neighborhood(1 << u) & _mask_where(g.n, lambda v: radii[v] >= radii[u]))
                    for u in range(g.n)]
        beta = cfg.beta or BETA_REP
    else:
        branches = [(u, g.closed_neighborhood(1 << u)) for u in range(g.n)]
        beta = cfg.beta or BETA_NO_REP
    res = _best_branch(g, branches, _solver(cfg, beta), cfg)
    res.metadata.update(beta=beta, representation=rep)
    return res


def clique_unit_ball(inp, cfg: PipelineConfig = PipelineConfig()) -> SolveResult:
    g, _ = _as_graph(inp)
    if cfg.mode == "exact":
        return _exact(g, cfg)
    if cfg.mode == "pierce2":
        raise ValueError("pierce2 applies to disks only")
    beta = cfg.beta or BETA_UNIT
    branches = [(u, g.closed_neighborhood(1 << u)) for u in range(g.n)]
    res = _best_branch(g, branches, _solver(cfg, beta), cfg)
    res.metadata.update(beta=beta)
    return res


def _mask_where(n, pred) -> int:
    m = 0
    for v in range(n):
        if pred(v):
            m |= 1 << v
    return m


# -- 2-approximation by piercing --------------------------------------------------

def _circle_points(a: Ball, b: Ball):
    (x0, y0), (x1, y1) = a.c, b.c
    dx, dy = x1 - x0, y1 - y0
    d = math.hypot(dx, dy)
    if d == 0 or d > a.r + b.r or d < abs(a.r - b.r):
        return []
    t = (a.r * a.r - b.r * b.r + d * d) / (2 * d)
    h = math.sqrt(max(0.0, a.r * a.r - t * t))
    mx, my = x0 + t * dx / d, y0 + t * dy / d
    return [(mx - h * dy / d, my + h * dx / d), (mx + h * dy / d, my - h * dx / d)]


def piercing_candidates(disks) -> list:
    """Centers, one boundary point per disk, and all pairwise boundary intersections."""
    pts = []
    for dk in disks:
        pts.append(tuple(dk.c))
        pts.append((dk.c[0] + dk.r, dk.c[1]))
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            pts.extend(_circle_points(disks[i], disks[j]))
    return pts


def _hits(disks, p, tol=1e-9) -> int:
    m = 0
    for k, dk in enumerate(disks):
        if math.hypot(p[0] - dk.c[0], p[1] - dk.c[1]) <= dk.r + tol:
            m |= 1 << k
    return m


def _maximal(masks) -> list:
    masks = sorted(set(masks), key=popcount, reverse=True)
    keep = []
    for m in masks:
        if not any(m & ~k == 0 for k in keep):
            keep.append(m)
    return keep


def _cobipartite_clique(g: Graph, mask: int) -> int:
    sub, order = induced_mask(g, mask)
    h = complement(sub)
    try:
        m = mis_bipartite(h)
    except NotBipartite:
        # tolerance let in a disk that misses the point; solve exactly instead
        m = brute_force(h, cap=max(24, h.n))
    return lift(m, order)


def clique_pierce2(inst: GeometricInstance, pair_cap: int = PIERCE_PAIR_CAP, seed: int = 0) -> SolveResult:
    """2-approximate maximum clique of a disk instance.

    Four points pierce any clique of disks; the best half, the disks hit by
    one of two candidate points, is a co-bipartite graph solved exactly.
    """
    disks = inst.objects
    if inst.kind != "balls" or inst.dim != 2:
        raise ValueError("pierce2 needs a planar disk instance")
    g = intersection_graph(inst)
    masks = _maximal(_hits(disks, p) for p in piercing_candidates(disks))
    pairs = [(i, j) for i in range(len(masks)) for j in range(i, len(masks))]
    guarantee = "2-approx"
    if len(pairs) > pair_cap:
        pairs = random.Random(seed).sample(pairs, pair_cap)
        guarantee = "heuristic"
    best = 0
    for i, j in pairs:
        m = masks[i] | masks[j]
        if popcount(m) <= popcount(best):
            continue
        c = _cobipartite_clique(g, m)
        if popcount(c) > popcount(best):
            best = c
    if not g.is_clique(best):
        raise AssertionError("pierce2 produced a non-clique")
    return SolveResult(best, popcount(best), "clique", len(pairs), seed=seed,
                       metadata={"mode": "pierce2", "guarantee": guarantee, "candidates": len(masks),
                                 "candidate_set": "centers+boundary+pairwise-intersections"})
