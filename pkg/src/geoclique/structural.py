"""Executable checks of the structural results on disk and ball graphs.

iocp witnesses, VC-dimension of neighborhood hypergraphs, the K2,2 disk
configuration predicate, crossing profiles of two closed planar chains and
needle-direction curves on the 2-sphere.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .geom import Ball, GeometricInstance, intersection_graph
from .graph import CapExceeded, Graph, bits, shortest_odd_cycle, to_mask


# -- iocp ------------------------------------------------------------------------

@dataclass(frozen=True)
class IocpWitness:
    cycles: tuple | None  # two vertex sequences, or None
    exhaustive: bool  # True when every induced odd cycle was enumerated
    cap: int
    examined: int = 0

    @property
    def found(self) -> bool:
        return self.cycles is not None

    @property
    def status(self) -> str:
        if self.found:
            return "witness"
        return "none" if self.exhaustive else "none-up-to-cap"


def induced_odd_cycles(g: Graph, cap: int | None = None):
    """Yield every induced odd cycle of length <= cap once, lowest vertex first."""
    if cap is None:
        cap = g.n
    rows = g.rows
    for s in range(g.n):
        higher = g.all_mask & ~((1 << (s + 1)) - 1)
        # path s, v1, ..., last with all vertices > s; chords forbidden
        stack = [((s, v1), 1 << v1, 0) for v1 in reversed(list(bits(rows[s] & higher)))]
        while stack:
            path, pmask, interior = stack.pop()
            last = path[-1]
            for w in bits(rows[last] & higher & ~pmask):
                if rows[w] & interior:
                    continue
                if (rows[w] >> s) & 1:
                    if len(path) >= 2 and path[1] < w:
                        k = len(path) + 1
                        if k % 2 == 1 and k <= cap:
                            yield path + (w,)
                    continue
                if len(path) + 1 < cap:
                    stack.append((path + (w,), pmask | (1 << w), interior | (1 << last if len(path) > 1 else 0)))


def find_two_anticomplete_odd_cycles(g: Graph, cap: int | None = None) -> IocpWitness:
    """Search for two vertex-disjoint induced odd cycles with no edge between.

    Every induced odd cycle C up to the cap is enumerated; a partner exists iff
    g - N[C] is not bipartite, and its shortest odd cycle is induced.
    """
    if cap is None:
        cap = g.n
    exhaustive = cap >= g.n
    examined = 0
    for cyc in induced_odd_cycles(g, cap):
        examined += 1
        rest = g.all_mask & ~g.closed_neighborhood(to_mask(cyc))
        other = shortest_odd_cycle(g, rest)
        if other is not None:
            return IocpWitness((tuple(cyc), tuple(other)), exhaustive, cap, examined)
    return IocpWitness(None, exhaustive, cap, examined)


def check_witness(g: Graph, w: IocpWitness) -> bool:
    from .graph import odd_cycle_is_valid
    c1, c2 = w.cycles
    m1, m2 = to_mask(c1), to_mask(c2)
    return (odd_cycle_is_valid(g, c1, chordless=True) and odd_cycle_is_valid(g, c2, chordless=True)
            and not m1 & m2 and not g.neighborhood(m1) & m2)


# -- VC-dimension -------------------------------------------------------------------

def vc_dimension(g: Graph, cap: int = 20) -> int:
    """VC-dimension of the open-neighborhood hypergraph {N(v)}."""
    if g.n > cap:
        raise CapExceeded(f"n={g.n} exceeds VC-dimension cap {cap}")
    best = 0
    for k in range(1, g.n + 1):
        if 2**k > g.n:
            break
        if not any(_shattered(g, to_mask(x), k) for x in combinations(range(g.n), k)):
            break
        best = k
    return best


def _shattered(g: Graph, xmask: int, k: int) -> bool:
    return len({row & xmask for row in g.rows}) == 1 << k


# -- K2,2 configurations --------------------------------------------------------------

class NotK22(ValueError):
    pass


@dataclass(frozen=True)
class K22Verdict:
    convex: bool
    diagonal_nonedges: bool | None  # only meaningful in convex position
    corollary_holds: bool
    inner_center: int | None = None


def _sgn(x: float) -> int:
    return (x > 0) - (x < 0)


def _orient(a, b, c) -> int:
    from .geom import exact_orient
    return exact_orient(a, b, c)


def line_hits_segment(p, q, a, b) -> bool:
    """Does the line through p, q meet the closed segment ab?"""
    return _orient(p, q, a) * _orient(p, q, b) <= 0


def segments_cross(a, b, c, d) -> bool:
    return line_hits_segment(a, b, c, d) and line_hits_segment(c, d, a, b)


def _in_triangle(p, a, b, c) -> bool:
    s = (_orient(a, b, p), _orient(b, c, p), _orient(c, a, p))
    return all(x > 0 for x in s) or all(x < 0 for x in s)


def check_k22_quadrilateral(disks, nonedges=((0, 1), (2, 3))) -> K22Verdict:
    if len(disks) != 4 or not all(isinstance(d, Ball) and d.dim == 2 for d in disks):
        raise NotK22("need exactly four disks")
    pairs = {tuple(sorted(p)) for p in nonedges}
    if len(pairs) != 2 or set().union(*pairs) != {0, 1, 2, 3}:
        raise NotK22(f"nonedges {nonedges} is not a perfect pairing of 0..3")
    g = intersection_graph(GeometricInstance(tuple(disks)))
    for u, v in combinations(range(4), 2):
        if g.has_edge(u, v) == ((u, v) in pairs):
            raise NotK22(f"disks do not realize K2,2 with nonedges {sorted(pairs)} (pair {u},{v})")
    (i1, i2), (i3, i4) = sorted(pairs)
    c = [d.c for d in disks]
    inner = None
    for k in range(4):
        others = [c[j] for j in range(4) if j != k]
        if _in_triangle(c[k], *others):
            inner = k
    convex = inner is None
    diagonal = None
    if convex:
        diagonal = segments_cross(c[i1], c[i2], c[i3], c[i4])
    holds = line_hits_segment(c[i1], c[i2], c[i3], c[i4]) or line_hits_segment(c[i3], c[i4], c[i1], c[i2])
    return K22Verdict(convex, diagonal, holds, inner)


# -- crossing profiles ----------------------------------------------------------------

class DegeneratePosition(ValueError):
    pass


@dataclass(frozen=True)
class CrossingProfile:
    a: tuple
    b: tuple
    c: tuple
    a2: tuple
    b2: tuple
    c2: tuple
    chains: tuple = field(default=(), compare=False)

    def invariants(self) -> dict:
        return {
            "a_even": all(x % 2 == 0 for x in self.a + self.a2),
            "sum_c_even": sum(self.c) % 2 == 0,
            "sum_c_equal": sum(self.c) == sum(self.c2),
            "sum_b_eq_sum_a2": sum(self.b) == sum(self.a2),
            "sum_b2_eq_sum_a": sum(self.b2) == sum(self.a),
        }


_GRID = 2**40


def _int_point(p):
    return (round(p[0] * _GRID), round(p[1] * _GRID))


def _iorient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _general_position(ch1, ch2) -> bool:
    for A, B in ((ch1, ch2), (ch2, ch1)):
        for i in range(len(A)):
            p, q = A[i], A[(i + 1) % len(A)]
            if p == q:
                return False
            if any(_iorient(p, q, x) == 0 for x in B):
                return False
    return True


def _profile(ch1, ch2):
    s, t = len(ch1), len(ch2)
    seg1 = [(ch1[i], ch1[(i + 1) % s]) for i in range(s)]
    seg2 = [(ch2[j], ch2[(j + 1) % t]) for j in range(t)]
    # L1[i][j]: line of S_i crosses S'_j ; L2[j][i]: line of S'_j crosses S_i
    L1 = [[_iorient(p, q, u) != _iorient(p, q, v) for (u, v) in seg2] for (p, q) in seg1]
    L2 = [[_iorient(u, v, p) != _iorient(u, v, q) for (p, q) in seg1] for (u, v) in seg2]
    a = tuple(sum(L1[i]) for i in range(s))
    b = tuple(sum(L2[j][i] for j in range(t)) for i in range(s))
    c = tuple(sum(L1[i][j] and L2[j][i] for j in range(t)) for i in range(s))
    a2 = tuple(sum(L2[j]) for j in range(t))
    b2 = tuple(sum(L1[i][j] for i in range(s)) for j in range(t))
    c2 = tuple(sum(L1[i][j] and L2[j][i] for i in range(s)) for j in range(t))
    return a, b, c, a2, b2, c2


def crossing_profile(chain1, chain2, seed: int = 0, retries: int = 8, jitter: float = 1e-7) -> CrossingProfile:
    """Crossing counts for two closed planar polygons.

    Coordinates are snapped to a 2^-40 grid and all tests are exact integer
    orientation signs. Chains not in general position are perturbed by a
    seeded jitter, up to `retries` times.
    """
    if len(chain1) < 2 or len(chain2) < 2:
        raise ValueError("chains need at least two vertices")
    rng = random.Random(seed)
    pts1 = [tuple(map(float, p)) for p in chain1]
    pts2 = [tuple(map(float, p)) for p in chain2]
    for attempt in range(retries + 1):
        i1 = [_int_point(p) for p in pts1]
        i2 = [_int_point(p) for p in pts2]
        if _general_position(i1, i2):
            used = (tuple(pts1), tuple(pts2))
            return CrossingProfile(*_profile(i1, i2), chains=used)
        if attempt == retries:
            break
        pts1 = [(x + rng.uniform(-jitter, jitter), y + rng.uniform(-jitter, jitter)) for x, y in chain1]
        pts2 = [(x + rng.uniform(-jitter, jitter), y + rng.uniform(-jitter, jitter)) for x, y in chain2]
    raise DegeneratePosition(f"chains still degenerate after {retries} perturbations")


# -- needle directions --------------------------------------------------------------------

NEEDLE_TOL = 1e-6


class NeedleSearchError(RuntimeError):
    def __init__(self, message, closest=None):
        super().__init__(message)
        self.closest = closest


@dataclass(frozen=True)
class Leg:
    """One leg of the needle walk: the needle is B - A with A, B chain points.

    fixed is the index of the stationary point, moving goes from src to dst,
    and moving_is_head says whether the moving point is B.
    """

    fixed: int
    src: int
    dst: int
    moving_is_head: bool

    def endpoints(self, chain, t):
        x = chain[self.src] + t * (chain[self.dst] - chain[self.src])
        f = chain[self.fixed]
        return (f, x) if self.moving_is_head else (x, f)

    def pq(self, chain):
        # direction(t) = normalize(P + t Q)
        a, b = self.endpoints(chain, 0.0)
        step = chain[self.dst] - chain[self.src]
        return b - a, (step if self.moving_is_head else -step)


@dataclass
class DirectionCurve:
    directions: np.ndarray  # (N, 3) unit vectors, last == first
    closed: bool
    antipodal: bool
    legs: list
    samples_per_leg: int


def _unit(v):
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero-length needle (chain has a degenerate corner)")
    return v / n


def needle_legs(p: int) -> list:
    legs = []
    a, b = 0, 1
    for k in range(2 * p):
        if k % 2 == 0:
            legs.append(Leg(fixed=b, src=a, dst=(a + 2) % p, moving_is_head=False))
            a = (a + 2) % p
        else:
            legs.append(Leg(fixed=a, src=b, dst=(b + 2) % p, moving_is_head=True))
            b = (b + 2) % p
    return legs


def _as_chain(chain) -> np.ndarray:
    arr = np.asarray(chain, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError("chain must be a list of 3D points")
    return arr


def needle_curve(chain, samples: int = 64) -> DirectionCurve:
    pts = _as_chain(chain)
    p = len(pts)
    if p % 2 == 0 or p < 3:
        raise ValueError(f"needle curves need an odd vertex count >= 3, got {p}")
    legs = needle_legs(p)
    out = []
    for leg in legs:
        P, Q = leg.pq(pts)
        for j in range(samples):
            out.append(_unit(P + (j / samples) * Q))
    P, Q = legs[-1].pq(pts)
    end = _unit(P + Q)
    out.append(end)
    d = np.array(out)
    closed = bool(np.linalg.norm(d[-1] - d[0]) <= NEEDLE_TOL)
    half = p * samples
    antipodal = bool(np.max(np.linalg.norm(d[:half] + d[half:2 * half], axis=1)) <= NEEDLE_TOL)
    return DirectionCurve(d, closed, antipodal, legs, samples)


@dataclass(frozen=True)
class NeedleMatch:
    direction: tuple
    angular_error: float
    config1: tuple  # (leg index, t, tail point, head point)
    config2: tuple
    method: str  # "arc" or "grid"


def _angle(u, v) -> float:
    return float(math.atan2(np.linalg.norm(np.cross(u, v)), float(np.dot(u, v))))


def _on_arc(x, u0, u1, m, tol=1e-12) -> bool:
    return float(np.dot(np.cross(u0, x), m)) >= -tol and float(np.dot(np.cross(x, u1), m)) >= -tol \
        and float(np.dot(x, u0 + u1)) > 0


def _leg_param(P, Q, x) -> float:
    # t with normalize(P + tQ) closest to x; exact when x lies on the arc
    # solve (P + tQ) x-parallel: minimize |(P+tQ) - ((P+tQ).x) x| over t
    pp = P - np.dot(P, x) * x
    qq = Q - np.dot(Q, x) * x
    den = float(np.dot(qq, qq))
    t = -float(np.dot(pp, qq)) / den if den > 0 else 0.0
    return min(1.0, max(0.0, t))


def _membership(chain, leg, t, x):
    a, b = leg.endpoints(chain, t)
    return _angle(_unit(b - a), x)


def _same_circle_overlap(P1, Q1, P2, Q2, m1):
    u0 = _unit(P1)
    w = np.cross(m1, u0)

    def ang(v):
        v = _unit(v)
        return math.atan2(float(np.dot(v, w)), float(np.dot(v, u0))) % (2 * math.pi)

    th1 = ang(P1 + Q1)
    a0, a1 = ang(P2), ang(P2 + Q2)
    # arc2 runs either a0 -> a1 counterclockwise or clockwise (arcs are < pi)
    lo, hi = (a0, a1) if (a1 - a0) % (2 * math.pi) < math.pi else (a1, a0)
    width = (hi - lo) % (2 * math.pi)
    if (0 - lo) % (2 * math.pi) <= width + 1e-12:
        return u0
    start = lo
    if start <= th1 + 1e-12:
        return math.cos(start) * u0 + math.sin(start) * w
    return None


def common_needle_direction(c1, c2, samples: int = 64) -> NeedleMatch:
    """A direction lying on both needle curves.

    Each leg of a needle walk traces a great-circle arc, so crossings are found
    by arc-arc intersection and refined on the exact leg parametrization.
    """
    ch1, ch2 = _as_chain(c1), _as_chain(c2)
    curve1, curve2 = needle_curve(ch1, samples), needle_curve(ch2, samples)
    arcs1 = [leg.pq(ch1) for leg in curve1.legs]
    arcs2 = [leg.pq(ch2) for leg in curve2.legs]
    best = None
    for i, (P1, Q1) in enumerate(arcs1):
        m1 = np.cross(P1, Q1)
        if np.linalg.norm(m1) < 1e-300:
            continue
        m1 = m1 / np.linalg.norm(m1)
        u0, u1 = _unit(P1), _unit(P1 + Q1)
        for j, (P2, Q2) in enumerate(arcs2):
            m2 = np.cross(P2, Q2)
            if np.linalg.norm(m2) < 1e-300:
                continue
            m2 = m2 / np.linalg.norm(m2)
            v0, v1 = _unit(P2), _unit(P2 + Q2)
            axis = np.cross(m1, m2)
            cands = []
            if np.linalg.norm(axis) < 1e-12:
                x = _same_circle_overlap(P1, Q1, P2, Q2, m1)
                if x is not None:
                    cands.append(_unit(x))
            else:
                axis = _unit(axis)
                cands = [axis, -axis]
            for x in cands:
                if not (_on_arc(x, u0, u1, m1, 1e-9) and _on_arc(x, v0, v1, m2, 1e-9)):
                    continue
                t1 = _leg_param(P1, Q1, x)
                t2 = _leg_param(P2, Q2, x)
                d1 = _unit(P1 + t1 * Q1)
                d2 = _unit(P2 + t2 * Q2)
                err = _angle(d1, d2)
                if err <= NEEDLE_TOL and _membership(ch1, curve1.legs[i], t1, d1) <= NEEDLE_TOL \
                        and _membership(ch2, curve2.legs[j], t2, d1) <= NEEDLE_TOL:
                    a1, b1 = curve1.legs[i].endpoints(ch1, t1)
                    a2, b2 = curve2.legs[j].endpoints(ch2, t2)
                    return NeedleMatch(_floats(d1), err, (i, t1, _floats(a1), _floats(b1)),
                                       (j, t2, _floats(a2), _floats(b2)), "arc")
                if best is None or err < best[0]:
                    best = (err, x)
    return _grid_fallback(ch1, ch2, curve1, curve2, best)


def _floats(v) -> tuple:
    return tuple(float(x) for x in v)


def _grid_fallback(ch1, ch2, curve1, curve2, best):
    step = math.radians(0.5)
    d1, d2 = curve1.directions, curve2.directions
    top = None
    for th in np.arange(0, math.pi + step / 2, step):
        for ph in np.arange(0, 2 * math.pi, step):
            x = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
            e = max(float(np.min(np.linalg.norm(d1 - x, axis=1))), float(np.min(np.linalg.norm(d2 - x, axis=1))))
            if top is None or e < top[0]:
                top = (e, x)
    raise NeedleSearchError("no refined common needle direction found",
                            closest={"arc_error": None if best is None else best[0], "grid_error": top[0],
                                     "grid_direction": tuple(top[1])})


def sphere_grid_common(c1, c2, samples: int = 64, resolution_deg: float = 0.5):
    """Brute-force oracle: best grid direction close to both sampled curves."""
    d1 = needle_curve(c1, samples).directions
    d2 = needle_curve(c2, samples).directions
    step = math.radians(resolution_deg)
    best = None
    for th in np.arange(0, math.pi + step / 2, step):
        st, ct = math.sin(th), math.cos(th)
        phs = np.arange(0, 2 * math.pi, step)
        xs = np.stack([st * np.cos(phs), st * np.sin(phs), np.full_like(phs, ct)], axis=1)
        e1 = np.min(np.linalg.norm(xs[:, None, :] - d1[None, :, :], axis=2), axis=1)
        e2 = np.min(np.linalg.norm(xs[:, None, :] - d2[None, :, :], axis=2), axis=1)
        e = np.maximum(e1, e2)
        k = int(np.argmin(e))
        if best is None or e[k] < best[0]:
            best = (float(e[k]), tuple(xs[k]))
    return best
