"""Hardness gadgets: co-2-subdivisions and their geometric realizations.

Every realization is checked by rebuilding its intersection graph, and a
construction that cannot clear the margin raises instead of returning a
wrong gadget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .geom import (
    DEFAULT_TOL,
    Ball,
    Ellipse,
    GeometricInstance,
    Triangle,
    build_intersection_graph,
    slack,
)
from .graph import Graph

MARGIN_FACTOR = 1e3  # required slack, in units of the predicate tolerance
TARGETS = ("balls4", "balls3eps", "triangles", "ellipses")


class GadgetError(RuntimeError):
    """A construction failed to verify; `pair` names an offending object pair."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


# -- co-2-subdivision --------------------------------------------------------

@dataclass(frozen=True)
class Co2Subdivision:
    source: Graph
    graph: Graph
    edges: tuple   # edges of the source, (u, v) with u < v; u is the first endpoint
    roles: tuple   # ("orig", i) or ("plus", k) or ("minus", k)

    @property
    def n(self):
        return self.source.n

    @property
    def m(self):
        return len(self.edges)

    def plus(self, k):
        return self.n + 2 * k

    def minus(self, k):
        return self.n + 2 * k + 1


def co2subdivision(g: Graph) -> Co2Subdivision:
    """Subdivide every edge twice, then complement.

    Vertex order: originals, then v+(e_k), v-(e_k) for each edge in order.
    """
    edges = tuple(g.edges())
    n, m = g.n, len(edges)
    total = n + 2 * m
    non = set()
    for k, (u, v) in enumerate(edges):
        p, q = n + 2 * k, n + 2 * k + 1
        non.update({(u, p), (p, q), (v, q)})
    pairs = [(a, b) for a, b in combinations(range(total), 2) if (a, b) not in non]
    roles = tuple([("orig", i) for i in range(n)]
                  + [r for k in range(m) for r in (("plus", k), ("minus", k))])
    return Co2Subdivision(g, Graph.from_edges(total, pairs), edges, roles)


# -- verification -------------------------------------------------------------

@dataclass
class RealizationReport:
    expected: Graph
    computed: Graph
    mismatched: list
    min_adj_slack: float
    min_nonadj_slack: float   # smallest gap among pairs that must not meet
    tightest: tuple | None = None

    @property
    def equal(self) -> bool:
        return not self.mismatched

    @property
    def min_slack(self) -> float:
        return min(self.min_adj_slack, self.min_nonadj_slack)

    def to_json(self) -> dict:
        def num(x):
            return None if math.isinf(x) else x
        return {"equal": self.equal, "n": self.expected.n,
                "expected_edges": self.expected.num_edges(),
                "computed_edges": self.computed.num_edges(),
                "mismatched": [list(p) for p in self.mismatched],
                "min_adj_slack": num(self.min_adj_slack),
                "min_nonadj_slack": num(self.min_nonadj_slack),
                "min_slack": num(self.min_slack)}


def verify_realization(inst: GeometricInstance, expected: Graph, tol: float = DEFAULT_TOL) -> RealizationReport:
    if len(inst.objects) != expected.n:
        raise ValueError(f"instance has {len(inst.objects)} objects, graph has {expected.n} vertices")
    computed, _ = build_intersection_graph(inst, tol)
    objs = inst.objects
    bad, adj, non = [], math.inf, math.inf
    tight, tight_val = None, math.inf
    for i, j in combinations(range(expected.n), 2):
        s = slack(objs[i], objs[j])
        want = expected.has_edge(i, j)
        if want != computed.has_edge(i, j):
            bad.append((i, j))
        v = s if want else -s
        if want:
            adj = min(adj, s)
        else:
            non = min(non, -s)
        if v < tight_val:
            tight, tight_val = (i, j), v
    return RealizationReport(expected, computed, bad, adj, non, tight)


def _require(report: RealizationReport, what: str, tol: float = DEFAULT_TOL):
    if not report.equal:
        i, j = report.mismatched[0]
        raise GadgetError(f"{what}: pair ({i}, {j}) has the wrong adjacency", (i, j))
    if report.min_slack <= MARGIN_FACTOR * tol:
        raise GadgetError(f"{what}: margin {report.min_slack:.3g} at pair {report.tightest} "
                          f"is below {MARGIN_FACTOR * tol:.3g}", report.tightest)


def fault_inject(inst: GeometricInstance, report: RealizationReport, factor: float = 2.0):
    """Move the tightest pair across its margin by `factor` times the margin.

    The first object is translated along the line through the two centers. For
    balls this changes the slack by exactly the distance moved; for triangles and
    ellipses the step doubles until the pair flips. Returns (instance, (i, j)).
    """
    if report.tightest is None:
        raise ValueError("nothing to perturb: fewer than two objects")
    i, j = report.tightest
    objs = list(inst.objects)
    a, b = objs[i], objs[j]
    s = slack(a, b)
    want_hit = s < 0  # flip the current state
    amount = factor * max(abs(s), 1e-12)
    ca, cb = np.array(_center(a), float), np.array(_center(b), float)
    d = cb - ca
    norm = np.linalg.norm(d)
    d = d / norm if norm > 0 else np.eye(len(ca))[0]
    if not want_hit:
        d = -d
    for _ in range(60):
        moved = _translate(a, d * amount)
        if (slack(moved, b) >= 0) == want_hit:
            objs[i] = moved
            return GeometricInstance(tuple(objs), inst.labels), (i, j)
        amount *= 2
    raise GadgetError("fault injection could not flip the pair", (i, j))


def _center(o):
    if isinstance(o, Triangle):
        return tuple(sum(p[k] for p in o.p) / 3 for k in range(2))
    return o.c


def _translate(o, t):
    if isinstance(o, Triangle):
        return Triangle(tuple((p[0] + t[0], p[1] + t[1]) for p in o.p))
    if isinstance(o, Ellipse):
        return Ellipse((o.c[0] + t[0], o.c[1] + t[1]), o.a, o.b, o.theta)
    return Ball(tuple(x + y for x, y in zip(o.c, t)), o.r)


# -- parameters and snapping --------------------------------------------------

@dataclass(frozen=True)
class ConstructionParams:
    eps: float             # main perturbation; for balls3eps the radius band is [1, 1+eps]
    eps1: float            # eps'
    eps2: float = 0.0      # eps'' (3D variant)
    grid: float = 0.0      # snapping grid; 0 disables snapping
    schedule: str = "cubic"
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.eps1 < self.eps:
            raise ValueError(f"need 0 < eps' < eps, got eps={self.eps}, eps'={self.eps1}")


def cubic_params(m: int, scale: float = 1.0) -> ConstructionParams:
    """The 1/(100m^3), 1/(100m^4), 1/(100m^5) schedule.

    m is counted as at least 2; at m = 1 the first two values coincide.
    """
    m = max(m, 2)
    return ConstructionParams(scale / (100 * m**3), scale / (100 * m**4),
                              grid=scale / (100 * m**5), schedule="cubic")


def _snap_value(x: float, grid: float) -> float:
    return round(x / grid) * grid


def snap_instance(inst: GeometricInstance, grid: float) -> GeometricInstance:
    """Round every coordinate and size parameter to the grid (angles are left alone)."""
    if grid <= 0:
        return inst
    out = []
    for o in inst.objects:
        if isinstance(o, Ball):
            out.append(Ball(tuple(_snap_value(x, grid) for x in o.c), _snap_value(o.r, grid)))
        elif isinstance(o, Triangle):
            out.append(Triangle(tuple((_snap_value(x, grid), _snap_value(y, grid)) for x, y in o.p)))
        else:
            out.append(Ellipse((_snap_value(o.c[0], grid), _snap_value(o.c[1], grid)),
                               _snap_value(o.a, grid), _snap_value(o.b, grid), o.theta))
    return GeometricInstance(tuple(out), inst.labels)


def _snap_verified(inst, expected, grid, what, refinements=30):
    """Snap and re-verify; halve the grid until the snapped gadget keeps at least
    half of its unsnapped margin."""
    want = max(MARGIN_FACTOR * DEFAULT_TOL, 0.5 * verify_realization(inst, expected).min_slack)
    report = None
    for _ in range(refinements + 1):
        snapped = snap_instance(inst, grid)
        report = verify_realization(snapped, expected)
        if report.equal and report.min_slack >= want:
            return snapped, report, grid
        grid /= 2
    _require(report, f"{what} after snapping")
    raise GadgetError(f"{what}: snapping keeps only {report.min_slack:.3g} of margin", report.tightest)


# -- 4D unit balls -------------------------------------------------------------

SQ3 = math.sqrt(3.0)


def _arc(n, spread):
    if n == 1:
        return [0.0]
    return [(i - (n - 1) / 2) * spread / (n - 1) for i in range(n)]


def _balls4_objects(n, edges, eps, eps1, spread):
    m = max(len(edges), 1)
    R = SQ3 - eps
    dirs = [(math.cos(f), math.sin(f)) for f in _arc(n, spread)]
    objs = [Ball((0.0, 0.0, R * c, R * s), 1.0) for c, s in dirs]
    push = eps + eps1
    for k, (u, v) in enumerate(edges):
        th = (k + 0.5) * math.pi / m
        px, py = math.cos(th), math.sin(th)
        # p+ moves away from p(u), p- away from p(v)
        objs.append(Ball((px, py, -push * dirs[u][0], -push * dirs[u][1]), 1.0))
        objs.append(Ball((-px, -py, -push * dirs[v][0], -push * dirs[v][1]), 1.0))
    return objs


def _balanced_candidates(n, m):
    m = max(m, 1)
    for spread in (math.radians(60), math.radians(45), math.radians(30)):
        gap = spread / (n - 1) if n > 1 else spread
        for a in (0.5, 0.35, 0.2):
            eps = a * math.sin(math.pi / (2 * m)) / max(math.sin(spread / 2), 1e-3)
            eps = min(eps, 0.25)
            for b in (0.5, 0.3):
                yield eps, b * eps * (1 - math.cos(gap)) / math.cos(gap), spread


def _search(build, candidates, expected, what, first=False):
    """Keep the candidate whose verified slack is largest (or the first that clears
    the margin when `first`)."""
    best = None
    for cand in candidates:
        try:
            inst = build(cand)
        except GadgetError:
            continue
        rep = verify_realization(inst, expected)
        if rep.equal and (best is None or rep.min_slack > best[1].min_slack):
            best = (inst, rep, cand)
            if first and rep.min_slack > MARGIN_FACTOR * DEFAULT_TOL:
                break
    if best is None:
        raise GadgetError(f"{what}: no candidate parameter set verified")
    _require(best[1], what)
    return best


# -- 3D balls with radii in [1, 1+eps] ----------------------------------------

def _balls3_objects(n, edges, eps, H, kappa, nu):
    """Envelope design: originals on the z-axis, edge balls on a cylinder-like shell.

    An edge ball at cylindrical (rho, theta, h) with radius rho - nu meets the
    original at height z_w with radius c_w + nu iff rho >= P_w(h) where
    P_w(h) = ((h - z_w)^2 - c_w^2) / (2 c_w). The P_w are made tangent from
    below to one convex profile Phi, each at its own height h_w; an edge ball
    that must avoid original u sits just inside Phi at h_u.
    """
    m = max(len(edges), 1)
    rho0 = c0 = 1 + eps / 2
    sigma = -math.sqrt(1 + 2 * rho0 / c0)
    K = 1 / c0 + kappa

    def phi(h):
        return rho0 + sigma * h + K * h * h / 2

    def dphi(h):
        return sigma + K * h

    hs = [0.0] if n == 1 else [-H + 2 * H * i / (n - 1) for i in range(n)]
    cs = [2 * phi(h) / (dphi(h) ** 2 - 1) for h in hs]
    zs = [h - c * dphi(h) for h, c in zip(hs, cs)]

    def P(w, h):
        return ((h - zs[w]) ** 2 - cs[w] ** 2) / (2 * cs[w])

    rho = []
    for i, h in enumerate(hs):
        gaps = [phi(h) - P(w, h) for w in range(n) if w != i]
        g = min(gaps) if gaps else 2 * nu
        rho.append(phi(h) - g / 2)
    objs = [Ball((0.0, 0.0, z), c + nu) for z, c in zip(zs, cs)]
    for k, (u, v) in enumerate(edges):
        th = (k + 0.5) * math.pi / m
        ct, st = math.cos(th), math.sin(th)
        ru, rv = rho[u], rho[v]
        objs.append(Ball((ru * ct, ru * st, hs[u]), ru - nu))
        objs.append(Ball((-rv * ct, -rv * st, hs[v]), rv - nu))
    return objs


def _balls3_candidates(eps):
    for H in (0.25 * eps, 0.15 * eps, 0.08 * eps):
        for kappa in (0.6, 0.4, 0.25):
            for nu in (1e-4 * eps, 5e-5 * eps, 2e-5 * eps):
                yield H, kappa, nu


def _radii_in_band(objs, eps):
    return all(1.0 - 1e-12 <= o.r <= 1.0 + eps + 1e-12 for o in objs)


# -- filled triangles -------------------------------------------------------------

def _line_meet(l1, l2):
    # lines y = s x + t
    (s1, t1), (s2, t2) = l1, l2
    x = (t2 - t1) / (s1 - s2)
    return (x, s1 * x + t1)


def _triangle_objects(n, edges, a, sigma_frac, scale):
    m = max(len(edges), 1)
    eps = math.atan(a) / (4 * m)
    sigma = eps * sigma_frac
    apex = (n + 1.0, 0.0)
    far_left = -(n * n + 1.0)
    far_right = 100.0 * n * n
    objs = []
    for i in range(1, n + 1):
        objs.append(((i, a * i * i), (i, -a * i * i), apex))
    for k, (u, v) in enumerate(edges):
        i, j = u + 1, v + 1
        tk = math.tan(eps * (k + 1))
        # Delta+: above the lowered chord of p_i and above h+_k
        chord = (2 * a * i, -a * (i * i - 0.5))
        hp = (tk, sigma)
        A = _line_meet(chord, hp)
        B = (far_right, chord[0] * far_right + chord[1])
        C = (far_left, hp[0] * far_left + hp[1])
        objs.append((A, B, C))
        # Delta-: below the raised mirrored chord of q_j and below h-_k, parallel to h+_k
        chord = (-2 * a * j, a * (j * j - 0.5))
        hm = (tk, -sigma)
        A = _line_meet(chord, hm)
        B = (far_right, chord[0] * far_right + chord[1])
        C = (far_left, hm[0] * far_left + hm[1])
        objs.append((A, B, C))
    return [Triangle(tuple((scale * x, scale * y) for x, y in t)) for t in objs]


def _triangle_candidates():
    for a in (1.0, 0.5, 2.0):
        for sf in (1 / 16, 1 / 64):
            yield a, sf


# -- filled ellipses --------------------------------------------------------------

def _oriented_line(point, direction, toward):
    """Line through `point` along `direction` as (normal, offset), positive on `toward`'s side."""
    nrm = np.array([-direction[1], direction[0]], float)
    nrm /= np.linalg.norm(nrm)
    d = float(nrm @ point)
    if nrm @ toward - d < 0:
        nrm, d = -nrm, -d
    return nrm, d


def _pencil(lam, A, L1, B, L2):
    """Conic M^2 - lam L1 L2 <= 0, tangent to L1 at A and L2 at B (M is the chord AB)."""
    (n1, d1), (n2, d2) = L1, L2
    mvec, dm = _oriented_line(A, B - A, A + (A - B))  # sign of M is irrelevant
    S = (np.outer(n1, n2) + np.outer(n2, n1)) / 2
    Q = np.outer(mvec, mvec) - lam * S
    b = -dm * mvec + lam * (d2 * n1 + d1 * n2) / 2
    c = dm * dm - lam * d1 * d2
    return Q, b, c


def _pencil_limit(A, L1, B, L2):
    # det(Q(lam)) = lam * (alpha - lam * |det S|); the ellipse range is (0, alpha/|det S|)
    def det(lam):
        return np.linalg.det(_pencil(lam, A, L1, B, L2)[0])
    d1, d2 = det(1.0), det(2.0)
    # det = a lam + c lam^2 fitted through two samples
    c = (d2 - 2 * d1) / 2
    a = d1 - c
    if c >= 0 or a <= 0:
        raise GadgetError("tangent data admits no ellipse")
    return -a / c


def ellipse_through(A, tA, B, tB, flatten=0.0, iters=80) -> Ellipse:
    """Filled ellipse tangent to the line along tA at A and along tB at B.

    The base choice is the smallest eccentricity in the pencil of such conics
    (golden-section search). `flatten` in [0, 1) moves the pencil parameter that
    fraction of the way toward the parabola limit, which flattens the ellipse
    at both tangency points.
    """
    A, B = np.asarray(A, float), np.asarray(B, float)
    L1 = _oriented_line(A, tA, B)
    L2 = _oriented_line(B, tB, A)
    top = _pencil_limit(A, L1, B, L2)

    def ratio(lam):
        w = np.linalg.eigvalsh(_pencil(lam, A, L1, B, L2)[0])
        return w[0] / w[1] if w[0] > 0 else -1.0

    lo, hi = 0.0, top
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = ratio(x1), ratio(x2)
    for _ in range(iters):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = ratio(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = ratio(x1)
    lam = (lo + hi) / 2
    lam += flatten * (top - lam)
    Q, b, c = _pencil(lam, A, L1, B, L2)
    center = -np.linalg.solve(Q, b)
    k = c + b @ center
    w, v = np.linalg.eigh(Q)
    if not (w[0] > 0 and k < 0):
        raise GadgetError("degenerate conic in the tangency pencil")
    semi = np.sqrt(-k / w)  # semi[0] belongs to the smaller eigenvalue: the major axis
    theta = math.atan2(v[1, 0], v[0, 0])
    return Ellipse((float(center[0]), float(center[1])), float(semi[0]), float(semi[1]), theta)


def _ellipse_objects(n, edges, kappa, step, sigma_frac, tilt_frac, flatten, scale):
    m = max(len(edges), 1)
    base = math.pi / 3
    P = np.array([math.sqrt(3) / 2, 0.5])
    # chain p_0..p_{n+1} on a circle of curvature kappa tangent to the unit circle about (0,1) at P
    inward = np.array([-math.sqrt(3) / 2, 0.5])
    ctr = P + inward / kappa
    pts, angs = [], []
    for i in range(n + 2):
        u = (i - (n + 1) / 2) * step
        t = base + kappa * u
        pts.append(ctr + (np.array([math.sin(t), -math.cos(t)])) / kappa)
        angs.append(t)
    sigma = sigma_frac * (kappa * kappa - 1) * step * step / 4
    eps = base / (4 * m)
    sig2 = tilt_frac * eps * eps
    disks, tplus = [], []
    for i in range(1, n + 1):
        # tangent at p_i parallel to the chord p_{i-1} p_{i+1}
        t = pts[i + 1] - pts[i - 1]
        t /= np.linalg.norm(t)
        nrm = np.array([-t[1], t[0]])  # left normal, away from the disk
        r = pts[i][1] / nrm[1]
        c = pts[i] - r * nrm
        disks.append(Ellipse((scale * float(c[0]), scale * 0.0), scale * float(r), scale * float(r), 0.0))
        tplus.append((pts[i] + sigma * nrm, t))
    flip = np.array([1.0, -1.0])
    objs = list(disks)
    for k, (u, v) in enumerate(edges):
        ang = eps * (k + 1)
        dl = np.array([math.cos(ang), math.sin(ang)])
        A, tA = tplus[u]
        up = ellipse_through(A, tA, np.array([0.0, sig2]), dl, flatten)
        A, tA = tplus[v]
        down = ellipse_through(A * flip, tA * flip, np.array([0.0, -sig2]), dl, flatten)
        for e in (up, down):
            objs.append(Ellipse((scale * e.c[0], scale * e.c[1]), scale * e.a, scale * e.b, e.theta))
    return objs


def _ellipse_candidates():
    # plain minimum eccentricity first, then flatter members of the pencil
    for flatten in (0.0, 0.5, 0.8):
        for kappa, step, sf in ((4.0, 0.01, 0.1), (3.0, 0.02, 0.05), (6.0, 0.01, 0.05)):
            yield kappa, step, sf, 1 / 16, flatten


# -- public entry point ---------------------------------------------------------------

TRIANGLE_SCALE = ELLIPSE_SCALE = 1000.0


@dataclass
class Realization:
    co2: Co2Subdivision
    instance: GeometricInstance
    report: RealizationReport
    params: ConstructionParams
    target: str


def parse_target(target: str, eps: float | None = None):
    """Accept 'balls4', 'balls3eps', 'balls3eps(0.2)', 'balls3', 'triangles', 'ellipses'."""
    t = target.strip().lower()
    if t.startswith("balls3eps(") and t.endswith(")"):
        eps = float(t[len("balls3eps("):-1])
        t = "balls3eps"
    if t == "balls3":
        t = "balls3eps"
    if t not in TARGETS:
        raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")
    if t == "balls3eps":
        eps = 0.2 if eps is None else eps
        if not 0 < eps <= 1:
            raise ValueError(f"balls3eps needs 0 < eps <= 1, got {eps}")
    return t, eps


def _labels(co: Co2Subdivision):
    out = []
    for kind, i in co.roles:
        out.append(f"v{i}" if kind == "orig" else f"e{i}{'+' if kind == 'plus' else '-'}")
    return tuple(out)


def _with_labels(objs, co):
    return GeometricInstance(tuple(objs), _labels(co))


def realize(g: Graph, target: str = "balls4", eps: float | None = None,
            params: ConstructionParams | None = None, snap: bool = True,
            strategy: str = "auto") -> Realization:
    """Realize the co-2-subdivision of g and verify it, snapped to the grid.

    strategy: 'auto' tries the cubic 1/(100m^3) schedule first where one exists and falls
    back to the searched schedule; 'cubic' and 'balanced' force one of them.
    `params.aux['candidate']` pins the target-specific parameters.
    """
    target, eps = parse_target(target, eps)
    co = co2subdivision(g)
    n, edges, m = g.n, co.edges, max(co.m, 1)
    expected = co.graph
    if n == 0:
        empty = GeometricInstance(())
        pp = cubic_params(m)
        return Realization(co, empty, verify_realization(empty, expected), pp, target)
    pinned = params.aux.get("candidate") if params is not None else None

    if target == "balls4":
        def build(c):
            return _with_labels(_balls4_objects(n, edges, *c), co)
        found, schedule = None, "balanced"
        if pinned:
            found = _search(build, [tuple(pinned)], expected, "balls4")
            schedule = "pinned"
        elif strategy in ("auto", "cubic") and co.m >= 2:
            pp = cubic_params(co.m)
            try:
                found = _search(build, [(pp.eps, pp.eps1, math.radians(60))], expected, "balls4 (cubic schedule)")
                schedule = "cubic"
            except GadgetError:
                if strategy == "cubic":
                    raise
        if found is None:
            found = _search(build, _balanced_candidates(n, co.m), expected, "balls4")
        inst, rep, cand = found
        pp = ConstructionParams(cand[0], cand[1], grid=1 / (100 * m**5), schedule=schedule,
                                aux={"candidate": list(cand), "arc": cand[2]})
    elif target == "balls3eps":
        def build(c):
            objs = _balls3_objects(n, edges, eps, *c)
            if not _radii_in_band(objs, eps):
                raise GadgetError("radius left the band [1, 1+eps]")
            return _with_labels(objs, co)
        cands = [tuple(pinned)] if pinned else list(_balls3_candidates(eps))
        inst, rep, cand = _search(build, cands, expected, "balls3eps")
        H, kappa, nu = cand
        pp = ConstructionParams(eps, nu, eps2=H, grid=eps / (100 * m**5), schedule="envelope",
                                aux={"candidate": list(cand), "H": H, "kappa": kappa, "nu": nu})
    elif target == "triangles":
        def build(c):
            return _with_labels(_triangle_objects(n, edges, *c, TRIANGLE_SCALE), co)
        cands = [tuple(pinned)] if pinned else list(_triangle_candidates())
        inst, rep, cand = _search(build, cands, expected, "triangles", first=True)
        a, sf = cand
        ang = math.atan(a) / (4 * m)
        pp = ConstructionParams(ang, ang * sf, grid=1 / (100 * m**5), schedule="chain",
                                aux={"candidate": list(cand), "parabola": a, "scale": TRIANGLE_SCALE})
    else:
        def build(c):
            return _with_labels(_ellipse_objects(n, edges, *c, ELLIPSE_SCALE), co)
        cands = [tuple(pinned)] if pinned else list(_ellipse_candidates())
        inst, rep, cand = _search(build, cands, expected, "ellipses", first=True)
        kappa, step, sf, tf, flatten = cand
        ang = (math.pi / 3) / (4 * m)
        pp = ConstructionParams(ang, sf * (kappa * kappa - 1) * step * step / 4, eps2=tf * ang * ang,
                                grid=1 / (100 * m**5), schedule="near-disk",
                                aux={"candidate": list(cand), "chain_curvature": kappa, "chain_step": step,
                                     "flatten": flatten, "scale": ELLIPSE_SCALE})
    if params is not None and params.grid > 0:
        pp = replace(pp, grid=params.grid)
    if snap and pp.grid > 0:
        inst, rep, grid = _snap_verified(inst, expected, pp.grid, target)
        pp = replace(pp, grid=grid)
    return Realization(co, inst, rep, pp, target)


def realize_co2subdivision(g: Graph, target: str = "balls4", params: ConstructionParams | None = None,
                           eps: float | None = None, snap: bool = True) -> GeometricInstance:
    return realize(g, target, eps, params, snap).instance


# -- complements of cycle unions as disks ------------------------------------------------

def cycle_union_complement(lengths) -> Graph:
    """Complement of the disjoint union of cycles, vertices numbered cycle by cycle."""
    n = sum(lengths)
    non = set()
    off = 0
    for L in lengths:
        for i in range(L):
            a, b = off + i, off + (i + 1) % L
            non.add((min(a, b), max(a, b)))
        off += L
    return Graph.from_edges(n, [p for p in combinations(range(n), 2) if p not in non])


def _unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def _circle_meet(a, ra, b, rb):
    a, b = np.asarray(a, float), np.asarray(b, float)
    d = np.linalg.norm(b - a)
    t = (ra * ra - rb * rb + d * d) / (2 * d)
    h = math.sqrt(max(ra * ra - t * t, 0.0))
    u = (b - a) / d
    mid = a + t * u
    perp = np.array([-u[1], u[0]])
    return mid + h * perp, mid - h * perp


def _cycle_disks(s, e, sag=0.25, shift=0.5, lift=0.5, odd=False, last_radius=20.0):
    """Unit-radius skeleton for the complement of C_2s (or C_2s+1 when odd).

    D_2 and D_2s have centers e apart, D_1 sits above touching both and is then
    pulled off D_2 (and off D_2s too for even cycles). The chain p_1..p_s is a
    parabola arc from the D_1/D_2 contact to the D_1/D_2s contact, inside D_1.
    Returns (list of (center, radius) in cycle order, contact point).
    """
    y1 = math.sqrt(4 - e * e / 4)
    contact = np.array([0.0, y1 / 2])
    if s == 1:
        # C_3: D_1 above D_2, and D_3 beside both
        room = e * e / 32
        c2 = np.array([0.0, 0.0])
        c1 = np.array([0.0, 2.0 + shift * room])
        contact = np.array([0.0, 1.0])
        disks = [(c1, 1.0), (c2, 1.0)]
        evens = {1: c2}
    else:
        xs = [-e / 4 + k * (e / 2) / (s - 1) for k in range(s)]
        ys = [y1 / 2 - sag * ((e / 4) ** 2 - x * x) for x in xs]
        inner = [(0.5 - sag) * ((e / 4) ** 2 - x * x) for x in xs[1:-1]]
        room = min(inner) if inner else (e / 4) ** 2 / 2
        evens = {1: np.array([-e / 2, 0.0]), s: np.array([e / 2, 0.0])}
        for k in range(1, s - 1):
            t = _unit((1.0, 2 * sag * xs[k]))  # tangent parallel to chord p_{k-1} p_{k+1}
            evens[k + 1] = np.array([xs[k], ys[k]]) - np.array([-t[1], t[0]])
        if odd:
            c1 = max(_circle_meet(evens[1], 2 + shift * room, evens[s], 2 - shift * room), key=lambda q: q[1])
        else:
            c1 = np.array([0.0, y1 + shift * room])
        disks = [(c1, 1.0)] + [None] * (2 * s - 1)
        for k in range(1, s + 1):
            disks[2 * k - 1] = (evens[k], 1.0)
        for k in range(1, s):
            a, b = evens[k], evens[k + 1]
            t = _unit(b - a)
            nrm = np.array([-t[1], t[0]])
            if nrm[1] < 0:
                nrm = -nrm
            base = a + nrm  # the upper common tangent of two unit disks
            mx = (xs[k - 1] + xs[k]) / 2
            touch = base + (mx - base[0]) / t[0] * t + lift * room * nrm
            need = 1.0
            for j, cj in evens.items():
                if j in (k, k + 1):
                    continue
                h = float(nrm @ (cj - touch))
                if 1 + h <= 0:
                    raise GadgetError(f"even disk {2 * j} does not cross the co-tangent {2 * k},{2 * k + 2}")
                need = max(need, (float((touch - cj) @ (touch - cj)) - 1) / (2 * (1 + h)))
            rho = 1.01 * need  # minimal radius reaching every other even disk, plus 1%
            disks[2 * k] = (touch + rho * nrm, rho)
    if odd:
        # last disk: cotangent to D_1 and D_2s from the left, then nudged further left
        cs = evens[s]
        c1 = disks[0][0]
        cl = min(_circle_meet(c1, 1 + last_radius, cs, 1 + last_radius), key=lambda q: q[0])
        disks.append((cl - np.array([shift * room, 0.0]), last_radius))
    return disks, contact


def _rotate(p, about, ang):
    c, s = math.cos(ang), math.sin(ang)
    d = p - about
    return about + np.array([c * d[0] - s * d[1], s * d[0] + c * d[1]])


def realize_co_cycles_disks(evens, odd=None, sep=1e-3, odd_scale=0.05, odd_angle=60.0,
                            target_slack=1e-3) -> GeometricInstance:
    """Disks whose intersection graph is the complement of the union of the given cycles.

    Even cycles share one skeleton and are stacked by rotating about the common
    contact point; the odd cycle is shrunk by `odd_scale` and rotated by
    `odd_angle` degrees. Everything is then scaled by a power of two until the
    verified slack reaches `target_slack`.
    """
    evens = list(evens)
    if isinstance(odd, (list, tuple)):
        if len(odd) > 1:
            raise ValueError("at most one odd cycle: the complement of two odd cycles is not a disk graph")
        odd = odd[0] if odd else None
    for L in evens:
        if L < 4 or L % 2:
            raise ValueError(f"even cycle lengths must be even and at least 4, got {L}")
    if odd is not None and (odd < 3 or odd % 2 == 0):
        raise ValueError(f"odd cycle length must be odd and at least 3, got {odd}")
    lengths = evens + ([odd] if odd else [])
    expected = cycle_union_complement(lengths)
    if not lengths:
        return GeometricInstance(())
    disks, X = [], None
    step = math.radians(60.0) / (len(evens) + 1)
    for j, L in enumerate(evens):
        ds, X = _cycle_disks(L // 2, sep)
        disks += [(_rotate(c, X, j * step), r) for c, r in ds]
    if odd:
        ds, Xo = _cycle_disks((odd - 1) // 2, sep, odd=True)
        anchor = X if X is not None else Xo
        for c, r in ds:
            q = anchor + odd_scale * (c - Xo)
            disks.append((_rotate(q, anchor, math.radians(odd_angle) if evens else 0.0), odd_scale * r))
    labels = tuple(f"c{ci}.{i}" for ci, L in enumerate(lengths) for i in range(L))

    def inst_at(scale):
        return GeometricInstance(tuple(Ball((float(scale * c[0]), float(scale * c[1])), float(scale * r))
                                       for c, r in disks), labels)

    inst = inst_at(1.0)
    rep = verify_realization(inst, expected)
    if not rep.equal:
        _require(rep, "cycle-union disks")
    if rep.min_slack < target_slack:
        k = math.ceil(math.log2(target_slack / rep.min_slack))
        inst = inst_at(2.0 ** k)
        rep = verify_realization(inst, expected)
    _require(rep, "cycle-union disks")
    return inst
