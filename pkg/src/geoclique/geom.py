"""Geometric objects, intersection predicates and instance plumbing.

Three variants are supported: closed balls in any dimension >= 2, filled
triangles and filled ellipses in the plane. A GeometricInstance is homogeneous
and object i becomes vertex i of its intersection graph.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .graph import Graph

DEFAULT_TOL = 1e-9


class GeometryError(ValueError):
    pass


class SchemaError(ValueError):
    """Instance JSON does not match the schema; message names the field path."""


@dataclass(frozen=True)
class Ball:
    c: tuple
    r: float

    def __post_init__(self):
        if len(self.c) < 2:
            raise GeometryError("ball dimension must be at least 2")
        if not all(math.isfinite(x) for x in self.c) or not math.isfinite(self.r):
            raise GeometryError("non-finite ball coordinates")
        if self.r <= 0:
            raise GeometryError(f"radius must be positive, got {self.r}")

    @property
    def dim(self) -> int:
        return len(self.c)

    kind = "balls"


@dataclass(frozen=True)
class Triangle:
    p: tuple  # three (x, y) pairs

    def __post_init__(self):
        if len(self.p) != 3 or any(len(q) != 2 for q in self.p):
            raise GeometryError("triangle needs three planar points")
        if not all(math.isfinite(x) for q in self.p for x in q):
            raise GeometryError("non-finite triangle coordinates")
        if exact_orient(self.p[0], self.p[1], self.p[2]) == 0:
            raise GeometryError("triangle vertices are collinear")

    dim = 2
    kind = "triangles"


@dataclass(frozen=True)
class Ellipse:
    c: tuple
    a: float
    b: float
    theta: float

    def __post_init__(self):
        vals = (*self.c, self.a, self.b, self.theta)
        if len(self.c) != 2:
            raise GeometryError("ellipse center must be planar")
        if not all(math.isfinite(x) for x in vals):
            raise GeometryError("non-finite ellipse parameters")
        if not self.a >= self.b > 0:
            raise GeometryError(f"semi-axes must satisfy a >= b > 0, got a={self.a}, b={self.b}")

    dim = 2
    kind = "ellipses"


@dataclass(frozen=True)
class Contact:
    """Outcome of an intersection test.

    hit is the closed-set verdict; marginal flags |slack| < tol.
    """

    hit: bool
    slack: float
    marginal: bool

    @property
    def verdict(self) -> str:
        if self.marginal:
            return "Marginal"
        return "Yes" if self.hit else "No"


@dataclass(frozen=True)
class GeometricInstance:
    objects: tuple
    labels: tuple | None = None

    def __post_init__(self):
        if self.objects:
            kinds = {o.kind for o in self.objects}
            if len(kinds) != 1:
                raise GeometryError(f"mixed variants in instance: {sorted(kinds)}")
            dims = {o.dim for o in self.objects}
            if len(dims) != 1:
                raise GeometryError(f"mixed dimensions in instance: {sorted(dims)}")
        if self.labels is not None and len(self.labels) != len(self.objects):
            raise GeometryError("labels must match objects")

    @property
    def kind(self) -> str:
        return self.objects[0].kind if self.objects else "balls"

    @property
    def dim(self) -> int:
        return self.objects[0].dim if self.objects else 2

    def __len__(self):
        return len(self.objects)


# -- exact-ish planar helpers ------------------------------------------------

def orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


GRID_BITS = 40


def snap(x: float, bits_: int = GRID_BITS) -> float:
    return round(x * 2.0**bits_) / 2.0**bits_


def exact_orient(a, b, c) -> int:
    """Sign of the orientation of three points, computed exactly in rationals."""
    ax, ay = Fraction(a[0]), Fraction(a[1])
    v = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (Fraction(b[1]) - ay) * (Fraction(c[0]) - ax)
    return (v > 0) - (v < 0)


# -- predicates ----------------------------------------------------------------

def _ball_slack(a: Ball, b: Ball) -> float:
    return a.r + b.r - math.dist(a.c, b.c)


def _tri_slack(a: Triangle, b: Triangle) -> float:
    # minimum projected overlap over the six edge normals; negative means a
    # separating axis exists and its gap is the magnitude
    best = math.inf
    for tri in (a, b):
        for k in range(3):
            p, q = tri.p[k], tri.p[(k + 1) % 3]
            nx, ny = q[1] - p[1], p[0] - q[0]
            ln = math.hypot(nx, ny)
            nx, ny = nx / ln, ny / ln
            pa = [nx * x + ny * y for x, y in a.p]
            pb = [nx * x + ny * y for x, y in b.p]
            overlap = min(max(pa), max(pb)) - max(min(pa), min(pb))
            best = min(best, overlap)
    return best


def _ellipse_root(r0: float, z0: float, z1: float, g: float) -> float:
    n0 = r0 * z0
    s0, s1 = z1 - 1.0, (0.0 if g < 0 else math.hypot(n0, z1) - 1.0)
    s = 0.0
    for _ in range(64):
        s = 0.5 * (s0 + s1)
        if s == s0 or s == s1:
            break
        ratio0, ratio1 = n0 / (s + r0), z1 / (s + 1.0)
        gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0
        if abs(gs) < 1e-12:
            break
        if gs > 0:
            s0 = s
        else:
            s1 = s
    return s


def point_ellipse_signed_distance(e0: float, e1: float, y0: float, y1: float) -> float:
    """Signed distance from (y0, y1) to the axis-aligned ellipse with semi-axes
    e0 >= e1, negative inside. Bounded bisection on the boundary parameter."""
    y0, y1 = abs(y0), abs(y1)
    inside = (y0 / e0) ** 2 + (y1 / e1) ** 2 <= 1.0
    if y1 > 0:
        if y0 > 0:
            z0, z1 = y0 / e0, y1 / e1
            g = z0 * z0 + z1 * z1 - 1.0
            if g != 0:
                r0 = (e0 / e1) ** 2
                sbar = _ellipse_root(r0, z0, z1, g)
                x0 = r0 * y0 / (sbar + r0)
                x1 = y1 / (sbar + 1.0)
                dist = math.hypot(x0 - y0, x1 - y1)
            else:
                dist = 0.0
        else:
            dist = abs(y1 - e1)
    else:
        numer0, denom0 = e0 * y0, e0 * e0 - e1 * e1
        if numer0 < denom0:
            xde0 = numer0 / denom0
            x0 = e0 * xde0
            x1 = e1 * math.sqrt(max(0.0, 1 - xde0 * xde0))
            dist = math.hypot(x0 - y0, x1)
        else:
            dist = abs(y0 - e0)
    return -dist if inside else dist


def _ellipse_frame(e: Ellipse, p):
    ct, st = math.cos(e.theta), math.sin(e.theta)
    dx, dy = p[0] - e.c[0], p[1] - e.c[1]
    return ct * dx + st * dy, -st * dx + ct * dy


def _ellipse_slack_oneway(e1: Ellipse, e2: Ellipse) -> float:
    # map e1 to the unit disk; e2 becomes another ellipse E'. The slack is the
    # unit disk's clearance to E' measured back in e1's smallest unit.
    ct1, st1 = math.cos(e1.theta), math.sin(e1.theta)
    # linear map A = diag(1/a,1/b) R1^T ; E2' = {A(x - c1)}, x in e2
    ct2, st2 = math.cos(e2.theta), math.sin(e2.theta)
    # e2 = {c2 + R2 diag(a2,b2) u : |u| <= 1}; image: A(c2-c1) + A R2 D2 u
    cx, cy = e2.c[0] - e1.c[0], e2.c[1] - e1.c[1]
    qx = (ct1 * cx + st1 * cy) / e1.a
    qy = (-st1 * cx + ct1 * cy) / e1.b
    # M = A R2 D2 (2x2)
    r2 = ((ct2, -st2), (st2, ct2))
    m = [[0.0, 0.0], [0.0, 0.0]]
    rt = ((ct1, st1), (-st1, ct1))
    scale1 = (1 / e1.a, 1 / e1.b)
    d2 = (e2.a, e2.b)
    for i in range(2):
        for j in range(2):
            m[i][j] = scale1[i] * sum(rt[i][k] * r2[k][j] for k in range(2)) * d2[j]
    # E2' = {q + M u}; as a quadric: (x-q)^T (M M^T)^{-1} (x-q) <= 1
    s11 = m[0][0] ** 2 + m[0][1] ** 2
    s12 = m[0][0] * m[1][0] + m[0][1] * m[1][1]
    s22 = m[1][0] ** 2 + m[1][1] ** 2
    # principal axes of M M^T
    tr, det = s11 + s22, s11 * s22 - s12 * s12
    disc = math.sqrt(max(0.0, tr * tr / 4 - det))
    lam0, lam1 = tr / 2 + disc, max(tr / 2 - disc, 0.0)
    ang = 0.5 * math.atan2(2 * s12, s11 - s22)
    ea, eb = math.sqrt(lam0), math.sqrt(lam1)
    ca, sa = math.cos(ang), math.sin(ang)
    # origin relative to E2' center, in E2' principal frame
    px, py = -qx, -qy
    u0, u1 = ca * px + sa * py, -sa * px + ca * py
    sd = point_ellipse_signed_distance(ea, eb, u0, u1)
    return e1.b * (1.0 - sd)


def _ellipse_slack(a: Ellipse, b: Ellipse) -> float:
    # canonical orientation keeps the predicate symmetric bit-for-bit
    ka = (a.c, a.a, a.b, a.theta)
    kb = (b.c, b.a, b.b, b.theta)
    if kb < ka:
        a, b = b, a
    return _ellipse_slack_oneway(a, b)


def slack(a, b) -> float:
    if a.kind != b.kind:
        raise GeometryError(f"mixed variants: {a.kind} vs {b.kind}")
    if a.dim != b.dim:
        raise GeometryError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if isinstance(a, Ball):
        return _ball_slack(a, b)
    if isinstance(a, Triangle):
        return _tri_slack(a, b)
    return _ellipse_slack(a, b)


def intersects(a, b, tol: float = DEFAULT_TOL) -> Contact:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    s = slack(a, b)
    return Contact(s >= 0, s, abs(s) < tol)


def contains_point(o, p) -> bool:
    """Closed containment, used by the sampling oracles."""
    if isinstance(o, Ball):
        return math.dist(o.c, p) <= o.r
    if isinstance(o, Triangle):
        s = [orient(o.p[k], o.p[(k + 1) % 3], p) for k in range(3)]
        return min(s) >= 0 or max(s) <= 0
    u, v = _ellipse_frame(o, p)
    return (u / o.a) ** 2 + (v / o.b) ** 2 <= 1.0


# -- graphs ------------------------------------------------------------------

@dataclass
class MarginReport:
    marginal_pairs: list = field(default_factory=list)
    min_abs_slack: float = math.inf
    min_hit_slack: float = math.inf
    min_miss_slack: float = math.inf  # smallest gap of a non-intersecting pair


def build_intersection_graph(inst: GeometricInstance, tol: float = DEFAULT_TOL):
    """Intersection graph (closed semantics) and a margin report."""
    objs = inst.objects
    n = len(objs)
    rows = [0] * n
    rep = MarginReport()
    for i, j in combinations(range(n), 2):
        c = intersects(objs[i], objs[j], tol)
        if c.hit:
            rows[i] |= 1 << j
            rows[j] |= 1 << i
            rep.min_hit_slack = min(rep.min_hit_slack, c.slack)
        else:
            rep.min_miss_slack = min(rep.min_miss_slack, -c.slack)
        rep.min_abs_slack = min(rep.min_abs_slack, abs(c.slack))
        if c.marginal:
            rep.marginal_pairs.append((i, j, c.slack))
    return Graph(n, tuple(rows)), rep


def intersection_graph(inst: GeometricInstance, tol: float = DEFAULT_TOL) -> Graph:
    return build_intersection_graph(inst, tol)[0]


# -- canonical perturbations (disks) ------------------------------------------

def _require_disks(inst: GeometricInstance):
    if inst.objects and (inst.kind != "balls" or inst.dim != 2):
        raise GeometryError("operation requires a disk instance")


def _pair_slacks(objs):
    return {(i, j): _ball_slack(objs[i], objs[j]) for i, j in combinations(range(len(objs)), 2)}


def make_proper(inst: GeometricInstance, tol: float = DEFAULT_TOL) -> GeometricInstance:
    """Remove tangency-only edges by growing one disk of each tangent pair.

    A pair is tangent when it intersects with slack below tol. The first disk
    of the pair grows by half the smallest positive gap between any two disks,
    recomputed after every step so no disjoint pair can close up.
    """
    _require_disks(inst)
    objs = list(inst.objects)
    done = set()
    while True:
        sl = _pair_slacks(objs)
        tangent = [p for p, s in sorted(sl.items()) if 0 <= s < tol and p not in done]
        if not tangent:
            return GeometricInstance(tuple(objs), inst.labels)
        gaps = [-s for s in sl.values() if s < 0]
        i, j = tangent[0]
        # with no disjoint pair any growth is safe; 2*tol clears the marginal band
        grow = min(gaps) / 2 if gaps else 2 * tol + abs(sl[(i, j)])
        objs[i] = Ball(objs[i].c, objs[i].r + grow)
        done.add((i, j))


def is_proper(inst: GeometricInstance, tol: float = 0.0) -> bool:
    return all(not (0 <= s <= tol) for s in _pair_slacks(inst.objects).values())


def collinear_triples(points) -> list:
    return [t for t in combinations(range(len(points)), 3)
            if exact_orient(points[t[0]], points[t[1]], points[t[2]]) == 0]


def perturb_general_position(inst: GeometricInstance, seed: int = 0) -> GeometricInstance:
    """Move centers so no three are collinear, keeping the intersection graph.

    Coordinates are snapped to the 2^-40 grid and collinearity is decided
    exactly on the snapped values. Every center moves by less than eps/2,
    eps being the smallest |r_a + r_b - d| over all pairs.
    """
    _require_disks(inst)
    objs = list(inst.objects)
    n = len(objs)
    sl = _pair_slacks(objs)
    if any(s == 0 for s in sl.values()):
        raise GeometryError("instance is not proper (tangent pair present)")
    eps = min((abs(s) for s in sl.values()), default=math.inf)
    base_graph = intersection_graph(inst)
    if not collinear_triples([o.c for o in objs]):
        return inst
    pts = [(snap(o.c[0]), snap(o.c[1])) for o in objs]
    rng = random.Random(seed)
    radius = min(eps / 4, 1.0) if math.isfinite(eps) else 1.0
    for _ in range(4 * n + 16):
        bad = collinear_triples(pts)
        if not bad:
            break
        v = bad[0][2]
        others = [pts[k] for k in range(n) if k != v]
        for _attempt in range(1000):
            ang = rng.uniform(0, 2 * math.pi)
            rad = rng.uniform(radius / 2, radius)
            cand = (snap(objs[v].c[0] + rad * math.cos(ang)), snap(objs[v].c[1] + rad * math.sin(ang)))
            if math.dist(cand, objs[v].c) >= eps / 2:
                continue
            if all(exact_orient(p, q, cand) != 0 for p, q in combinations(others, 2)):
                pts[v] = cand
                break
        else:
            raise GeometryError("could not find a non-collinear displacement")
    if collinear_triples(pts):
        raise GeometryError("perturbation budget exhausted")
    out = GeometricInstance(tuple(Ball(p, o.r) for p, o in zip(pts, objs)), inst.labels)
    if intersection_graph(out) != base_graph:
        raise GeometryError("perturbation changed the intersection graph")
    return out


# -- generation ----------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = "disks"  # disks | balls | unit_balls | triangles | ellipses
    n: int = 10
    dim: int = 2
    box: tuple = (0.0, 10.0)
    radius: tuple = (1.0, 1.0)  # (lo, hi); unit when lo == hi == 1
    size: tuple = (0.5, 3.0)  # triangle / ellipse scale range

    def validate(self):
        if self.kind not in ("disks", "balls", "unit_balls", "triangles", "ellipses"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if self.kind == "disks" and self.dim != 2:
            raise ValueError("disks are 2-dimensional")
        if self.kind in ("triangles", "ellipses") and self.dim != 2:
            raise ValueError(f"{self.kind} are planar")
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        lo, hi = self.box
        if not lo < hi:
            raise ValueError("empty sampling box")
        if not 0 < self.radius[0] <= self.radius[1]:
            raise ValueError("bad radius range")
        if not 0 < self.size[0] <= self.size[1]:
            raise ValueError("bad size range")


def generate_instance(spec: GeneratorSpec, seed: int = 0) -> GeometricInstance:
    spec.validate()
    rng = random.Random(seed)
    lo, hi = spec.box
    objs = []
    for _ in range(spec.n):
        if spec.kind in ("disks", "balls", "unit_balls"):
            c = tuple(rng.uniform(lo, hi) for _ in range(spec.dim))
            r = 1.0 if spec.kind == "unit_balls" else rng.uniform(*spec.radius)
            objs.append(Ball(c, r))
        elif spec.kind == "triangles":
            while True:
                cx, cy = rng.uniform(lo, hi), rng.uniform(lo, hi)
                s = rng.uniform(*spec.size)
                p = tuple((cx + s * rng.uniform(-1, 1), cy + s * rng.uniform(-1, 1)) for _ in range(3))
                if abs(orient(*p)) > 1e-3 * s * s:
                    break
            objs.append(Triangle(p))
        else:
            a = rng.uniform(*spec.size)
            b = rng.uniform(spec.size[0], a) if a > spec.size[0] else a
            objs.append(Ellipse((rng.uniform(lo, hi), rng.uniform(lo, hi)), a, b, rng.uniform(0, math.pi)))
    return GeometricInstance(tuple(objs))


# -- serialization -------------------------------------------------------------

def _num(x: float) -> str:
    # 17 significant digits round-trip every binary64 value
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def _dump(obj) -> str:
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_dump(x) for x in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(k) + ":" + _dump(v) for k, v in obj.items()) + "}"
    raise TypeError(type(obj))


def instance_to_dict(inst: GeometricInstance) -> dict:
    objs = []
    for o in inst.objects:
        if isinstance(o, Ball):
            objs.append({"c": [float(x) for x in o.c], "r": float(o.r)})
        elif isinstance(o, Triangle):
            objs.append({"p": [[float(x), float(y)] for x, y in o.p]})
        else:
            objs.append({"c": [float(o.c[0]), float(o.c[1])], "a": float(o.a), "b": float(o.b), "theta": float(o.theta)})
    out = {"kind": inst.kind, "dim": inst.dim, "objects": objs}
    if inst.labels is not None:
        out["labels"] = list(inst.labels)
    return out


def save_instance(inst: GeometricInstance) -> bytes:
    return (_dump(instance_to_dict(inst)) + "\n").encode()


def _real(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}: expected a number")
    v = float(v)
    if not math.isfinite(v):
        raise SchemaError(f"{path}: non-finite value")
    return v


def _point(v, dim, path):
    if not isinstance(v, list):
        raise SchemaError(f"{path}: expected a list of {dim} numbers")
    if len(v) != dim:
        raise SchemaError(f"{path}: dimension mismatch, expected {dim} coordinates, got {len(v)}")
    return tuple(_real(x, f"{path}[{k}]") for k, x in enumerate(v))


def instance_from_dict(obj) -> GeometricInstance:
    if not isinstance(obj, dict):
        raise SchemaError("$: expected an object")
    kind = obj.get("kind")
    if kind not in ("balls", "triangles", "ellipses"):
        raise SchemaError(f"kind: expected one of balls|triangles|ellipses, got {kind!r}")
    dim = obj.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise SchemaError("dim: expected an integer >= 2")
    if kind != "balls" and dim != 2:
        raise SchemaError(f"dim: {kind} must have dim 2")
    raw = obj.get("objects")
    if not isinstance(raw, list):
        raise SchemaError("objects: expected a list")
    out = []
    for i, o in enumerate(raw):
        path = f"objects[{i}]"
        if not isinstance(o, dict):
            raise SchemaError(f"{path}: expected an object")
        try:
            if kind == "balls":
                out.append(Ball(_point(o.get("c"), dim, path + ".c"), _real(o.get("r"), path + ".r")))
            elif kind == "triangles":
                p = o.get("p")
                if not isinstance(p, list) or len(p) != 3:
                    raise SchemaError(f"{path}.p: expected three points")
                out.append(Triangle(tuple(_point(q, 2, f"{path}.p[{k}]") for k, q in enumerate(p))))
            else:
                out.append(Ellipse(_point(o.get("c"), 2, path + ".c"), _real(o.get("a"), path + ".a"),
                                   _real(o.get("b"), path + ".b"), _real(o.get("theta"), path + ".theta")))
        except GeometryError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    labels = obj.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != len(out)):
        raise SchemaError("labels: expected one label per object")
    return GeometricInstance(tuple(out), None if labels is None else tuple(labels))


def load_instance(data) -> GeometricInstance:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode()
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"$: invalid JSON ({exc})") from None
    return instance_from_dict(obj)
