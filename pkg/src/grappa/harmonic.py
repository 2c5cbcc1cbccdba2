"""Laplacians, piecewise-polynomial measures and functions, height pairings.

Polynomials are coefficient lists (constant term first) in the arc-length
variable of an edge's stored orientation.  Coefficients may be Fractions or
:class:`~grappa.linalg.Vec` values; everything here is linear in them, so the
same code handles vector-valued measures.
"""
from fractions import Fraction
from math import comb

from . import linalg
from .graph import GraphError, GraphPoint, ReductionGraph, subdivide_many, lift_point
from .linalg import Vec, is_zero


class MassError(ValueError):
    pass


# polynomial helpers

def pnorm(p):
    p = list(p)
    while p and is_zero(p[-1]):
        p.pop()
    return p


def padd(p, q):
    n = max(len(p), len(q))
    return pnorm([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pneg(p):
    return [-c for c in p]


def psub(p, q):
    return padd(p, pneg(q))


def pscale(c, p):
    return pnorm([c * x for x in p])


def pderiv(p):
    return pnorm([i * p[i] for i in range(1, len(p))])


def pantideriv(p):
    return pnorm([0] + [p[i] * Fraction(1, i + 1) for i in range(len(p))]) if p else []


def peval(p, s):
    out = 0
    for c in reversed(p):
        out = out * s + c
    return out


def pshift(p, a):
    """q(s) = p(s + a)."""
    out = [0] * len(p)
    for i, c in enumerate(p):
        for k in range(i + 1):
            out[k] = out[k] + c * (comb(i, k) * a ** (i - k))
    return pnorm(out)


def preflect(p, l):
    """q(s) = p(l - s)."""
    out = [0] * len(p)
    for i, c in enumerate(p):
        for k in range(i + 1):
            out[k] = out[k] + c * (comb(i, k) * l ** (i - k) * (-1) ** k)
    return pnorm(out)


def pmul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return pnorm(out)


def pintegral(p, a, b):
    P = pantideriv(p)
    return peval(P, b) - peval(P, a)


def pdegree(p):
    return len(pnorm(p)) - 1


# measures and functions

class PPMeasure:
    """Polynomial densities on edges, masses at vertices and half-edges."""

    def __init__(self, G, edges=None, vertices=None, halves=None):
        self.G = G
        self.edges = {e: pnorm(p) for e, p in (edges or {}).items()}
        self.edges = {e: p for e, p in self.edges.items() if p}
        self.vertices = {v: c for v, c in (vertices or {}).items() if not is_zero(c)}
        self.halves = {h: c for h, c in (halves or {}).items() if not is_zero(c)}

    def density(self, dart):
        e, s = dart
        p = self.edges.get(e, [])
        return p if s == 1 else preflect(p, self.G.length(e))

    def total_mass(self):
        m = 0
        for e, p in self.edges.items():
            m = m + pintegral(p, 0, self.G.length(e))
        for c in self.vertices.values():
            m = m + c
        for c in self.halves.values():
            m = m + c
        return m

    def _combine(self, other, sign):
        edges = dict(self.edges)
        for e, p in other.edges.items():
            edges[e] = padd(edges.get(e, []), pscale(sign, p))
        verts = dict(self.vertices)
        for v, c in other.vertices.items():
            verts[v] = verts.get(v, 0) + sign * c
        halves = dict(self.halves)
        for h, c in other.halves.items():
            halves[h] = halves.get(h, 0) + sign * c
        return PPMeasure(self.G, edges, verts, halves)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def scale(self, c):
        return self.map(lambda x: c * x)

    def map(self, fn):
        return PPMeasure(self.G, {e: [fn(c) for c in p] for e, p in self.edges.items()},
                         {v: fn(c) for v, c in self.vertices.items()},
                         {h: fn(c) for h, c in self.halves.items()})

    def coordinate(self, i):
        return self.map(lambda x: x[i])

    def is_zero(self):
        return not (self.edges or self.vertices or self.halves)

    def __eq__(self, other):
        return (self - other).is_zero()

    def embed(self, G2):
        """Transport to a subdivision produced by subdivide_many."""
        if G2 is self.G:
            return self
        parent, cuts = G2._parent
        edges, verts, halves = {}, dict(self.vertices), dict(self.halves)
        for e, p in self.edges.items():
            if e not in cuts:
                edges[e] = p
                continue
            marks = [Fraction(0)] + sorted(cuts[e])
            for i, a in enumerate(marks):
                edges[f"{e}.{i}"] = pshift(p, a)
        return PPMeasure(G2, edges, verts, halves)

    def to_dict(self):
        ser = _ser
        return {
            "edges": [{"id": e, "density": [ser(c) for c in p]} for e, p in sorted(self.edges.items())],
            "vertices": [{"id": v, "mass": ser(c)} for v, c in sorted(self.vertices.items())],
            "half_edges": [{"id": h, "mass": ser(c)} for h, c in sorted(self.halves.items())],
        }

    def __repr__(self):
        return f"PPMeasure({self.to_dict()})"


def _ser(c):
    if isinstance(c, Vec):
        return [str(x) for x in c]
    return str(Fraction(c))


def measure_from_dict(G, d):
    f = linalg.frac
    return PPMeasure(G, {x["id"]: [f(c) for c in x["density"]] for x in d.get("edges", [])},
                     {x["id"]: f(x["mass"]) for x in d.get("vertices", [])},
                     {x["id"]: f(x["mass"]) for x in d.get("half_edges", [])})


def point_mass(G, v, c=Fraction(1)):
    if v in G.half_edges:
        return PPMeasure(G, halves={v: c})
    return PPMeasure(G, vertices={v: c})


class OmegaLogFunction:
    """Continuous piecewise-polynomial function, affine on half-edges."""

    def __init__(self, G, edges=None, halves=None, vertices=None):
        self.G = G
        self.edges = {e: pnorm(p) for e, p in (edges or {}).items()}
        self.halves = {h: pnorm(p) for h, p in (halves or {}).items()}
        self._vertices = dict(vertices or {})

    def poly(self, dart):
        e, s = dart
        p = self.edges.get(e, [])
        return p if s == 1 else preflect(p, self.G.length(e))

    def vertex_value(self, v):
        if v in self._vertices:
            return self._vertices[v]
        for d in self.G.out_darts(v):
            return peval(self.poly(d), 0)
        for h in self.G.halves_at(v):
            return peval(self.halves.get(h, []), 0)
        return 0

    def __call__(self, p):
        if p.kind == "v":
            return self.vertex_value(p.ident)
        if p.kind == "e":
            return peval(self.edges.get(p.ident, []), p.dist)
        return peval(self.halves.get(p.ident, []), p.dist)

    def out_derivative(self, dart):
        return peval(pderiv(self.poly(dart)), 0)

    def __sub__(self, other):
        G = self.G
        return OmegaLogFunction(
            G, {e: psub(self.edges.get(e, []), other.edges.get(e, [])) for e in G.edges},
            {h: psub(self.halves.get(h, []), other.halves.get(h, [])) for h in G.half_edges},
            {v: self.vertex_value(v) - other.vertex_value(v) for v in G.genus})

    def add_constant(self, c):
        G = self.G
        return OmegaLogFunction(
            G, {e: padd(self.edges.get(e, []), [c]) for e in G.edges},
            {h: padd(self.halves.get(h, []), [c]) for h in G.half_edges},
            {v: self.vertex_value(v) + c for v in G.genus})

    def map(self, fn):
        G = self.G
        return OmegaLogFunction(
            G, {e: pnorm([fn(c) for c in p]) for e, p in self.edges.items()},
            {h: pnorm([fn(c) for c in p]) for h, p in self.halves.items()},
            {v: fn(self.vertex_value(v)) for v in G.genus})

    def coordinate(self, i):
        return self.map(lambda x: x[i] if isinstance(x, Vec) else 0)

    def check_continuity(self):
        for v in self.G.genus:
            val = self.vertex_value(v)
            for d in self.G.out_darts(v):
                if not is_zero(peval(self.poly(d), 0) - val):
                    return False
            for h in self.G.halves_at(v):
                if not is_zero(peval(self.halves.get(h, []), 0) - val):
                    return False
        return all(len(p) <= 2 for p in self.halves.values())

    def __eq__(self, other):
        d = self - other
        return (all(not p for p in d.edges.values()) and all(not p for p in d.halves.values())
                and all(is_zero(d.vertex_value(v)) for v in self.G.genus))


# Laplacian matrix and divisors

def laplacian_matrix(G):
    """Rows/columns indexed by G.vertices (sorted ids)."""
    idx = {v: i for i, v in enumerate(G.genus)}
    n = len(idx)
    L = [[Fraction(0)] * n for _ in range(n)]
    for e in G.edges.values():
        if e.src == e.dst:
            continue
        a, b = idx[e.src], idx[e.dst]
        w = 1 / e.length
        L[a][a] += w
        L[b][b] += w
        L[a][b] -= w
        L[b][a] -= w
    return L


def _grounded_inverse(G):
    if "lap_inv" not in G._cache:
        L = laplacian_matrix(G)
        red = [row[1:] for row in L[1:]]
        G._cache["lap_inv"] = linalg.inverse(red) if red else []
    return G._cache["lap_inv"]


def solve_divisor(G, D):
    """A potential Phi with Laplacian-matrix action equal to D (degree 0)."""
    verts = list(G.genus)
    deg = sum(D.values(), 0)
    if not is_zero(deg):
        raise MassError("not degree zero")
    inv = _grounded_inverse(G)
    rhs = [D.get(v, 0) for v in verts[1:]]
    phi = {verts[0]: 0}
    for i, v in enumerate(verts[1:]):
        acc = 0
        for j, r in enumerate(rhs):
            if not is_zero(r) and inv[i][j]:
                acc = acc + inv[i][j] * r
        phi[v] = acc
    return phi


def divisor_height_vertices(G, D1, D2):
    if sum(D1.values(), 0) != 0:
        raise MassError("not degree zero")
    phi = solve_divisor(G, D2)
    return sum((c * phi[v] for v, c in D1.items()), Fraction(0))


def divisor_height(G, D1, D2):
    """Height pairing of degree-zero divisors supported on rational points.

    Keys may be vertex ids or GraphPoints; the graph is subdivided as needed.
    """
    def as_points(D):
        return {(G.point(k) if isinstance(k, str) else k): c for k, c in D.items()}
    P1, P2 = as_points(D1), as_points(D2)
    G2, where = subdivide_many(G, list(P1) + list(P2))
    E1, E2 = {}, {}
    for p, c in P1.items():
        E1[where[p]] = E1.get(where[p], 0) + c
    for p, c in P2.items():
        E2[where[p]] = E2.get(where[p], 0) + c
    return divisor_height_vertices(G2, E1, E2)


def resistance(G, p, q):
    if p == q:
        return Fraction(0)
    D = {p: Fraction(1), q: Fraction(-1)}
    return divisor_height(G, D, D)


def edge_complement_resistance(G, eid):
    """R_e: resistance between the ends of e in the graph with e removed.

    None stands for infinity (e is a bridge).
    """
    e = G.edges[eid]
    if e.src == e.dst:
        return Fraction(0)
    rest = [x for x in G.edges.values() if x.id != eid]
    H = ReductionGraph(dict(G.genus), rest, {}, check=False)
    if not H.is_connected():
        return None
    return divisor_height_vertices(H, {e.dst: 1, e.src: -1}, {e.dst: 1, e.src: -1})


def affine_interpolation(G, phi):
    """F(Phi): affine on edges, constant on half-edges."""
    edges = {}
    for e in G.edges.values():
        a, b = phi[e.src], phi[e.dst]
        edges[e.id] = [a, (b - a) / e.length]
    halves = {h: [phi[v]] for h, v in G.half_edges.items()}
    return OmegaLogFunction(G, edges, halves, dict(phi))


# Laplacian operator and its inverse

def laplacian_op(G, f):
    edges = {e: pneg(pderiv(pderiv(p))) for e, p in f.edges.items()}
    verts = {}
    for v in G.genus:
        m = 0
        for d in G.out_darts(v):
            m = m - f.out_derivative(d)
        for h in G.halves_at(v):
            m = m - peval(pderiv(f.halves.get(h, [])), 0)
        verts[v] = m
    halves = {h: peval(pderiv(p), 0) for h, p in f.halves.items()}
    return PPMeasure(G, edges, verts, halves)


def inv_laplacian(G, mu, normalize_at=None):
    """A preimage of a mass-zero measure, pinned to vanish at normalize_at."""
    if not is_zero(mu.total_mass()):
        raise MassError("not mass zero")
    hfun = {}
    D = dict(mu.vertices)
    for e in G.edges.values():
        g = mu.edges.get(e.id, [])
        H2 = pantideriv(pantideriv(g))
        if H2:
            H2 = padd(H2, [0, -peval(H2, e.length) / e.length])
        hfun[e.id] = H2
        if H2:
            d0 = peval(pderiv(H2), 0)
            dl = peval(pderiv(H2), e.length)
            # vertex masses of the Laplacian of h
            D[e.src] = D.get(e.src, 0) - d0
            D[e.dst] = D.get(e.dst, 0) + dl
    for h, v in G.half_edges.items():
        lam = mu.halves.get(h, 0)
        if not is_zero(lam):
            D[v] = D.get(v, 0) + lam
    phi = solve_divisor(G, D)
    F = affine_interpolation(G, phi)
    edges = {e: psub(F.edges[e], hfun[e]) for e in G.edges}
    halves = {h: padd(F.halves[h], [0, mu.halves.get(h, 0)]) for h in G.half_edges}
    f = OmegaLogFunction(G, edges, halves, dict(phi))
    if normalize_at is None:
        normalize_at = GraphPoint("v", min(G.genus))
    return f.add_constant(-f(normalize_at))


def potential(G, b, mu):
    """x -> <x - b, mu>."""
    return inv_laplacian(G, mu, normalize_at=b)


def integrate(G, f, mu):
    total = 0
    for e, g in mu.edges.items():
        total = total + pintegral(pmul(f.edges.get(e, []), g), 0, G.length(e))
    for v, c in mu.vertices.items():
        total = total + c * f.vertex_value(v)
    for h, c in mu.halves.items():
        total = total + c * f.vertex_value(G.half_edges[h])
    return total


def measure_height(G, mu, nu):
    if not is_zero(nu.total_mass()):
        raise MassError("not mass zero")
    return integrate(G, inv_laplacian(G, mu), nu)


def with_point_masses(G, mu, masses):
    """Subdivide at the given points and add point masses there.

    Returns (G', measure on G').
    """
    G2, where = subdivide_many(G, list(masses))
    nu = mu.embed(G2) if G2 is not G else mu
    extra = {}
    for p, c in masses.items():
        extra[where[p]] = extra.get(where[p], 0) + c
    return G2, nu + PPMeasure(G2, vertices=extra)


def random_measure(G, rng, max_deg=3, den=5):
    """Random mass-zero measure with small rational coefficients."""
    def r():
        return Fraction(rng.randint(-den, den), rng.randint(1, den))
    mu = PPMeasure(G, {e: [r() for _ in range(rng.randint(0, max_deg + 1))] for e in G.edges},
                   {v: r() for v in G.genus}, {h: r() for h in G.half_edges})
    m = mu.total_mass()
    v0 = min(G.genus)
    return mu - PPMeasure(G, vertices={v0: m})
