"""Measures attached to endomorphisms, the punctured-curve measure, and the
canonical measure, with closed forms for trees and bananas.

Conventions: a matrix F on H_1 is given in the h1 basis with columns as
images, F(gamma_j) = sum_i F[i][j] gamma_i.  The pairing <e, c> of an edge
with a cycle is read as the multiplicity e*(c), so that the mass of mu_F is
Tr(F|H_1) + (1/2) sum_v tr_v.
"""
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import homology
from .graph import GraphError
from .harmonic import PPMeasure, edge_complement_resistance
from .linalg import frac


@dataclass
class EndomorphismData:
    h1_matrix: list
    vertex_traces: dict = field(default_factory=dict)

    def __post_init__(self):
        # exact entries only; floats are rejected by frac
        self.h1_matrix = [[frac(x) for x in row] for row in self.h1_matrix]
        self.vertex_traces = {v: frac(x) for v, x in self.vertex_traces.items()}

    @classmethod
    def from_dict(cls, d):
        M = [[frac(x) for x in row] for row in d.get("h1_matrix", [])]
        tr = {v: frac(x) for v, x in d.get("vertex_traces", {}).items()}
        return cls(M, tr)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def identity(cls, G):
        b = G.betti()
        return cls([[Fraction(int(i == j)) for j in range(b)] for i in range(b)], {})

    def trace_h1(self):
        return sum((self.h1_matrix[i][i] for i in range(len(self.h1_matrix))), Fraction(0))

    def total_trace(self):
        """Trace on the whole of H_1 of the curve: H_1 and H^1 of the graph each
        contribute Tr(F_H1), every vertex its own trace."""
        return 2 * self.trace_h1() + sum(self.vertex_traces.values(), Fraction(0))

    def check(self, G):
        b = G.betti()
        if len(self.h1_matrix) != b or any(len(r) != b for r in self.h1_matrix):
            raise GraphError(f"h1 matrix must be {b}x{b}")
        for v in self.vertex_traces:
            if v not in G.genus:
                raise GraphError(f"unknown vertex {v}")

    def apply(self, c):
        b = len(c)
        return [sum((self.h1_matrix[i][j] * c[j] for j in range(b)), Fraction(0)) for i in range(b)]


def _projection_coords(G, eid):
    cyc, _ = homology.orth_decompose(G, {eid: Fraction(1)})
    return homology.coords(G, cyc)


def mu_f(G, F):
    F.check(G)
    edges = {}
    for e in G.edges:
        es = homology.e_star(G, e)
        img = F.apply(_projection_coords(G, e))
        d = sum((a * b for a, b in zip(es, img)), Fraction(0)) / G.length(e)
        if d:
            edges[e] = [d]
    verts = {v: t / 2 for v, t in F.vertex_traces.items() if t}
    return PPMeasure(G, edges, verts)


def mu_f_tree(G, F):
    """On a tree only the vertex traces contribute."""
    if G.betti():
        raise GraphError("not a tree")
    return PPMeasure(G, {}, {v: t / 2 for v, t in F.vertex_traces.items() if t})


def _banana_densities(G, F, sign, length):
    """Densities from the banana closed form for edges oriented by `sign`
    out of a common vertex, with lengths `length`."""
    nu = sum((1 / length[e] for e in sign), Fraction(0))
    out = {}
    for e in sign:
        chain = {}
        for e2 in sign:
            chain[e2] = chain.get(e2, 0) - sign[e2] / (nu * length[e2])
        chain[e] = chain.get(e, 0) + sign[e]
        proj = homology.coords(G, chain)
        es = homology.e_star(G, e)
        d = sum((a * b for a, b in zip(es, F.apply(proj))), Fraction(0)) * sign[e] / length[e]
        out[e] = d
    return out


def mu_f_banana(G, F):
    """Closed form on a banana graph: two vertices, no loops."""
    F.check(G)
    if len(G.genus) != 2 or any(G.is_loop(e) for e in G.edges):
        raise GraphError("not a banana graph")
    u = min(G.genus)
    sign = {e: (1 if G.edges[e].src == u else -1) for e in G.edges}
    dens = _banana_densities(G, F, sign, {e: G.length(e) for e in G.edges})
    verts = {v: t / 2 for v, t in F.vertex_traces.items() if t}
    return PPMeasure(G, {e: [d] for e, d in dens.items() if d}, verts)


def mu_f_higher_banana(G, F):
    """Closed form for two vertices joined through genus-0 midpoints.

    Each path v1 - w - v2 made of two edges of equal length plays the role of
    one banana edge of twice the length; both halves carry its density.
    """
    F.check(G)
    mids = [w for w in G.genus if G.genus[w] == 0 and len(G.out_darts(w)) == 2
            and not G.halves_at(w)]
    ends = sorted(set(G.genus) - set(mids))
    if len(ends) != 2:
        raise GraphError("not a higher-genus banana")
    u = ends[0]
    sign, length, halves = {}, {}, {}
    for w in sorted(mids):
        ds = G.out_darts(w)
        es = [d[0] for d in ds]
        la = {G.length(e) for e in es}
        if len(la) != 1:
            raise GraphError("paths must have equal halves")
        # orient each path u -> w -> other end via the edge at u
        first = next(e for e in es if u in (G.edges[e].src, G.edges[e].dst))
        s = 1 if G.edges[first].src == u else -1
        sign[first] = s
        length[first] = 2 * G.length(first)
        halves[first] = [e for e in es if e != first]
    # the chain of a path is first + second; project through both
    nu = sum((1 / length[e] for e in sign), Fraction(0))
    edges = {}
    for e in sign:
        chain = {}
        for e2 in sign:
            for piece in [e2] + halves[e2]:
                o = _orient_along(G, e2, piece, sign[e2])
                chain[piece] = chain.get(piece, 0) - o / (nu * length[e2])
        for piece in [e] + halves[e]:
            chain[piece] = chain.get(piece, 0) + _orient_along(G, e, piece, sign[e])
        proj = homology.coords(G, chain)
        img = F.apply(proj)
        for piece in [e] + halves[e]:
            o = _orient_along(G, e, piece, sign[e])
            es = homology.e_star(G, piece)
            # e'*(F pi(e')) on the long edge, split evenly over the two halves
            d = sum((a * b for a, b in zip(es, img)), Fraction(0)) * o / length[e]
            if d:
                edges[piece] = [d]
    verts = {v: t / 2 for v, t in F.vertex_traces.items() if t}
    return PPMeasure(G, edges, verts)


def _orient_along(G, first, piece, s):
    """Sign of `piece` when traversing the path that starts with `first` in direction s."""
    if piece == first:
        return s
    e1 = G.edges[first]
    mid = e1.dst if s == 1 else e1.src
    return 1 if G.edges[piece].src == mid else -1


# canonical measure and the punctured case

def canonical_measure(G):
    """Zhang's canonical measure; vertex valence counts edges only."""
    verts = {}
    for v in G.genus:
        m = 1 - Fraction(edge_valence(G, v), 2)
        if m:
            verts[v] = m
    edges = {}
    for e in G.edges:
        R = edge_complement_resistance(G, e)
        if R is None:
            continue
        edges[e] = [1 / (G.length(e) + R)]
    return PPMeasure(G, edges, verts)


def edge_valence(G, v):
    return sum(2 if G.is_loop(e) else 1 for e in G.edges if v in (G.edges[e].src, G.edges[e].dst))


def graph_canonical_divisor(G):
    """K = sum_v (2 g(v) + val(v) - 2) v with edge valence."""
    return {v: 2 * g + edge_valence(G, v) - 2 for v, g in G.genus.items()}


def mu_z(G, e0=None):
    """Returns (mu_Z, identity holds) for a graph with exactly one half-edge."""
    if len(G.half_edges) != 1:
        raise GraphError("need exactly one half-edge")
    h = next(iter(G.half_edges))
    if e0 is not None and e0 != h:
        raise GraphError(f"unknown half-edge {e0}")
    edges = {}
    for e in G.edges:
        d = _projection_coords(G, e)
        es = homology.e_star(G, e)
        c = sum((a * b for a, b in zip(es, d)), Fraction(0)) / G.length(e)
        if c:
            edges[e] = [c]
    verts = {v: Fraction(g) for v, g in G.genus.items() if g}
    gX = G.total_genus()
    mz = PPMeasure(G, edges, verts, {h: Fraction(-gX)} if gX else {})
    K = graph_canonical_divisor(G)
    rhs = canonical_measure(G) + PPMeasure(G, {}, {v: Fraction(k, 2) for v, k in K.items()},
                                           {h: Fraction(-gX)})
    return mz, mz == rhs


def zhang_resistance_identity(G):
    """Edges where r (R + l) != R l; r is the resistance between the ends of e."""
    from .harmonic import divisor_height_vertices
    bad = []
    for e in G.edges.values():
        R = edge_complement_resistance(G, e.id)
        if R is None:
            continue
        D = {e.dst: Fraction(1), e.src: Fraction(-1)} if e.src != e.dst else {}
        r = divisor_height_vertices(G, D, D) if D else Fraction(0)
        if r * (R + e.length) != R * e.length:
            bad.append(e.id)
    return bad


# the weight-2 functional

def weight2_functional(K, F, half_values=None):
    """The functional on weight 2 induced by F, as a function on A_2 coordinates.

    [gamma_j, xi_k] -> F[k][j]; sum_k [beta'_k, beta_k] at v -> tr_v / 2;
    logdelta_h -> half_values[h] (default 0).
    """
    alg = K.alg
    half_values = half_values or {}
    b = alg.betti
    val = {}
    for k in range(b):
        for j in range(b):
            c = F.h1_matrix[k][j] / 2
            val[(alg.h1_start + j, k)] = c
            val[(k, alg.h1_start + j)] = -c
    for v, bi, bpi in alg.beta_pairs:
        t = F.vertex_traces.get(v, Fraction(0)) / (4 * alg.G.genus[v])
        val[(bpi, bi)] = t
        val[(bi, bpi)] = -t
    for h, i in alg.logdelta.items():
        val[(i,)] = Fraction(half_values.get(h, 0))
    Q = K.A(2)
    basis_vals = []
    for k in range(Q.dim):
        p = Q.basis_poly(k)
        basis_vals.append(sum((c * val.get(w, 0) for w, c in p.items()), Fraction(0)))

    def phi(x):
        if not hasattr(x, "c"):
            return Fraction(0)
        return sum((a * b for a, b in zip(x, basis_vals)), Fraction(0))
    return phi


def mu2_image(K, F, half_values=None):
    phi = weight2_functional(K, F, half_values)
    return K.mu_ambient(2).map(phi)
