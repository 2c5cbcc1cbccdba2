"""Simplifications of reduction graphs, block decomposition, cut systems,
and the weight 2 / weight 3 fiber classification.
"""
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from . import homology
from .graph import Edge, GraphPoint, ReductionGraph, GraphError, subdivide_many
from .harmonic import solve_divisor, divisor_height_vertices
from .kummer import Kummer, lie_algebra
from .lie import tadd, tmul
from .linalg import Vec, matmul


def _quiet_kummer(G, base, depth):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return Kummer(G, base=base, depth=depth)


# reductions

class Reduction:
    """A harmonic morphism G -> H given by a point map and an edge-chain map.

    ``chain[e]`` is the pushforward of the edge e as a chain on H.
    """

    def __init__(self, G, H, point_map, chain, killed_halves=(), warning=None):
        self.G, self.H = G, H
        self._point = point_map
        self.chain = chain
        self.killed_halves = set(killed_halves)
        self.warning = warning
        self._images = None

    def point(self, x):
        return self._point(x)

    def h1_matrix(self):
        """P with rho_*(gamma_j) = sum_k P[k][j] gamma'_k."""
        cols = []
        for gamma in homology.h1_basis(self.G):
            img = {}
            for e, c in gamma.items():
                for e2, a in self.chain.get(e, {}).items():
                    img[e2] = img.get(e2, 0) + c * a
            cols.append(homology.coords(self.H, img))
        bG, bH = self.G.betti(), self.H.betti()
        return [[cols[j][k] for j in range(bG)] for k in range(bH)]

    def h1dual_matrix(self):
        """Q on the H^1 generators, fixed by N-equivariance: Q = Gram_H P Gram_G^-1."""
        P = self.h1_matrix()
        if not P or not P[0]:
            return [[Fraction(0)] * self.G.betti() for _ in range(self.H.betti())]
        return matmul(matmul(homology.gram(self.H), P), homology.gram_inverse(self.G))

    def generator_images(self):
        if self._images is not None:
            return self._images
        A, B = lie_algebra(self.G), lie_algebra(self.H)
        P, Q = self.h1_matrix(), self.h1dual_matrix()
        out = {}
        for i, g in enumerate(A.gens):
            if g.kind == "estar":
                k = int(g.name.split(":")[1]) - 1
                out[i] = {(l,): Q[l][k] for l in range(B.betti) if Q[l][k]}
            elif g.kind == "h1":
                k = int(g.name.split(":")[1]) - 1
                out[i] = {(B.h1_start + l,): P[l][k] for l in range(B.betti) if P[l][k]}
            elif g.kind == "logdelta" and g.name.split(":", 1)[1] in self.killed_halves:
                out[i] = {}
            else:
                out[i] = {(B.names[g.name],): Fraction(1)}
        self._images = out
        return out

    def push_poly(self, poly):
        img = self.generator_images()
        out = {}
        for word, c in poly.items():
            term = {(): c}
            for i in word:
                term = tmul(term, img[i])
                if not term:
                    break
            out = tadd(out, term)
        return out

    def push(self, KG, KH, x, r):
        """rho_* from A_r(G) to A_r(H) on ambient coordinates."""
        if not isinstance(x, Vec):
            return Vec.zero(KH.A(r).dim)
        return KH.vec(self.push_poly(KG.A(r).element(list(x))), r)

    def check_functoriality(self, points, depth=3, base=None):
        """Pairs (x, r) where rho_* j_G(x) != j_H(rho x); empty means the square commutes."""
        if base is None:
            base = GraphPoint("v", min(v for v in self.G.genus if self._point(GraphPoint("v", v)).kind == "v"))
        KG = _quiet_kummer(self.G, base, depth)
        KH = _quiet_kummer(self.H, self.point(base), depth)
        bad = []
        for x in points:
            for r in range(2, depth + 1):
                lhs = self.push(KG, KH, KG.j_ambient(r)(x), r)
                rhs = KH.j_ambient(r)(self.point(x))
                if not isinstance(rhs, Vec):
                    rhs = Vec.zero(KH.A(r).dim)
                if lhs != rhs:
                    bad.append((x, r, lhs, rhs))
        return bad


def eliminate_half_edge(G, h):
    if h not in G.half_edges:
        raise GraphError(f"unknown half-edge {h}")
    src = G.half_edges[h]
    halves = {k: v for k, v in G.half_edges.items() if k != h}
    H = ReductionGraph(dict(G.genus), list(G.edges.values()), halves)
    st = H.stability()
    warning = None if st == "stable" else f"result is {st}"

    def pmap(x):
        if x.kind == "h" and x.ident == h:
            return GraphPoint("v", src)
        return x
    chain = {e: {e: Fraction(1)} for e in G.edges}
    return Reduction(G, H, pmap, chain, killed_halves=[h], warning=warning)


def _subgraph(G, C):
    verts = set()
    for e in C:
        verts |= {G.edges[e].src, G.edges[e].dst}
    return ReductionGraph({v: 0 for v in verts}, [G.edges[e] for e in C], {}, check=False)


def resistance_reduce(G, C, w0, w1, new_edge="r"):
    """Replace the subgraph C (edge ids) by one edge from w0 to w1."""
    C = sorted(set(C))
    for e in C:
        if e not in G.edges:
            raise GraphError(f"unknown edge {e}")
    if w0 == w1:
        raise GraphError("boundary vertices must differ")
    S = _subgraph(G, C)
    if w0 not in S.genus or w1 not in S.genus:
        raise GraphError("boundary vertices must lie on the subgraph")
    if not S.is_connected():
        raise GraphError("subgraph is not connected")
    interior = set(S.genus) - {w0, w1}
    cset = set(C)
    for v in interior:
        if G.genus[v] or G.halves_at(v):
            raise GraphError(f"interior vertex {v} carries genus or half-edges")
        if any(d[0] not in cset for d in G.out_darts(v)):
            raise GraphError(f"interior vertex {v} has edges outside the subgraph")
    if new_edge in G.edges or new_edge in G.half_edges:
        raise GraphError(f"edge id {new_edge} already used")
    phi = solve_divisor(S, {w1: Fraction(1), w0: Fraction(-1)})
    phi = {v: phi[v] - phi[w0] for v in phi}
    R = phi[w1]
    edges = [e for e in G.edges.values() if e.id not in cset]
    edges.append(Edge(new_edge, w0, w1, R))
    genus = {v: g for v, g in G.genus.items() if v not in interior}
    H = ReductionGraph(genus, edges, dict(G.half_edges))
    st = H.stability()
    warning = None if st == "stable" else f"result is {st}"

    def pmap(x):
        if x.kind == "v" and x.ident in interior:
            return H.point(new_edge, phi[x.ident])
        if x.kind == "e" and x.ident in cset:
            e = G.edges[x.ident]
            val = phi[e.src] + (phi[e.dst] - phi[e.src]) * x.dist / e.length
            return H.point(new_edge, val)
        return x
    chain = {}
    for e in G.edges.values():
        if e.id in cset:
            c = (phi[e.dst] - phi[e.src]) / R
            chain[e.id] = {new_edge: c} if c else {}
        else:
            chain[e.id] = {e.id: Fraction(1)}
    red = Reduction(G, H, pmap, chain, warning=warning)
    red.potential = phi
    red.subgraph = C
    return red


def quotient_length_check(G, C, w0, w1):
    """1/l(e') = sum 1/l(e) over pieces mapping onto e', for the subdivided reduction.

    Cutting the new edge at the images of all vertices of C, each piece e' is
    covered by the pieces of the edges of C whose potential range contains it.
    """
    red = resistance_reduce(G, C, w0, w1)
    phi = red.potential
    levels = sorted(set(phi.values()))
    ok = True
    for a, b in zip(levels, levels[1:]):
        lp = b - a
        tot = Fraction(0)
        for eid in C:
            e = G.edges[eid]
            lo, hi = sorted((phi[e.src], phi[e.dst]))
            if lo <= a and b <= hi and lo != hi:
                # the piece of e over [a, b] has length lp * l(e) / |delta phi|
                tot += 1 / (lp * e.length / (hi - lo))
        ok = ok and tot == 1 / lp
    return ok


# block decomposition

@dataclass
class Block:
    kind: str       # 2conn | bridge | half | vertex
    edges: list
    vertices: list
    halves: list = field(default_factory=list)


@dataclass
class BlockDecomposition:
    blocks: list
    cutvertices: list
    incidence: object

    def is_tree(self):
        return self.incidence.number_of_nodes() == 1 or nx.is_tree(self.incidence)

    def block_of_edge(self, eid):
        for i, b in enumerate(self.blocks):
            if eid in b.edges or eid in b.halves:
                return i
        raise KeyError(eid)

    def blocks_of_point(self, p):
        if p.kind == "v":
            return [i for i, b in enumerate(self.blocks) if p.ident in b.vertices]
        return [self.block_of_edge(p.ident)]


def block_decomposition(G):
    if "blocks" in G._cache:
        return G._cache["blocks"]
    N = nx.Graph()
    for v in G.genus:
        N.add_node(("v", v))
    for e in G.edges.values():
        a, b = ("m", e.id, 1), ("m", e.id, 2)
        nx.add_path(N, [("v", e.src), a, b, ("v", e.dst)])
    blocks = []
    covered = set()
    comps = [c for c in nx.biconnected_components(N) if len(c) > 2]
    for comp in sorted(comps, key=lambda c: sorted(str(x) for x in c)):
        edges = sorted({x[1] for x in comp if x[0] == "m"})
        verts = sorted(x[1] for x in comp if x[0] == "v")
        covered |= set(edges)
        blocks.append(Block("2conn", edges, verts))
    for e in sorted(G.edges):
        if e not in covered:
            ed = G.edges[e]
            blocks.append(Block("bridge", [e], sorted({ed.src, ed.dst})))
    for h in sorted(G.half_edges):
        blocks.append(Block("half", [], [G.half_edges[h]], [h]))
    for v in sorted(G.genus):
        if G.genus[v] > 0:
            blocks.append(Block("vertex", [], [v]))
    if not blocks:
        blocks.append(Block("vertex", [], sorted(G.genus)))
    count = {}
    for b in blocks:
        for v in b.vertices:
            count[v] = count.get(v, 0) + 1
    cut = sorted(v for v, c in count.items() if c > 1)
    T = nx.Graph()
    for i, b in enumerate(blocks):
        T.add_node(("b", i))
        for v in b.vertices:
            if v in cut:
                T.add_edge(("b", i), ("c", v))
    bd = BlockDecomposition(blocks, cut, T)
    G._cache["blocks"] = bd
    return bd


# cut systems

@dataclass
class CutSystem:
    edges: list         # (edge id, orientation sign)
    functional: tuple   # the common e*, normalized

    def length(self, G):
        return sum((G.length(e) for e, _ in self.edges), Fraction(0))

    def edge_ids(self):
        return [e for e, _ in self.edges]


def maximal_cut_systems(G):
    groups = {}
    for e in sorted(G.edges):
        es = homology.e_star(G, e)
        if not any(es):
            continue
        lead = next(c for c in es if c)
        sign = 1 if lead > 0 else -1
        key = tuple(sign * c for c in es)
        groups.setdefault(key, []).append((e, sign))
    return [CutSystem(v, k) for k, v in groups.items()]


# involutions

@dataclass
class Involution:
    block: int
    vertex_map: dict
    edge_map: dict      # e -> (e', +1 | -1)

    def apply(self, G, p):
        if p.kind == "v":
            return GraphPoint("v", self.vertex_map.get(p.ident, p.ident))
        if p.kind == "h" or p.ident not in self.edge_map:
            return p
        e2, o = self.edge_map[p.ident]
        return G.point(e2, p.dist if o == 1 else G.length(e2) - p.dist)

    def is_identity(self):
        return all(v == w for v, w in self.vertex_map.items()) and \
            all(e == f and o == 1 for e, (f, o) in self.edge_map.items())

    def to_dict(self):
        return {"block": self.block,
                "vertices": {v: w for v, w in sorted(self.vertex_map.items())},
                "edges": {e: [f, o] for e, (f, o) in sorted(self.edge_map.items())}}


def _vertex_involutions(verts, fixed, genus):
    verts = list(verts)

    def rec(i, cur):
        while i < len(verts) and verts[i] in cur:
            i += 1
        if i == len(verts):
            yield dict(cur)
            return
        v = verts[i]
        cur[v] = v
        yield from rec(i + 1, cur)
        del cur[v]
        if v in fixed:
            return
        for w in verts[i + 1:]:
            if w in cur or w in fixed or genus[w] != genus[v]:
                continue
            cur[v], cur[w] = w, v
            yield from rec(i + 1, cur)
            del cur[v], cur[w]
    yield from rec(0, {})


def _quotient_is_tree(G, edges, pi, emap):
    vorb = {frozenset((v, pi[v])) for v in pi}
    eorb = {frozenset((e, emap[e][0])) for e in edges}
    flipped = [e for e in edges if emap[e] == (e, -1)]
    return len(eorb) == len(vorb) + len(flipped) - 1


def block_involutions(G, bi, bd=None):
    """All isometric, genus preserving involutions of a 2-connected block that
    fix its cutvertices and have a tree quotient."""
    bd = bd or block_decomposition(G)
    B = bd.blocks[bi]
    if B.kind != "2conn":
        return []
    fixed = set(bd.cutvertices) & set(B.vertices)
    edges = B.edges
    out = []
    for pi in _vertex_involutions(B.vertices, fixed, G.genus):
        def rec(k, emap):
            while k < len(edges) and edges[k] in emap:
                k += 1
            if k == len(edges):
                if _quotient_is_tree(G, edges, pi, emap):
                    yield dict(emap)
                return
            e = G.edges[edges[k]]
            for f in edges[k:]:
                if f in emap:
                    continue
                fe = G.edges[f]
                if fe.length != e.length:
                    continue
                for o in (1, -1):
                    s, t = (fe.src, fe.dst) if o == 1 else (fe.dst, fe.src)
                    if s != pi[e.src] or t != pi[e.dst]:
                        continue
                    emap[e.id] = (f, o)
                    emap[f] = (e.id, o)
                    yield from rec(k + 1, emap)
                    del emap[e.id]
                    emap.pop(f, None)
        for emap in rec(0, {}):
            out.append(Involution(bi, dict(pi), emap))
    return out


def find_involution(G, x, y):
    bd = block_decomposition(G)
    common = set(bd.blocks_of_point(x)) & set(bd.blocks_of_point(y))
    for bi in sorted(common):
        for inv in block_involutions(G, bi, bd):
            if inv.apply(G, x) == y:
                return inv
    return None


# weight 2 fibers

def harmonic_criterion(G, x, y):
    """(holds, values): the averages of Phi over maximal cut systems and the
    values of Phi at half-edge sources and positive-genus vertices, where Phi
    is the potential of y - x.  The criterion holds when all values agree."""
    G2, where = subdivide_many(G, [x, y])
    phi = solve_divisor(G2, {where[y]: Fraction(1), where[x]: Fraction(-1)})
    vals = []
    for cs in maximal_cut_systems(G2):
        tot = Fraction(0)
        for e, _ in cs.edges:
            ed = G2.edges[e]
            tot += ed.length * (phi[ed.src] + phi[ed.dst]) / 2
        vals.append(("cut", tuple(cs.edge_ids()), tot / cs.length(G2)))
    for h, v in sorted(G2.half_edges.items()):
        vals.append(("half", h, phi[v]))
    for v, g in sorted(G2.genus.items()):
        if g > 0:
            vals.append(("genus", v, phi[v]))
    holds = len({v[2] for v in vals}) <= 1
    return holds, vals


def weight2_fiber(G, x, y, K=None):
    if G.stability() != "stable":
        raise ValueError("graph is not stable")
    if x == y:
        raise ValueError("points must differ")
    holds, vals = harmonic_criterion(G, x, y)
    K = K or _quiet_kummer(G, None, 2)
    a, b = K.j_ambient(2)(x), K.j_ambient(2)(y)
    direct = a == b
    res = {"equal": direct, "criterion": holds, "agree": holds == direct,
           "kappa": str(vals[0][2]) if holds and vals else None, "witness": None}
    if direct:
        inv = find_involution(G, x, y)
        res["witness"] = inv
    return res


# census

def grid_points(G, denominator=6):
    pts = [GraphPoint("v", v) for v in sorted(G.genus)]
    for e in sorted(G.edges):
        l = G.length(e)
        pts += [G.point(e, l * Fraction(k, denominator)) for k in range(1, denominator)]
    for h in sorted(G.half_edges):
        pts += [G.point(h, Fraction(k, denominator)) for k in range(1, denominator + 1)]
    return pts


def _key(v):
    return tuple(v) if isinstance(v, Vec) else ()


def injectivity_census(G, denominator=6, n=3):
    if G.stability() != "stable":
        raise ValueError("graph is not stable")
    K = _quiet_kummer(G, None, max(n, 2))
    pts = grid_points(G, denominator)
    j2 = {p: _key(K.j_ambient(2)(p)) for p in pts}
    groups = {}
    for p in pts:
        groups.setdefault(j2[p], []).append(p)
    collisions = []
    unexplained = []
    for grp in groups.values():
        for i in range(len(grp)):
            for k in range(i + 1, len(grp)):
                x, y = grp[i], grp[k]
                inv = find_involution(G, x, y)
                collisions.append({"x": str(x), "y": str(y),
                                   "involution": inv.to_dict() if inv else None})
                if inv is None:
                    unexplained.append((x, y))
    # converse: every involution moves grid points inside their j2 fiber
    bd = block_decomposition(G)
    missed = []
    pset = set(pts)
    n_inv = 0
    for bi in range(len(bd.blocks)):
        for inv in block_involutions(G, bi, bd):
            n_inv += 1
            for p in pts:
                if bi not in bd.blocks_of_point(p):
                    continue
                q = inv.apply(G, p)
                if q != p and q in pset and j2[p] != j2[q]:
                    missed.append((p, q))
    w1 = {_key(K.kummer(p, 1)[1]) for p in pts}
    report = {"points": len(pts), "weight1_constant": len(w1) == 1,
              "weight2_collisions": collisions, "unexplained": [[str(a), str(b)] for a, b in unexplained],
              "involutions": n_inv, "involution_pairs_not_colliding": [[str(a), str(b)] for a, b in missed]}
    if n >= 3:
        seen = {}
        c3 = []
        for p in pts:
            key = (j2[p],) + tuple(_key(K.j_ambient(r)(p)) for r in range(3, n + 1))
            if key in seen:
                c3.append([str(seen[key]), str(p)])
            else:
                seen[key] = p
        report["weight3_collisions"] = c3
    report["ok"] = report["weight1_constant"] and not unexplained and not missed and not report.get("weight3_collisions")
    return report
