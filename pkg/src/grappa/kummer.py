"""The measures mu_n and the graph non-abelian Kummer map.

Intermediate quantities live in the ambient quotient piece A_r of bidegree
(-r, -2), stored as Vec coordinates; the V-coordinates are only taken at the
end.  j_{=r} is the potential of mu_r pinned at the basepoint.
"""
import warnings
from fractions import Fraction
from math import factorial

from . import homology
from .graph import GraphPoint
from .harmonic import (PPMeasure, OmegaLogFunction, potential, pderiv, pantideriv, peval,
                       pintegral, padd, psub, pscale, pnorm, affine_interpolation, solve_divisor,
                       laplacian_op)
from .lie import LieAlgebra, tbracket, tadd
from .linalg import Vec, is_zero, rref

DEFAULT_DEPTH = 4


def lie_algebra(G):
    if "lie" not in G._cache:
        G._cache["lie"] = LieAlgebra(G)
    return G._cache["lie"]


def tree_str(t):
    """Render a bracket tree ["[,]", a, b] as "[a, b]"."""
    if isinstance(t, str):
        return t
    return "[" + tree_str(t[1]) + ", " + tree_str(t[2]) + "]"


class VProjector:
    """Coordinates of ambient vectors in the computed basis of gr^W_{-n} V."""

    def __init__(self, basis, dim):
        self.basis = basis
        self.dim = dim
        if basis:
            # pick rows where the basis matrix is invertible
            cols = [[b[i] for b in basis] for i in range(dim)]
            _, piv = rref([list(r) for r in zip(*cols)], dim)
            self.rows = piv
            from .linalg import inverse
            self.inv = inverse([[b[i] for b in basis] for i in piv])
        else:
            self.rows, self.inv = [], []

    def __call__(self, x):
        if not isinstance(x, Vec):
            if x == 0:
                return Vec.zero(len(self.basis))
            raise TypeError(x)
        sel = [x[i] for i in self.rows]
        c = [sum((a * b for a, b in zip(row, sel)), Fraction(0)) for row in self.inv]
        back = [sum((c[k] * self.basis[k][i] for k in range(len(c))), Fraction(0))
                for i in range(self.dim)]
        if tuple(back) != tuple(x):
            raise ValueError("ambient element does not lie in V")
        return Vec(c)


class VValuedMeasure:
    """A measure with coefficients in a fixed basis of gr^W_{-n} V."""

    def __init__(self, n, basis, measure):
        self.n = n
        self.basis = basis
        self.measure = measure

    @property
    def dim(self):
        return len(self.basis)

    def coordinate(self, i):
        return self.measure.coordinate(i)

    def total_mass(self):
        m = self.measure.total_mass()
        return m if isinstance(m, Vec) else Vec.zero(self.dim)

    def to_dict(self):
        return {"weight": self.n, "basis": self.basis,
                "coordinates": [self.coordinate(i).to_dict() for i in range(self.dim)]}


class Kummer:
    """All Kummer-side data for one graph, basepoint and depth."""

    def __init__(self, G, base=None, depth=DEFAULT_DEPTH):
        self.G = G
        self.depth = depth
        self.base = base if base is not None else GraphPoint("v", min(G.genus))
        st = G.stability()
        if st == "neither":
            raise ValueError("graph is not semistable")
        if st == "semistable":
            warnings.warn("graph is semistable but not stable", stacklevel=2)
        self.alg = lie_algebra(G)
        self._mu = {}
        self._j = {}
        self._proj = {}

    # ambient helpers
    def A(self, r):
        return self.alg.quotient(-r, -2)

    def vec(self, poly, r):
        return Vec(self.A(r).coords(poly))

    def e_coeffs(self, eid):
        return homology.e_star(self.G, eid)

    def ad(self, eid, x, r):
        """ad_{e*} from A_r to A_{r+1} on a Vec (or 0)."""
        tgt = self.A(r + 1).dim
        out = Vec.zero(tgt)
        if not isinstance(x, Vec) or x.is_zero():
            return out
        for i, c in enumerate(self.e_coeffs(eid)):
            if not c:
                continue
            M = self.alg.ad_generator_matrix(i, -r, -2)
            out = out + Vec([c * sum((a * b for a, b in zip(row, x)), Fraction(0)) for row in M])
        return out

    def ad_poly(self, eid, p, r):
        return pnorm([self.ad(eid, c, r) for c in p])

    def n_e_star(self, eid):
        return self.vec(self.alg.n_e_star_poly(eid), 1)

    def bracket_e_ne(self, eid):
        """[e*, N(e*)] in A_2."""
        return self.vec(tbracket(self.alg.e_star_poly(eid), self.alg.n_e_star_poly(eid)), 2)

    def logdelta_vertex(self, v):
        return self.vec(self.alg.logdelta_vertex_poly(v), 2)

    def logdelta_half(self, h):
        return self.vec({(self.alg.logdelta[h],): 1}, 2)

    # measures
    def mu_ambient(self, n):
        if n in self._mu:
            return self._mu[n]
        if n > self.depth:
            raise ValueError(f"weight {n} exceeds depth {self.depth}")
        G = self.G
        if n == 1:
            mu = PPMeasure(G)
        elif n == 2:
            mu = PPMeasure(G, {e: [-self.bracket_e_ne(e)] for e in G.edges},
                           {v: self.logdelta_vertex(v) for v in G.genus},
                           {h: self.logdelta_half(h) for h in G.half_edges})
        else:
            lam = homology.lambda_table(G)
            jm1 = self.j_ambient(n - 1)
            jm2 = self.j_ambient(n - 2) if n - 2 >= 2 else None
            ints = {}
            if jm2 is not None:
                for e in G.edges:
                    ints[e] = pintegral(jm2.edges.get(e, []), 0, G.length(e))
            edges = {}
            for e in G.edges:
                dens = pscale(2, self.ad_poly(e, pderiv(jm1.edges.get(e, [])), n - 1))
                if jm2 is not None:
                    inner = self.ad_poly(e, self.ad_poly(e, jm2.edges.get(e, []), n - 2), n - 1)
                    dens = psub(dens, inner)
                    const = 0
                    for e2 in G.edges:
                        if lam[e, e2] and not is_zero(ints[e2]):
                            const = const + lam[e, e2] * self.ad(e, self.ad(e2, ints[e2], n - 2), n - 1)
                    dens = padd(dens, [const])
                edges[e] = [-c for c in dens]
            mu = PPMeasure(G, edges)
        self._mu[n] = mu
        return mu

    def j_ambient(self, r):
        """j_{=r} as a function with A_r coefficients, vanishing at the base."""
        if r not in self._j:
            self._j[r] = potential(self.G, self.base, self.mu_ambient(r))
        return self._j[r]

    def projector(self, n):
        if n not in self._proj:
            self._proj[n] = VProjector(self.alg.v_basis(n), self.A(n).dim)
        return self._proj[n]

    def v_basis_description(self, n):
        q = self.A(n)
        out = []
        for b in self.alg.v_basis(n):
            out.append([[str(c), tree_str(t)] for c, t in zip(b, q.describe()) if c])
        return out

    def mu(self, n):
        if n == 1:
            return VValuedMeasure(1, [], PPMeasure(self.G))
        P = self.projector(n)
        return VValuedMeasure(n, self.v_basis_description(n), self.mu_ambient(n).map(P))

    def kummer(self, x, n):
        """{r: Vec of V-coordinates of j_{=r}(x)} for 1 <= r <= n."""
        out = {1: Vec([])}
        for r in range(2, n + 1):
            out[r] = self.projector(r)(self.j_ambient(r)(x))
        return out

    def kummer_ambient(self, x, n):
        return {r: self.j_ambient(r)(x) for r in range(2, n + 1)}

    def edge_poly(self, eid, n):
        """{r: polynomial in V coordinates} of j_{=r} along an edge or half-edge."""
        out = {}
        for r in range(2, n + 1):
            P = self.projector(r)
            f = self.j_ambient(r)
            p = f.edges.get(eid) if eid in self.G.edges else f.halves.get(eid, [])
            out[r] = [P(c) for c in (p or [])]
        return out

    def leading_coefficient(self, eid, n):
        """((n-1)/n!) ad_{e*}^{n-1}(N(e*)) in A_n."""
        x = self.n_e_star(eid)
        for r in range(1, n):
            x = self.ad(eid, x, r)
        return x * Fraction(n - 1, factorial(n))


def mu(G, n, depth=DEFAULT_DEPTH, base=None):
    return Kummer(G, base, depth).mu(n)


def kummer(G, b, x, n, depth=None):
    return Kummer(G, b, max(depth or DEFAULT_DEPTH, n)).kummer(x, n)


def kummer_edge_poly(G, b, e, n, depth=None):
    return Kummer(G, b, max(depth or DEFAULT_DEPTH, n)).edge_poly(e, n)


# oracles

def ode_oracle(K, n):
    """Check the differential equations satisfied by j along edges.

    Returns a list of failures (empty when everything holds); each failure is
    (where, lhs, rhs).
    """
    G = K.G
    lam = homology.lambda_table(G)
    fails = []
    for r in range(2, n + 1):
        j = K.j_ambient(r)
        jm1 = K.j_ambient(r - 1) if r - 1 >= 2 else None
        jm2 = K.j_ambient(r - 2) if r - 2 >= 2 else None
        for e in G.edges:
            lhs = pderiv(pderiv(j.edges.get(e, [])))
            if jm1 is not None:
                lhs = psub(lhs, pscale(2, K.ad_poly(e, pderiv(jm1.edges.get(e, [])), r - 1)))
            if jm2 is not None:
                lhs = padd(lhs, K.ad_poly(e, K.ad_poly(e, jm2.edges.get(e, []), r - 2), r - 1))
            # ad_{e*} N_b(e*) in weight r
            if r == 2:
                nb = K.n_e_star(e)
                rhs = K.ad(e, nb, 1)
            else:
                rhs = Vec.zero(K.A(r).dim)
                if jm2 is not None:
                    nb = 0
                    for e2 in G.edges:
                        if lam[e, e2]:
                            integ = pintegral(jm2.edges.get(e2, []), 0, G.length(e2))
                            nb = nb + lam[e, e2] * K.ad(e2, integ, r - 2)
                    rhs = K.ad(e, nb, r - 1)
            if pnorm(psub(lhs, [rhs])):
                fails.append((f"edge {e} weight {r}", lhs, [rhs]))
        for h in G.half_edges:
            d = pderiv(j.halves.get(h, []))
            want = [K.logdelta_half(h)] if r == 2 else []
            if pnorm(psub(d, want)):
                fails.append((f"half-edge {h} weight {r}", d, want))
        for v in G.genus:
            tot = 0
            for dart in G.out_darts(v):
                tot = tot + j.out_derivative(dart)
            for h in G.halves_at(v):
                tot = tot + peval(pderiv(j.halves.get(h, [])), 0)
            want = -K.logdelta_vertex(v) if r == 2 else 0
            if not is_zero(tot - want):
                fails.append((f"vertex {v} weight {r}", tot, want))
    return fails


def w2_closed_form(K):
    """The weight-2 potential written with quadratic bumps plus an affine correction.

    Returns g with A_2 coefficients; j_{=2}(x) = g(x) - g(b).
    """
    G = K.G
    c = {e: K.bracket_e_ne(e) for e in G.edges}
    D = {}
    for v in G.genus:
        tot = K.logdelta_vertex(v)
        for e, s in G.out_darts(v):
            tot = tot - c[e] * (G.length(e) / 2)
        for h in G.halves_at(v):
            tot = tot + K.logdelta_half(h)
        D[v] = tot
    phi = solve_divisor(G, D)
    F = affine_interpolation(G, phi)
    edges = {}
    for e in G.edges:
        l = G.length(e)
        q = [0, -c[e] * (l / 2), c[e] * Fraction(1, 2)]
        edges[e] = padd(F.edges[e], q)
    halves = {h: padd(F.halves[h], [0, K.logdelta_half(h)]) for h in G.half_edges}
    return OmegaLogFunction(G, edges, halves, dict(phi))


def w2_relation(K):
    """sum_e l(e)[N e*, e*] + sum_v logdelta_v + sum_h logdelta_h (should vanish)."""
    G = K.G
    tot = 0
    for e in G.edges:
        tot = tot - K.bracket_e_ne(e) * G.length(e)
    for v in G.genus:
        tot = tot + K.logdelta_vertex(v)
    for h in G.half_edges:
        tot = tot + K.logdelta_half(h)
    return tot
