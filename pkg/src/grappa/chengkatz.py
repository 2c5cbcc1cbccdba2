"""Iterated integrals along paths, the duality pairing, canonical paths.

A path is a tuple of segments ``(eid, a, b)``: traverse edge ``eid`` from
arc length a to arc length b (stored orientation), in order.  A path
combination is a dict {path: coefficient}.  Words are tuples of indices into
the h1 basis; the integral of basis loop j along a segment is (b - a) times
the multiplicity of the edge in that loop.

Truncated series in T(H^1) are dicts {word: coefficient} with words of length
<= depth; Theta of a path is the series of all its iterated integrals, and
Theta(first then second) = Theta(first) * Theta(second).
"""
from fractions import Fraction
from itertools import product
from math import factorial

from . import homology
from .graph import GraphError
from .linalg import Vec, rank as mat_rank, solve
from .harmonic import pintegral
from .lie import Echelon, tbracket, tmul, tadd


# segments and paths

def seg_start(G, seg):
    return G.point(seg[0], seg[1])


def seg_end(G, seg):
    return G.point(seg[0], seg[2])


def check_path(G, path):
    for s1, s2 in zip(path, path[1:]):
        if seg_end(G, s1) != seg_start(G, s2):
            raise GraphError("non-composable path word")
    return path


def reverse_path(path):
    return tuple((e, b, a) for e, a, b in reversed(path))


def dart_segment(G, dart):
    e, s = dart
    l = G.length(e)
    return (e, Fraction(0), l) if s == 1 else (e, l, Fraction(0))


def seg_integrals(G, seg):
    e, a, b = seg
    return [(b - a) * c for c in homology.e_star(G, e)]


# truncated tensor series

def series_mul(x, y, depth):
    out = {}
    for a, ca in x.items():
        for b, cb in y.items():
            if len(a) + len(b) > depth:
                continue
            k = a + b
            v = out.get(k, 0) + ca * cb
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def series_exp(coeffs, depth):
    """exp of the degree-one element sum_j coeffs[j] * word (j,)."""
    out = {(): Fraction(1)}
    idx = [j for j, c in enumerate(coeffs) if c]
    for n in range(1, depth + 1):
        for w in product(idx, repeat=n):
            v = Fraction(1, factorial(n))
            for j in w:
                v *= coeffs[j]
            out[w] = v
    return out


def series_sub(x, y):
    return tadd(x, y, -1)


def one():
    return {(): Fraction(1)}


def path_series(G, path, depth):
    s = one()
    for seg in path:
        s = series_mul(s, series_exp(seg_integrals(G, seg), depth), depth)
    return s


def theta(G, combo, depth):
    out = {}
    for path, c in combo.items():
        out = tadd(out, {w: c * v for w, v in path_series(G, path, depth).items()})
    return out


def iterated_integral(G, combo, word):
    """Integral of a word in the h1 basis along a path or path combination."""
    if isinstance(combo, tuple):
        combo = {combo: Fraction(1)}
    return theta(G, combo, len(word)).get(tuple(word), Fraction(0))


def edge_exponential(G, eid, depth):
    l = G.length(eid)
    return series_exp([l * c for c in homology.e_star(G, eid)], depth)


def all_words(b, depth):
    out = []
    for n in range(depth + 1):
        out += list(product(range(b), repeat=n))
    return out


# path combinations

def compose(first, second):
    """Combination of paths: traverse `first`, then `second`."""
    out = {}
    for p, a in first.items():
        for q, b in second.items():
            k = p + q
            out[k] = out.get(k, 0) + a * b
    return {k: v for k, v in out.items() if v}


def reverse_combo(combo):
    return {reverse_path(p): c for p, c in combo.items()}


def path_to_vertex(G, p):
    """A short path from point p to a vertex, and that vertex."""
    if p.kind == "v":
        return (), p.ident
    if p.kind == "e":
        return ((p.ident, p.dist, Fraction(0)),), G.edges[p.ident].src
    return ((p.ident, p.dist, Fraction(0)),), G.half_edges[p.ident]


def tree_path(G, u, v):
    """Deterministic path between two points through the spanning tree."""
    head, a = path_to_vertex(G, u)
    tail, b = path_to_vertex(G, v)
    mid = tuple(dart_segment(G, d) for d in homology.tree_path(G, a, b))
    return head + mid + reverse_path(tail)


def basis_loops(G, u):
    """Loops at u, one per h1 basis element."""
    out = []
    for i, eid in enumerate(homology.nontree_edges(G)):
        e = G.edges[eid]
        to = tree_path(G, u, G.point(e.src))
        back = tree_path(G, G.point(e.dst), u)
        out.append(to + (dart_segment(G, (eid, 1)),) + back)
    return out


def spanning_set(G, u, v, depth):
    """{tree path} and tree path after products of (loop - 1), up to depth."""
    loops = basis_loops(G, u)
    P = {tree_path(G, u, v): Fraction(1)}
    out = []
    for n in range(depth + 1):
        for w in product(range(len(loops)), repeat=n):
            c = {(): Fraction(1)}
            for i in w:
                c = compose(c, {loops[i]: Fraction(1), (): Fraction(-1)})
            out.append(compose(c, P))
    return out


def duality_gram(G, u, v, n):
    """Pairing matrix between the spanning set and words of length <= n."""
    words = all_words(G.betti(), n)
    rows = []
    for combo in spanning_set(G, u, v, n):
        th = theta(G, combo, n)
        rows.append([th.get(w, Fraction(0)) for w in words])
    r = mat_rank(rows, len(words))
    return rows, r == len(words), r


def theta_inverse(G, u, v, target, depth):
    """The combination of spanning paths whose Theta is the given series."""
    words = all_words(G.betti(), depth)
    span = spanning_set(G, u, v, depth)
    cols = [theta(G, c, depth) for c in span]
    A = [[cols[k].get(w, Fraction(0)) for k in range(len(span))] for w in words]
    x = solve(A, [target.get(w, Fraction(0)) for w in words])
    out = {}
    for xk, combo in zip(x, span):
        if xk:
            for p, c in combo.items():
                out[p] = out.get(p, 0) + xk * c
    return {p: c for p, c in out.items() if c}


def canonical_path(G, u, v, depth):
    return theta_inverse(G, u, v, one(), depth)


# monodromy on paths

class MonodromyOnPaths:
    """The operator a -> j_x(y) a + N_x(a) on truncated T(H^1), into gr^M_{-2}.

    Its kernel is the set of path classes from x to y killed by N, read
    through the duality isomorphism.
    """

    def __init__(self, K, y, depth):
        self.K, self.depth = K, depth
        G = K.G
        alg = K.alg
        self.alg = alg
        self.b = G.betti()
        jy = {}
        for r in range(2, depth + 1):
            val = K.j_ambient(r)(y)
            if isinstance(val, Vec):
                jy = tadd(jy, K.A(r).element(list(val)))
        self.jy = jy
        lam = homology.lambda_table(G)
        self.nx = {}
        for i, eid in enumerate(homology.nontree_edges(G)):
            img = alg.n_e_star_poly(eid)
            for r in range(2, depth):
                j = K.j_ambient(r)
                for e2 in G.edges:
                    if not lam[eid, e2]:
                        continue
                    integ = pintegral(j.edges.get(e2, []), 0, G.length(e2))
                    if not integ:
                        continue
                    z = K.A(r).element(list(integ))
                    img = tadd(img, tbracket(alg.e_star_poly(e2), z), lam[eid, e2])
            self.nx[i] = img
        self._ideal = {}

    def _derive(self, word):
        out = {}
        for t, a in enumerate(word):
            for k, c in self.nx[a].items():
                w = word[:t] + k + word[t + 1:]
                out[w] = out.get(w, 0) + c
        return out

    def _image(self, word):
        img = tadd(tmul(self.jy, {word: Fraction(1)}), self._derive(word))
        return {w: c for w, c in img.items() if c and self._weight(w) <= self.depth}

    def _weight(self, w):
        return -sum(self.alg.gens[i].w for i in w)

    def _space(self, wt):
        if wt not in self._ideal:
            words = self.alg.words(-wt, -2)
            index = {w: i for i, w in enumerate(words)}
            ech = Echelon()
            sig = self.alg.sigma
            for n_u in range(wt - 1):
                for u in product(range(self.b), repeat=n_u):
                    for v in product(range(self.b), repeat=wt - 2 - n_u):
                        el = tmul(tmul({u: 1}, sig), {v: 1})
                        ech.insert({index[w]: c for w, c in el.items()})
            self._ideal[wt] = (index, ech)
        return self._ideal[wt]

    def kernel_dimension(self):
        domain = all_words(self.b, self.depth)
        ech = Echelon()
        rank = 0
        for word in domain:
            img = self._image(word)
            vec = {}
            for w, c in img.items():
                wt = self._weight(w)
                index, ideal = self._space(wt)
                vec[(wt, index[w])] = c
            # reduce weight by weight modulo the two-sided ideal
            red = {}
            for wt in sorted({k[0] for k in vec}):
                index, ideal = self._space(wt)
                part = ideal.reduce({k[1]: c for k, c in vec.items() if k[0] == wt})
                red.update({(wt, i): c for i, c in part.items()})
            if ech.insert(red):
                rank += 1
        return len(domain) - rank


def n_kernel_on_paths(G, x, y, depth):
    """Dimension of the N-kernel on path classes from x to y mod W_{-depth-1}."""
    import warnings
    from .kummer import Kummer
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        K = Kummer(G, base=x, depth=depth)
    return MonodromyOnPaths(K, y, depth).kernel_dimension()


def groupoid_checks(G, u, v, w, depth):
    """Identity, inverse and composition laws for canonical paths at the level of Theta."""
    cu = canonical_path(G, u, u, depth)
    cuv = canonical_path(G, u, v, depth)
    cvu = canonical_path(G, v, u, depth)
    cvw = canonical_path(G, v, w, depth)
    cuw = canonical_path(G, u, w, depth)
    th = lambda c: theta(G, c, depth)
    return {
        "identity": th(cu) == one() and th({(): Fraction(1)}) == one(),
        "inverse": th(reverse_combo(cuv)) == th(cvu),
        "composition": th(compose(cuv, cvw)) == th(cuw),
    }


def augmentation_product(G, u, loops, depth):
    """Theta of (loop_1 - 1)...(loop_k - 1) for loops based at u."""
    c = {(): Fraction(1)}
    for p in loops:
        c = compose(c, {p: Fraction(1), (): Fraction(-1)})
    return theta(G, c, depth)


def shuffle(a, b):
    """Shuffle product of two words, as {word: multiplicity}."""
    if not a:
        return {tuple(b): 1}
    if not b:
        return {tuple(a): 1}
    out = {}
    for w, c in shuffle(a[1:], b).items():
        k = (a[0],) + w
        out[k] = out.get(k, 0) + c
    for w, c in shuffle(a, b[1:]).items():
        k = (b[0],) + w
        out[k] = out.get(k, 0) + c
    return out


def random_path(G, rng, steps=4, start=None):
    """A random walk along darts, optionally starting and ending partway along an edge."""
    v = start if start is not None else rng.choice(sorted(G.genus))
    path = []
    for _ in range(steps):
        dart = rng.choice(sorted(G.out_darts(v)))
        path.append(dart_segment(G, dart))
        v = G.target(dart)
    darts = sorted(G.out_darts(v))
    if darts and rng.random() < 0.5:
        e, s = rng.choice(darts)
        l = G.length(e)
        stop = l * Fraction(rng.randint(1, 5), 6)
        path.append((e, Fraction(0), stop) if s == 1 else (e, l, l - stop))
    return tuple(path)
