"""The bigraded Lie algebra attached to a reduction graph.

Free Lie algebra on graph generators, modulo the ideal generated by the
surface relation, with the monodromy derivation N.  Elements of the free
algebra are kept as tensor polynomials {word: coeff} over generator indices;
bidegree pieces get a Lyndon basis, and the ideal is handled by a sparse
echelon form in Lyndon coordinates.
"""
import heapq
from dataclasses import dataclass
from fractions import Fraction

from . import homology


@dataclass(frozen=True)
class Gen:
    name: str
    kind: str   # estar | beta | betap | h1 | logdelta
    w: int
    m: int


# tensor polynomials

def tadd(a, b, c=1):
    out = dict(a)
    for k, v in b.items():
        x = out.get(k, 0) + c * v
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def tscale(a, c):
    return {k: c * v for k, v in a.items()} if c else {}


def tmul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = ka + kb
            x = out.get(k, 0) + va * vb
            if x:
                out[k] = x
            else:
                out.pop(k)
    return out


def tbracket(a, b):
    return tadd(tmul(a, b), tmul(b, a), -1)


def letter(i):
    return {(i,): 1}


def is_lyndon(w):
    return all(w < w[i:] for i in range(1, len(w)))


def standard_split(w):
    v = min(w[i:] for i in range(1, len(w)))
    return w[:len(w) - len(v)], v


class Echelon:
    """Sparse row echelon form; each row's pivot is its smallest column."""

    def __init__(self):
        self.rows = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec):
        vec = {k: v for k, v in vec.items() if v}
        heap = list(vec)
        heapq.heapify(heap)
        out = {}
        seen = set()
        while heap:
            c = heapq.heappop(heap)
            if c in seen:
                continue
            seen.add(c)
            x = vec.get(c, 0)
            if not x:
                continue
            row = self.rows.get(c)
            if row is None:
                out[c] = x
                continue
            for k, v in row.items():
                y = vec.get(k, 0) - x * v
                if y:
                    if k not in vec:
                        heapq.heappush(heap, k)
                    vec[k] = y
                else:
                    vec.pop(k, None)
            vec.pop(c, None)
        return out

    def insert(self, vec):
        r = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        lead = r[p]
        lead = Fraction(lead)
        self.rows[p] = {k: v / lead for k, v in r.items()}
        return True

    def rank(self):
        return len(self.rows)


class FreePiece:
    """Lyndon basis of one bidegree of the free Lie algebra."""

    def __init__(self, alg, w, m):
        self.alg = alg
        self.bideg = (w, m)
        self.words = sorted(x for x in alg.words(w, m) if is_lyndon(x))
        self.index = {x: i for i, x in enumerate(self.words)}

    def __len__(self):
        return len(self.words)

    def coords(self, poly):
        """Lyndon coordinates of a Lie polynomial (peeling off leading words)."""
        x = dict(poly)
        heap = [k for k in x if k in self.index]
        heapq.heapify(heap)
        out = {}
        while heap:
            w = heapq.heappop(heap)
            c = x.get(w, 0)
            if not c:
                continue
            out[self.index[w]] = c
            for u, t in self.alg.lyndon_poly(w).items():
                y = x.get(u, 0) - c * t
                if y:
                    if u not in x and u in self.index:
                        heapq.heappush(heap, u)
                    x[u] = y
                else:
                    x.pop(u, None)
        if x:
            raise ValueError("not a Lie polynomial of this bidegree")
        return out


class QuotientPiece:
    def __init__(self, alg, w, m):
        self.alg = alg
        self.bideg = (w, m)
        self.free = alg.free_piece(w, m)
        self.ideal = alg.ideal(w, m)[0]
        self.basis_idx = [i for i in range(len(self.free)) if i not in self.ideal.rows]
        self.pos = {i: k for k, i in enumerate(self.basis_idx)}

    def __len__(self):
        return len(self.basis_idx)

    @property
    def dim(self):
        return len(self.basis_idx)

    def basis_words(self):
        return [self.free.words[i] for i in self.basis_idx]

    def coords(self, poly):
        r = self.ideal.reduce(self.free.coords(poly))
        out = [Fraction(0)] * len(self.basis_idx)
        for i, c in r.items():
            out[self.pos[i]] = Fraction(c)
        return out

    def element(self, coords):
        poly = {}
        for c, i in zip(coords, self.basis_idx):
            if c:
                poly = tadd(poly, self.alg.lyndon_poly(self.free.words[i]), c)
        return poly

    def basis_poly(self, k):
        return self.alg.lyndon_poly(self.free.words[self.basis_idx[k]])

    def describe(self):
        return [self.alg.bracket_tree(w) for w in self.basis_words()]


class LieAlgebra:
    def __init__(self, G):
        self.G = G
        b = G.betti()
        gens = [Gen(f"estar:{i + 1}", "estar", -1, 0) for i in range(b)]
        self.beta_pairs = []
        for v, g in G.genus.items():
            for k in range(1, g + 1):
                gens.append(Gen(f"beta:{v}:{k}", "beta", -1, -1))
                gens.append(Gen(f"betap:{v}:{k}", "betap", -1, -1))
                self.beta_pairs.append((v, len(gens) - 2, len(gens) - 1))
        self.h1_start = len(gens)
        gens += [Gen(f"h1:{j + 1}", "h1", -1, -2) for j in range(b)]
        self.logdelta = {}
        for h in G.half_edges:
            self.logdelta[h] = len(gens)
            gens.append(Gen(f"logdelta:{h}", "logdelta", -2, -2))
        self.gens = gens
        self.betti = b
        self.names = {g.name: i for i, g in enumerate(gens)}
        Ginv = homology.gram_inverse(G)
        # N on generators: estar:i -> sum_j Ginv[i][j] h1:j
        self.n_gen = {}
        for i in range(b):
            img = {(self.h1_start + j,): Ginv[i][j] for j in range(b) if Ginv[i][j]}
            self.n_gen[i] = img
        sigma = {}
        for i in range(b):
            sigma = tadd(sigma, tbracket(letter(self.h1_start + i), letter(i)))
        for v, bi, bpi in self.beta_pairs:
            sigma = tadd(sigma, tbracket(letter(bpi), letter(bi)))
        for h, i in self.logdelta.items():
            sigma = tadd(sigma, letter(i))
        self.sigma = sigma
        self._words = {}
        self._lyn = {}
        self._free = {}
        self._ideal = {}
        self._quot = {}
        self._nmat = {}
        self._admat = {}

    # bookkeeping
    def bidegree(self, word):
        return (sum(self.gens[i].w for i in word), sum(self.gens[i].m for i in word))

    def words(self, w, m):
        key = (w, m)
        if key in self._words:
            return self._words[key]
        if w == 0 and m == 0:
            res = [()]
        elif w >= 0 or m > 0 or m < 2 * w:
            res = []
        else:
            res = []
            for i, g in enumerate(self.gens):
                for rest in self.words(w - g.w, m - g.m):
                    res.append((i,) + rest)
        self._words[key] = res
        return res

    def lyndon_poly(self, w):
        p = self._lyn.get(w)
        if p is None:
            if len(w) == 1:
                p = letter(w[0])
            else:
                u, v = standard_split(w)
                p = tbracket(self.lyndon_poly(u), self.lyndon_poly(v))
            self._lyn[w] = p
        return p

    def bracket_tree(self, w):
        if len(w) == 1:
            return self.gens[w[0]].name
        u, v = standard_split(w)
        return ["[,]", self.bracket_tree(u), self.bracket_tree(v)]

    def free_piece(self, w, m):
        if (w, m) not in self._free:
            self._free[w, m] = FreePiece(self, w, m)
        return self._free[w, m]

    def free_basis(self, w, m):
        return [self.bracket_tree(x) for x in self.free_piece(w, m).words]

    def ideal(self, w, m):
        """(echelon in Lyndon coordinates, independent spanning polynomials)."""
        key = (w, m)
        if key in self._ideal:
            return self._ideal[key]
        ech, polys = Echelon(), []
        if w == -2 and m == -2:
            if self.sigma:
                ech.insert(self.free_piece(w, m).coords(self.sigma))
                polys.append(self.sigma)
        elif w < -2 and m <= -2:
            piece = self.free_piece(w, m)
            for i, g in enumerate(self.gens):
                lw, lm = w - g.w, m - g.m
                if lw > -2 or lm > -2 or lm < 2 * lw:
                    continue
                for z in self.ideal(lw, lm)[1]:
                    cand = tbracket(letter(i), z)
                    if cand and ech.insert(piece.coords(cand)):
                        polys.append(cand)
        self._ideal[key] = (ech, polys)
        return self._ideal[key]

    def quotient(self, w, m):
        if (w, m) not in self._quot:
            self._quot[w, m] = QuotientPiece(self, w, m)
        return self._quot[w, m]

    def quotient_basis(self, w, m):
        q = self.quotient(w, m)
        return q.describe(), q.coords

    # N and ad
    def apply_N_poly(self, poly):
        out = {}
        for word, c in poly.items():
            for t, a in enumerate(word):
                img = self.n_gen.get(a)
                if not img:
                    continue
                for (b,), x in img.items():
                    k = word[:t] + (b,) + word[t + 1:]
                    y = out.get(k, 0) + c * x
                    if y:
                        out[k] = y
                    else:
                        out.pop(k)
        return out

    def n_matrix(self, w, m):
        """Matrix (rows: target coords) of N from piece (w,m) to (w,m-2)."""
        key = (w, m)
        if key not in self._nmat:
            src, tgt = self.quotient(w, m), self.quotient(w, m - 2)
            cols = [tgt.coords(self.apply_N_poly(src.basis_poly(k))) for k in range(src.dim)]
            self._nmat[key] = [[cols[j][i] for j in range(src.dim)] for i in range(tgt.dim)]
        return self._nmat[key]

    def ad_generator_matrix(self, i, w, m):
        """Matrix of ad of generator i from piece (w,m) to (w+w_i, m+m_i)."""
        key = (i, w, m)
        if key not in self._admat:
            g = self.gens[i]
            src, tgt = self.quotient(w, m), self.quotient(w + g.w, m + g.m)
            cols = [tgt.coords(tbracket(letter(i), src.basis_poly(k))) for k in range(src.dim)]
            self._admat[key] = [[cols[j][r] for j in range(src.dim)] for r in range(tgt.dim)]
        return self._admat[key]

    def e_star_poly(self, eid):
        return {(i,): c for i, c in enumerate(homology.e_star(self.G, eid)) if c}

    def h1_poly(self, h1coords):
        return {(self.h1_start + j,): c for j, c in enumerate(h1coords) if c}

    def n_e_star_poly(self, eid):
        return self.apply_N_poly(self.e_star_poly(eid))

    def logdelta_vertex_poly(self, v):
        out = {}
        for u, bi, bpi in self.beta_pairs:
            if u == v:
                out = tadd(out, tbracket(letter(bpi), letter(bi)))
        return out

    def element(self, poly, w, m):
        return LieElement(self, (w, m), tuple(self.quotient(w, m).coords(poly)))

    def generator(self, name):
        i = self.names[name]
        g = self.gens[i]
        return self.element(letter(i), g.w, g.m)

    # V and weight-monodromy
    def n_power_matrix(self, w, m, k):
        """Composite N^k from (w,m) to (w, m-2k) as a dense matrix."""
        from .linalg import matmul
        dim = self.quotient(w, m).dim
        M = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
        for s in range(k):
            A = self.n_matrix(w, m - 2 * s)
            if not A or not M or not M[0]:
                rows = self.quotient(w, m - 2 * (s + 1)).dim
                M = [[Fraction(0)] * dim for _ in range(rows)]
                continue
            M = matmul(A, M)
        return M

    def v_basis(self, n):
        """Basis of the part of (-n,-2) killed by N^(n-1), in quotient coordinates."""
        key = ("V", n)
        if key not in self._nmat:
            from .linalg import nullspace
            dim = self.quotient(-n, -2).dim
            if n == 1:
                basis = []
            else:
                M = self.n_power_matrix(-n, -2, n - 1)
                basis = nullspace([r for r in M if any(r)], dim)
            self._nmat[key] = basis
        return self._nmat[key]

    def wm_check(self, n, i):
        """N^i : gr^M_{-n+i} -> gr^M_{-n-i} on gr^W_{-n}; returns (dim_src, dim_tgt, rank)."""
        if i == 0:
            return None, None, None
        src = self.quotient(-n, -n + i)
        tgt = self.quotient(-n, -n - i)
        ech = Echelon()
        for k in range(src.dim):
            img = self.apply_N_poly(src.basis_poly(k))
            for _ in range(i - 1):
                img = self.apply_N_poly(img)
            v = tgt.coords(img)
            ech.insert({j: c for j, c in enumerate(v) if c})
        return src.dim, tgt.dim, ech.rank()


def wm_isomorphism_check(G, n, i, alg=None):
    alg = alg or LieAlgebra(G)
    ds, dt, r = alg.wm_check(n, i)
    if i == 0:
        return {"n": n, "i": i, "bijective": True, "trivial": True}
    return {"n": n, "i": i, "dim_source": ds, "dim_target": dt, "rank": r,
            "bijective": ds == dt == r}


class LieElement:
    def __init__(self, alg, bideg, coords):
        self.alg = alg
        self.bideg = bideg
        self.coords = tuple(Fraction(c) for c in coords)

    def poly(self):
        return self.alg.quotient(*self.bideg).element(self.coords)

    def bracket(self, other):
        w, m = self.bideg[0] + other.bideg[0], self.bideg[1] + other.bideg[1]
        return self.alg.element(tbracket(self.poly(), other.poly()), w, m)

    def apply_N(self):
        w, m = self.bideg
        return self.alg.element(self.alg.apply_N_poly(self.poly()), w, m - 2)

    def __add__(self, other):
        assert self.bideg == other.bideg
        return LieElement(self.alg, self.bideg, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        return LieElement(self.alg, self.bideg, [a * c for a in self.coords])

    def is_zero(self):
        return not any(self.coords)

    def __eq__(self, other):
        return self.bideg == other.bideg and self.coords == other.coords

    def __repr__(self):
        return f"LieElement{self.bideg}{list(map(str, self.coords))}"


def bracket(x, y):
    return x.bracket(y)


def apply_N(x):
    return x.apply_N()
