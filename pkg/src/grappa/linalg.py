"""Exact rational linear algebra.

Small dense work is done with Fractions; anything sizeable goes through
python-flint's fmpq_mat.  ``Vec`` is an immutable rational vector used as a
coefficient type for polynomials whose values live in a finite dimensional
space.
"""
from fractions import Fraction

import flint


def frac(x):
    """Coerce an int, Fraction, fmpq or 'p/q' string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to a rational")


def _to_fmpq(x):
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    return flint.fmpq(x)


def to_flint(rows, ncols=None):
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    flat = [_to_fmpq(v) for row in rows for v in row]
    return flint.fmpq_mat(nrows, ncols, flat)


def from_flint(m):
    return [[frac(v) for v in row] for row in m.tolist()]


def rref(rows, ncols=None):
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    if not rows:
        return [], []
    m, r = to_flint(rows, ncols).rref()
    out = from_flint(m)[:r]
    pivots = []
    for row in out:
        for j, v in enumerate(row):
            if v:
                pivots.append(j)
                break
    return out, pivots


def rank(rows, ncols=None):
    if not rows:
        return 0
    return to_flint(rows, ncols).rank()


def nullspace(rows, ncols):
    """Basis of {x : A x = 0}, one vector per free column."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    red, piv = rref(rows, ncols)
    pset = set(piv)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, piv):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a, b):
    """Solve the square nonsingular system a x = b for a vector b."""
    x = to_flint(a).solve(to_flint([[v] for v in b], 1))
    return [frac(row[0]) for row in x.tolist()]


def inverse(a):
    return from_flint(to_flint(a).inv())


def matmul(a, b):
    return from_flint(to_flint(a) * to_flint(b))


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def independent_columns(vectors, dim):
    """Indices of a maximal independent subset, greedy in the given order."""
    if not vectors:
        return []
    cols = [[vec[i] for vec in vectors] for i in range(dim)]
    _, piv = rref(cols, len(vectors))
    return piv


class Vec:
    """Immutable rational vector supporting +, -, and scalar products.

    The integer 0 acts as a neutral element so that ``sum`` and generic
    polynomial code work unchanged.
    """
    __slots__ = ("c",)

    def __init__(self, coords):
        self.c = tuple(coords)

    @classmethod
    def zero(cls, n):
        return cls([Fraction(0)] * n)

    def __len__(self):
        return len(self.c)

    def __iter__(self):
        return iter(self.c)

    def __getitem__(self, i):
        return self.c[i]

    def __add__(self, o):
        if not isinstance(o, Vec):
            if o == 0:
                return self
            return NotImplemented
        return Vec([a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, Vec):
            if o == 0:
                return self
            return NotImplemented
        return Vec([a - b for a, b in zip(self.c, o.c)])

    def __rsub__(self, o):
        if o == 0:
            return -self
        return NotImplemented

    def __neg__(self):
        return Vec([-a for a in self.c])

    def __mul__(self, s):
        if isinstance(s, Vec):
            return NotImplemented
        return Vec([a * s for a in self.c])

    __rmul__ = __mul__

    def __truediv__(self, s):
        return Vec([a / s for a in self.c])

    def __eq__(self, o):
        if not isinstance(o, Vec) and o == 0:
            return self.is_zero()
        if not isinstance(o, Vec):
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def is_zero(self):
        return not any(self.c)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return "Vec(" + ", ".join(str(a) for a in self.c) + ")"


def is_zero(x):
    if isinstance(x, Vec):
        return x.is_zero()
    return x == 0
