"""Edge chains, first homology with the cycle pairing, and the functionals e*.

Chains are dicts {edge id: Fraction} in the stored orientation.  H^1 is
represented in the basis dual to :func:`h1_basis`.
"""
from collections import deque
from fractions import Fraction

from . import linalg


def _cache(G, key, build):
    if key not in G._cache:
        G._cache[key] = build()
    return G._cache[key]


def boundary(G, chain):
    out = {}
    for eid, c in chain.items():
        e = G.edges[eid]
        if e.src == e.dst or not c:
            continue
        out[e.dst] = out.get(e.dst, 0) + c
        out[e.src] = out.get(e.src, 0) - c
    return {v: c for v, c in out.items() if c}


def spanning_tree(G):
    """BFS tree from the smallest vertex id, darts explored in edge-id order.

    Returns (set of tree edge ids, parent map vertex -> (dart into it)).
    """
    def build():
        root = min(G.genus)
        parent = {root: None}
        tree = set()
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for d in sorted(G.out_darts(v)):
                w = G.target(d)
                if w not in parent:
                    parent[w] = d
                    tree.add(d[0])
                    queue.append(w)
        return tree, parent
    return _cache(G, "tree", build)


def tree_path(G, a, b):
    """Chain of the tree path from a to b, plus its dart sequence."""
    _, parent = spanning_tree(G)

    def to_root(v):
        out = []
        while parent[v] is not None:
            out.append(parent[v])
            v = G.source(parent[v])
        return out
    up_a, up_b = to_root(a), to_root(b)
    # strip the common tail
    while up_a and up_b and up_a[-1] == up_b[-1]:
        up_a.pop()
        up_b.pop()
    darts = [(e, -s) for e, s in up_a] + list(reversed(up_b))
    return darts


def darts_to_chain(darts):
    chain = {}
    for e, s in darts:
        chain[e] = chain.get(e, 0) + s
    return {e: Fraction(c) for e, c in chain.items() if c}


def h1_basis(G):
    """Fundamental loops of the non-tree edges, in edge-id order.

    Each is returned as an EdgeChain oriented along its non-tree edge.
    """
    def build():
        tree, _ = spanning_tree(G)
        basis = []
        for eid, e in G.edges.items():
            if eid in tree:
                continue
            darts = [(eid, 1)] + tree_path(G, e.dst, e.src)
            basis.append(darts_to_chain(darts))
        return basis
    return _cache(G, "h1", build)


def h1_loop_darts(G, i):
    """Dart sequence of the i-th basis loop, starting at the non-tree edge."""
    tree, _ = spanning_tree(G)
    nontree = [eid for eid in G.edges if eid not in tree]
    e = G.edges[nontree[i]]
    return [(e.id, 1)] + tree_path(G, e.dst, e.src)


def nontree_edges(G):
    tree, _ = spanning_tree(G)
    return [eid for eid in G.edges if eid not in tree]


def edge_pairing(G, a, b):
    """Length-weighted pairing on the edge space."""
    return sum((c * b[e] * G.length(e) for e, c in a.items() if e in b), Fraction(0))


cycle_pairing = edge_pairing


def gram(G):
    def build():
        B = h1_basis(G)
        return [[edge_pairing(G, a, b) for b in B] for a in B]
    return _cache(G, "gram", build)


def gram_inverse(G):
    return _cache(G, "gram_inv", lambda: linalg.inverse(gram(G)) if gram(G) else [])


def coords(G, chain):
    """Coordinates of a cycle in the h1 basis (read off the non-tree edges)."""
    return [Fraction(chain.get(eid, 0)) for eid in nontree_edges(G)]


def from_coords(G, c):
    out = {}
    for ci, gamma in zip(c, h1_basis(G)):
        for e, x in gamma.items():
            out[e] = out.get(e, 0) + ci * x
    return {e: x for e, x in out.items() if x}


def e_star(G, eid):
    """e* in dual-basis coordinates: its value on each basis loop."""
    if eid not in G.edges:
        return [Fraction(0)] * G.betti()
    return [Fraction(gamma.get(eid, 0)) for gamma in h1_basis(G)]


def n_matrix(G):
    """Matrix of N: H^1 -> H_1 in the dual / h1 bases (inverse Gram)."""
    return gram_inverse(G)


def n_apply(G, xi):
    """N of a functional given in dual coordinates, as h1 coordinates."""
    Ginv = gram_inverse(G)
    return [sum((xi[i] * Ginv[i][j] for i in range(len(xi))), Fraction(0))
            for j in range(len(xi))]


def boundary_heights(G):
    """Table <d e, d e'> of height pairings of edge boundaries."""
    def build():
        from .harmonic import divisor_height_vertices
        eids = list(G.edges)
        bd = {e: boundary(G, {e: Fraction(1)}) for e in eids}
        return {(a, b): divisor_height_vertices(G, bd[a], bd[b]) for a in eids for b in eids}
    return _cache(G, "bdh", build)


def lambda_table(G):
    """lambda_{e,e'} over unoriented edges in the stored orientations."""
    def build():
        H = boundary_heights(G)
        lam = {}
        for a in G.edges:
            la = G.length(a)
            for b in G.edges:
                lb = G.length(b)
                if a == b:
                    lam[a, b] = 1 / la - H[a, a] / la ** 2
                else:
                    lam[a, b] = -H[a, b] / (la * lb)
        return lam
    return _cache(G, "lambda", build)


def n_of_e_star(G, eid):
    """N(e*) as an edge chain, via the lambda table.  Returns (chain, table row)."""
    if eid not in G.edges:
        return {}, {}
    lam = lambda_table(G)
    row = {b: lam[eid, b] for b in G.edges}
    return {b: c for b, c in row.items() if c}, row


def adjoint_boundary(G, divisor):
    """d*: divisors -> edge chains, d*(D) = sum <d e, D>/l(e) e."""
    from .harmonic import divisor_height_vertices
    out = {}
    for eid in G.edges:
        c = divisor_height_vertices(G, boundary(G, {eid: Fraction(1)}), divisor) / G.length(eid)
        if c:
            out[eid] = c
    return out


def orth_decompose(G, chain):
    """Split a chain as (cycle part, d*(d chain)), orthogonal for the edge pairing."""
    d = adjoint_boundary(G, boundary(G, chain))
    h = {e: chain.get(e, 0) - d.get(e, 0) for e in set(chain) | set(d)}
    return {e: c for e, c in h.items() if c}, d


def project_h1(G, chain):
    return orth_decompose(G, chain)[0]
