"""Reduction graphs: vertices with genus, metrized edges, half-edges.

Unoriented edges are stored once with a chosen (src, dst); the two darts of
an edge are ``(eid, +1)`` (src -> dst) and ``(eid, -1)`` (dst -> src).
"""
import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

from .linalg import frac


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    length: Fraction


@dataclass(frozen=True, order=True)
class GraphPoint:
    """A vertex (kind 'v'), or a point on an edge ('e') or half-edge ('h').

    Edge distances are measured from the stored source, strictly inside
    (0, length); endpoints are normalized to vertices on construction via
    :meth:`ReductionGraph.point`.
    """
    kind: str
    ident: str
    dist: Fraction = Fraction(0)

    def __str__(self):
        if self.kind == "v":
            return self.ident
        return f"{self.ident}@{self.dist}"


def _parse_rational(s, what):
    try:
        return frac(str(s))
    except (ValueError, ZeroDivisionError):
        raise GraphError(f"malformed rational {s!r} for {what}")


class ReductionGraph:
    def __init__(self, vertices, edges, half_edges=None, *, check=True):
        # vertices: {id: genus}; edges: iterable of Edge; half_edges: {id: src}
        self.genus = dict(sorted(vertices.items()))
        self.edges = {e.id: e for e in sorted(edges, key=lambda e: e.id)}
        self.half_edges = dict(sorted((half_edges or {}).items()))
        if check:
            self._validate()
        self._out = {v: [] for v in self.genus}
        for e in self.edges.values():
            self._out[e.src].append((e.id, 1))
            self._out[e.dst].append((e.id, -1))
        self._halves_at = {v: [] for v in self.genus}
        for h, v in self.half_edges.items():
            self._halves_at[v].append(h)
        self._cache = {}

    def _validate(self):
        if not self.genus:
            raise GraphError("empty graph")
        ids = list(self.genus) + list(self.edges) + list(self.half_edges)
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate id")
        for v, g in self.genus.items():
            if not isinstance(g, int) or g < 0:
                raise GraphError(f"bad genus at {v}")
        for e in self.edges.values():
            for end in (e.src, e.dst):
                if end not in self.genus:
                    raise GraphError(f"dangling endpoint {end!r} of {e.id}")
            if e.length <= 0:
                raise GraphError(f"non-positive length on {e.id}")
        for h, v in self.half_edges.items():
            if v not in self.genus:
                raise GraphError(f"dangling endpoint {v!r} of {h}")
        if not self.is_connected():
            raise GraphError("disconnected graph")

    # basic structure
    @property
    def vertices(self):
        return list(self.genus)

    def darts(self):
        return [(e, s) for e in self.edges for s in (1, -1)]

    def source(self, dart):
        e = self.edges[dart[0]]
        return e.src if dart[1] == 1 else e.dst

    def target(self, dart):
        e = self.edges[dart[0]]
        return e.dst if dart[1] == 1 else e.src

    def length(self, eid):
        return self.edges[eid].length

    def out_darts(self, v):
        return self._out[v]

    def halves_at(self, v):
        return self._halves_at[v]

    def valence(self, v):
        """Number of darts out of v; a loop counts twice."""
        return len(self._out[v])

    def degree(self, v):
        return len(self._out[v]) + len(self._halves_at[v])

    def is_connected(self):
        adj = {v: set() for v in self.genus}
        for e in self.edges.values():
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
        start = next(iter(self.genus))
        seen = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.genus)

    def is_loop(self, eid):
        e = self.edges[eid]
        return e.src == e.dst

    # points
    def point(self, ident, dist=0, reverse=False):
        """Canonical GraphPoint for a vertex id or a distance along an edge."""
        dist = frac(dist)
        if ident in self.genus:
            return GraphPoint("v", ident)
        if ident in self.edges:
            e = self.edges[ident]
            if dist < 0 or dist > e.length:
                raise GraphError(f"distance {dist} outside edge {ident}")
            if reverse:
                dist = e.length - dist
            if dist == 0:
                return GraphPoint("v", e.src)
            if dist == e.length:
                return GraphPoint("v", e.dst)
            return GraphPoint("e", ident, dist)
        if ident in self.half_edges:
            if dist < 0 or reverse:
                raise GraphError(f"bad half-edge point on {ident}")
            if dist == 0:
                return GraphPoint("v", self.half_edges[ident])
            return GraphPoint("h", ident, dist)
        raise GraphError(f"unknown id {ident!r}")

    def parse_point(self, text):
        text = text.strip()
        if "@" not in text:
            if text not in self.genus:
                raise GraphError(f"bad point syntax {text!r}")
            return GraphPoint("v", text)
        ident, d = text.split("@", 1)
        reverse = ident.endswith("'")
        if reverse:
            ident = ident[:-1]
        return self.point(ident, _parse_rational(d, text), reverse)

    def vertex_points(self):
        return [GraphPoint("v", v) for v in self.genus]

    # invariants
    def betti(self):
        return len(self.edges) - len(self.genus) + 1

    def total_genus(self):
        return self.betti() + sum(self.genus.values())

    def euler_char(self):
        return 2 - 2 * self.total_genus() - len(self.half_edges)

    def canonical_divisor(self):
        return {v: 2 * g + self.valence(v) - 2 for v, g in self.genus.items()}

    def stability(self):
        vals = [2 * g + self.degree(v) for v, g in self.genus.items()]
        if all(x > 2 for x in vals):
            return "stable"
        if all(x >= 2 for x in vals):
            return "semistable"
        return "neither"

    # serialization
    def to_dict(self):
        return {
            "vertices": [{"id": v, "genus": g} for v, g in self.genus.items()],
            "edges": [{"id": e.id, "src": e.src, "dst": e.dst,
                       "length": str(e.length)} for e in self.edges.values()],
            "half_edges": [{"id": h, "src": v} for h, v in self.half_edges.items()],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def hash(self):
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, ReductionGraph) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(self.to_json())

    def __repr__(self):
        return (f"ReductionGraph({len(self.genus)} vertices, {len(self.edges)} edges, "
                f"{len(self.half_edges)} half-edges)")


def euler_genus_invariants(G):
    return G.betti(), G.total_genus(), G.euler_char(), G.canonical_divisor()


def stability(G):
    return G.stability()


def graph_from_dict(d):
    try:
        vertices = {}
        for v in d["vertices"]:
            if v["id"] in vertices:
                raise GraphError("duplicate id")
            vertices[str(v["id"])] = int(v.get("genus", 0))
        edges = []
        for e in d.get("edges", []):
            edges.append(Edge(str(e["id"]), str(e["src"]), str(e["dst"]),
                              _parse_rational(e["length"], e["id"])))
        halves = {}
        for h in d.get("half_edges", []):
            if h["id"] in halves:
                raise GraphError("duplicate id")
            halves[str(h["id"])] = str(h["src"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph file: {exc}")
    if len({e.id for e in edges}) != len(edges):
        raise GraphError("duplicate id")
    return ReductionGraph(vertices, edges, halves)


def parse_graph(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph file: {exc}")
    return graph_from_dict(d)


def load_graph(path):
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


# subdivision

def subdivide_many(G, points):
    """Subdivide at every interior point in ``points``.

    Returns (G', {point: vertex id in G'}).  New vertices are named
    ``<edge>#<dist>``; an edge e cut k times becomes e.0 ... e.k, a half-edge
    h cut k times becomes edges h.0 ... h.(k-1) followed by the half-edge h.
    """
    cuts = {}
    for p in points:
        if p.kind != "v":
            cuts.setdefault(p.ident, set()).add(p.dist)
    if not cuts:
        return G, {p: p.ident for p in points}
    vertices = dict(G.genus)
    edges = []
    halves = dict(G.half_edges)
    where = {}
    for e in G.edges.values():
        if e.id not in cuts:
            edges.append(e)
            continue
        ds = sorted(cuts[e.id])
        names = [e.src] + [f"{e.id}#{d}" for d in ds] + [e.dst]
        marks = [Fraction(0)] + ds + [e.length]
        for d, name in zip(ds, names[1:-1]):
            vertices[name] = 0
            where[GraphPoint("e", e.id, d)] = name
        for i in range(len(names) - 1):
            edges.append(Edge(f"{e.id}.{i}", names[i], names[i + 1], marks[i + 1] - marks[i]))
    for h, src in G.half_edges.items():
        if h not in cuts:
            continue
        ds = sorted(cuts[h])
        names = [src] + [f"{h}#{d}" for d in ds]
        marks = [Fraction(0)] + ds
        for d, name in zip(ds, names[1:]):
            vertices[name] = 0
            where[GraphPoint("h", h, d)] = name
        for i in range(len(ds)):
            edges.append(Edge(f"{h}.{i}", names[i], names[i + 1], marks[i + 1] - marks[i]))
        halves[h] = names[-1]
    G2 = ReductionGraph(vertices, edges, halves, check=False)
    G2._parent = (G, cuts)
    out = {}
    for p in points:
        out[p] = p.ident if p.kind == "v" else where[p]
    return G2, out


def subdivide(G, p):
    """Promote an interior point to a genus-0 vertex.  Returns (G', vertex id)."""
    G2, where = subdivide_many(G, [p])
    return G2, where[p]


def lift_point(G, G2, p):
    """The point of the subdivision G2 = subdivide_many(G, ...) lying over p."""
    if p.kind == "v":
        return p
    parent, cuts = G2._parent
    if p.ident not in cuts:
        return p
    ds = sorted(cuts[p.ident])
    if p.dist in ds:
        return GraphPoint("v", f"{p.ident}#{p.dist}")
    marks = [Fraction(0)] + ds
    i = max(k for k, m in enumerate(marks) if m < p.dist)
    if p.kind == "h" and i == len(ds):
        return GraphPoint("h", p.ident, p.dist - marks[i])
    return G2.point(f"{p.ident}.{i}", p.dist - marks[i])


# sampling

def random_point(G, rng, denominator=12):
    """A uniformly chosen rational point with bounded denominator."""
    choices = [("v", v) for v in G.genus] + [("e", e) for e in G.edges] \
        + [("h", h) for h in G.half_edges]
    kind, ident = rng.choice(choices)
    if kind == "v":
        return GraphPoint("v", ident)
    if kind == "e":
        l = G.length(ident)
        top = int(l * denominator)
        return G.point(ident, Fraction(rng.randint(0, top), denominator))
    return G.point(ident, Fraction(rng.randint(0, 2 * denominator), denominator))


def random_stable_graph(rng, max_vertices=6, max_den=4, max_betti=3):
    """Random connected stable graph; stability repaired with half-edges or genus."""
    while True:
        n = rng.randint(1, max_vertices)
        names = [f"v{i}" for i in range(n)]
        edges = []

        def new_len():
            return Fraction(rng.randint(1, 2 * max_den), rng.randint(1, max_den))

        for i in range(1, n):
            j = rng.randrange(i)
            edges.append((names[j], names[i]))
        extra = rng.randint(0 if n > 1 else 1, max_betti)
        for _ in range(extra):
            a, b = rng.choice(names), rng.choice(names)
            edges.append((a, b))
        genus = {v: 0 for v in names}
        halves = {}
        G0 = ReductionGraph(genus, [Edge(f"e{k}", a, b, new_len()) for k, (a, b) in enumerate(edges)],
                            check=False)
        for v in names:
            while 2 * genus[v] + G0.valence(v) + sum(1 for x in halves.values() if x == v) <= 2:
                if rng.random() < 0.7:
                    halves[f"h{len(halves)}"] = v
                else:
                    genus[v] += 1
        if sum(genus.values()) > 1 or len(halves) > 3:
            continue
        G = ReductionGraph(genus, list(G0.edges.values()), halves)
        if G.stability() == "stable":
            return G


BUNDLED = ["loop", "ban3", "bridge", "figure8", "cycle4", "ban112", "x0banana"]


def bundled(name):
    """One of the example graphs shipped with the package."""
    from importlib.resources import files
    if name not in BUNDLED:
        raise GraphError(f"no bundled graph {name!r}")
    return parse_graph(files("grappa").joinpath("data").joinpath(name + ".json").read_text("utf-8"))
