from fractions import Fraction as Q

import pytest

from grappa import homology
from grappa.graph import Edge, GraphError, GraphPoint, ReductionGraph, random_point, subdivide_many
from grappa.graphops import (block_decomposition, eliminate_half_edge, find_involution,
                             injectivity_census, maximal_cut_systems, quotient_length_check,
                             resistance_reduce, weight2_fiber, grid_points)
from grappa.kummer import Kummer


def test_blocks_examples(graphs):
    bd = block_decomposition(graphs["ban3"])
    assert len(bd.blocks) == 1 and bd.cutvertices == []
    bd = block_decomposition(graphs["bridge"])
    assert sorted(b.kind for b in bd.blocks) == ["bridge", "vertex", "vertex"]
    assert bd.cutvertices == ["v1", "v2"]
    bd = block_decomposition(graphs["figure8"])
    assert [b.edges for b in bd.blocks] == [["a"], ["b"]]
    assert bd.cutvertices == ["v"]


def test_block_tree(graphs, random_graphs):
    for G in list(graphs.values()) + random_graphs:
        bd = block_decomposition(G)
        assert bd.is_tree()
        for i, a in enumerate(bd.blocks):
            for b in bd.blocks[i + 1:]:
                assert len(set(a.vertices) & set(b.vertices)) <= 1


def test_cut_systems(graphs):
    assert [c.edge_ids() for c in maximal_cut_systems(graphs["ban3"])] == [["e1"], ["e2"], ["e3"]]
    assert maximal_cut_systems(graphs["bridge"]) == []
    # a subdivided 2-banana inside a larger graph: the two halves form one system
    G = ReductionGraph({"a": 0, "b": 0, "m": 0},
                       [Edge("p", "a", "m", Q(1)), Edge("q", "m", "b", Q(1)),
                        Edge("r", "a", "b", Q(1)), Edge("s", "a", "b", Q(1))])
    sizes = sorted(len(c.edges) for c in maximal_cut_systems(G))
    assert sizes == [1, 1, 2]


def test_cut_system_functionals(graphs, random_graphs):
    for G in list(graphs.values()) + random_graphs:
        for cs in maximal_cut_systems(G):
            vals = {tuple(s * c for c in homology.e_star(G, e)) for e, s in cs.edges}
            assert len(vals) == 1


def test_weight2_fiber_examples(graphs):
    G = graphs["ban3"]
    x, y = G.point("e1", Q(1, 4)), G.point("e1", Q(3, 4))
    r = weight2_fiber(G, x, y)
    assert r["equal"] and r["agree"]
    assert r["witness"].vertex_map == {"u": "v", "v": "u"}
    H = ReductionGraph({"u": 0, "v": 0}, [Edge("e1", "u", "v", Q(1)), Edge("e2", "u", "v", Q(1)),
                                          Edge("e3", "u", "v", Q(2))])
    r = weight2_fiber(H, H.point("e3", Q(1, 3)), H.point("e3", Q(1, 2)))
    assert not r["equal"] and r["agree"]
    B = graphs["bridge"]
    r = weight2_fiber(B, B.point("e", Q(1, 2)), GraphPoint("v", "v1"))
    assert not r["equal"] and r["agree"]


def test_weight2_refuses_semistable(graphs):
    G = graphs["x0banana"]
    with pytest.raises(ValueError):
        weight2_fiber(G, GraphPoint("v", "v1"), GraphPoint("v", "v2"))


def test_criterion_agrees_on_grids(graphs):
    for name in ("loop", "ban3", "figure8", "cycle4"):
        G = graphs[name]
        pts = grid_points(G, 3)
        K = Kummer(G, depth=2)
        for i in range(len(pts)):
            for k in range(i + 1, len(pts)):
                assert weight2_fiber(G, pts[i], pts[k], K)["agree"]


def test_census(graphs):
    rep = injectivity_census(graphs["loop"], 6, 3)
    pairs = {(c["x"], c["y"]) for c in rep["weight2_collisions"]}
    assert pairs == {("e@1/6", "e@5/6"), ("e@1/3", "e@2/3")}
    assert rep["ok"] and rep["weight3_collisions"] == []
    rep = injectivity_census(graphs["bridge"], 6, 3)
    assert rep["weight2_collisions"] == [] and rep["involutions"] == 0


def test_eliminate_half_edge(graphs, rng):
    G = graphs["loop"]
    red = eliminate_half_edge(G, "h")
    assert red.H.half_edges == {} and red.warning == "result is semistable"
    assert red.point(G.point("h", Q(3))) == GraphPoint("v", "v")
    pts = [random_point(G, rng, 6) for _ in range(5)]
    assert red.check_functoriality(pts, 3) == []
    with pytest.raises(GraphError):
        eliminate_half_edge(G, "nope")


def test_tree_half_edge_elimination():
    T = ReductionGraph({"a": 1, "b": 1}, [Edge("e", "a", "b", Q(1))], {"h": "a"})
    red = eliminate_half_edge(T, "h")
    m = Kummer(red.H, depth=2).mu_ambient(2)
    assert m.edges.get("e", []) == [] or all(c == 0 for c in m.edges["e"])
    assert set(m.vertices) <= {"a", "b"}
    assert red.check_functoriality([T.point("e", Q(1, 2)), T.point("h", Q(1))], 2) == []


def test_resistance_reduce_ban3(graphs, rng):
    G = graphs["ban3"]
    red = resistance_reduce(G, ["e2", "e3"], "u", "v")
    assert sorted(e.length for e in red.H.edges.values()) == [Q(1, 2), Q(1)]
    assert quotient_length_check(G, ["e2", "e3"], "u", "v")
    pts = [random_point(G, rng, 6) for _ in range(5)]
    assert red.check_functoriality(pts, 3) == []


def test_series_reduction():
    a, b = Q(2, 3), Q(3, 2)
    G = ReductionGraph({"x": 0, "m": 0, "y": 0},
                       [Edge("p", "x", "m", a), Edge("q", "m", "y", b), Edge("r", "x", "y", Q(1)),
                        Edge("s", "x", "y", Q(1))])
    red = resistance_reduce(G, ["p", "q"], "x", "y", new_edge="pq")
    new = [e for e in red.H.edges.values() if e.id not in G.edges]
    assert [e.length for e in new] == [a + b]
    assert red.point(GraphPoint("v", "m")) == red.H.point(new[0].id, a)


def test_reduce_rejects_open_interior(graphs):
    G = graphs["ban3"]
    with pytest.raises(GraphError):
        resistance_reduce(G, ["e1"], "u", "u")
    T = ReductionGraph({"x": 0, "m": 0, "y": 0},
                       [Edge("p", "x", "m", Q(1)), Edge("q", "m", "y", Q(1)), Edge("r", "m", "y", Q(1))])
    with pytest.raises(GraphError):
        resistance_reduce(T, ["p", "q"], "x", "y")


def test_relative_decomposition_has_one_cycle():
    # cut a genus-0 2-connected graph along a maximal cut system: blocks glued in a single cycle
    import networkx as nx
    G = ReductionGraph({"a": 0, "b": 0, "c": 0, "d": 0},
                       [Edge("ab", "a", "b", Q(1)), Edge("bc", "b", "c", Q(1)), Edge("cd", "c", "d", Q(1)),
                        Edge("da", "d", "a", Q(1)), Edge("ac", "a", "c", Q(1))])
    for cs in maximal_cut_systems(G):
        cut = set(cs.edge_ids())
        rest = nx.MultiGraph()
        rest.add_nodes_from(G.genus)
        rest.add_edges_from((e.src, e.dst) for e in G.edges.values() if e.id not in cut)
        comps = list(nx.connected_components(rest))
        Q_ = nx.MultiGraph()
        idx = {v: i for i, c in enumerate(comps) for v in c}
        Q_.add_edges_from((idx[G.edges[e].src], idx[G.edges[e].dst]) for e in cut)
        assert len(comps) == len(cut)
        assert Q_.number_of_edges() - Q_.number_of_nodes() + 1 == 1
