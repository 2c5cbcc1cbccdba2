import warnings
from fractions import Fraction as Q

import pytest

from grappa import homology
from grappa.graph import Edge, GraphPoint, ReductionGraph, random_point
from grappa.harmonic import pdegree, laplacian_op
from grappa.kummer import Kummer, kummer, mu, ode_oracle, w2_closed_form, w2_relation
from grappa.linalg import Vec


def test_loop_weight_two(graphs):
    G = graphs["loop"]
    m = mu(G, 2)
    assert m.basis == [[["1", "logdelta:h"]]]
    assert m.measure.edges["e"] == [Vec([-1])]
    assert m.measure.halves["h"] == Vec([1])
    assert not m.measure.vertices.get("v")
    K = Kummer(G)
    for k in range(1, 6):
        s = Q(k, 6)
        # (s^2 - s)/2 along the loop, s along the half-edge
        assert K.kummer(G.point("e", s), 2)[2] == Vec([(s * s - s) / 2])
        assert K.kummer(G.point("h", s), 2)[2] == Vec([s])


def test_weight_one_is_zero(graphs):
    for G in graphs.values():
        K = Kummer(G, depth=2)
        assert K.kummer(G.point(min(G.genus)), 2)[1] == Vec([])
        assert K.mu(1).dim == 0


def test_mass_zero(graphs):
    for G in graphs.values():
        K = Kummer(G, depth=4)
        for n in (2, 3, 4):
            assert K.mu(n).total_mass().is_zero()


def test_potential_is_pinned(graphs, rng):
    for G in graphs.values():
        b = random_point(G, rng)
        K = Kummer(G, base=b, depth=3)
        for r in (2, 3):
            assert K.kummer(b, 3)[r].is_zero()
            assert laplacian_op(G, K.j_ambient(r)) == K.mu_ambient(r)


def test_degrees_and_leading_terms(graphs):
    for G in graphs.values():
        K = Kummer(G, depth=4)
        for n in (2, 3, 4):
            j = K.j_ambient(n)
            for e in G.edges:
                p = j.edges.get(e, [])
                assert pdegree(p) <= n
                if not any(homology.e_star(G, e)):
                    assert pdegree(p) <= 1
                else:
                    assert (p[n] if len(p) > n else 0) == K.leading_coefficient(e, n)
            for h in G.half_edges:
                assert pdegree(j.halves.get(h, [])) <= 1


def test_ode_oracle(graphs):
    for G in graphs.values():
        assert ode_oracle(Kummer(G, depth=3), 3) == []


def test_closed_form_and_relation(graphs, rng):
    for G in graphs.values():
        K = Kummer(G, depth=2)
        g = w2_closed_form(K)
        for _ in range(5):
            x = random_point(G, rng)
            assert K.j_ambient(2)(x) == g(x) - g(K.base)
        assert w2_relation(K) == 0


def test_change_of_base(graphs, rng):
    # weight 2 is additive in the basepoint: j_b(x) = j_a(x) - j_a(b)
    for G in graphs.values():
        a, b, x = (random_point(G, rng) for _ in range(3))
        ja, jb = Kummer(G, a, 2), Kummer(G, b, 2)
        assert jb.j_ambient(2)(x) == ja.j_ambient(2)(x) - ja.j_ambient(2)(b)


def test_bridge_graph_is_linear(graphs):
    G = graphs["bridge"]
    j = Kummer(G, depth=3).j_ambient(2)
    assert pdegree(j.edges["e"]) == 1


def test_semistable_warns_and_unstable_refused(graphs):
    with pytest.warns(UserWarning, match="semistable"):
        Kummer(graphs["x0banana"])
    bad = ReductionGraph({"a": 0, "b": 1}, [Edge("e", "a", "b", Q(1))])
    with pytest.raises(ValueError):
        Kummer(bad)


def test_module_functions(graphs):
    G = graphs["ban3"]
    x = G.parse_point("e1@1/2")
    vals = kummer(G, GraphPoint("v", "u"), x, 3)
    assert set(vals) == {1, 2, 3}
    assert len(vals[2]) == 2 and len(vals[3]) == 4
