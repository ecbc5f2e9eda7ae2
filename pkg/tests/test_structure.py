import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcanon import corpus
from graphcanon.extnat import OMEGA
from graphcanon.graph import ContractError, OutOfScope, graph_iso, make
from graphcanon.structure import (admissible_pairs, breaking_vertices, composition_series, is_admissible, is_cofinal,
                                  is_composition_SNE, pair, porcupine, quotient, ter, terminal_clusters)

from test_graph import small_graphs


def test_layered_example():
    E = corpus.layered_example()
    assert ter(E) == {"v0"}
    assert breaking_vertices(E, {"v0"}) == {"w0", "w1"}
    cs = composition_series(E)
    assert len(cs) == 4
    assert [c.kind for c in cs.factors] == ["sink", "sink", "sink", "cycle"]
    assert [sorted(p.s) for p in cs.chain] == [[], [], ["w1"], ["w0", "w1"], []]
    q = quotient(E, pair({"v0"}, {"w0", "w1"}))
    assert graph_iso(q, make(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "c")])) is not None


def test_quotient_without_breaking_set_primes():
    E = corpus.layered_example()
    q = quotient(E, pair({"v0"}))
    assert sorted(v for v in q.vertices if v.endswith("'")) == ["w0'", "w1'"]


def test_toeplitz_series_and_porcupine():
    T = corpus.toeplitz()
    cs = composition_series(T)
    assert [(c.kind, c.vertices) for c in cs.factors] == [("sink", ("w",)), ("cycle", ("v",))]
    p = porcupine(T, pair({"w"}))
    assert p.vertices == ("w",) and len(p.rays) == 1 and p.rays[0].tails.sum() == 0


def test_finite_porcupine_counts_paths():
    # b is an emitter, so {c} is saturated; the paths into c are b->c and a->b->c
    g = make(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("b", "d", OMEGA)])
    p = porcupine(g, pair({"c"}))
    assert graph_iso(p, make(["x", "y", "c"], [("x", "y"), ("y", "c")])) is not None


def test_sne_diagnosis():
    assert is_composition_SNE(corpus.toeplitz()).ok
    assert is_composition_SNE(corpus.layered_example()).length == 4
    rose = is_composition_SNE(corpus.figure_eight())
    assert not rose.ok and "disjoint" in rose.reason
    assert not is_composition_SNE(make(["a", "b"], [("a", "b", 2), ("b", "a")])).ok


def test_clusters_and_cofinality():
    assert [c.kind for c in terminal_clusters(corpus.isolated_cycle(3))] == ["cycle"]
    assert is_cofinal(corpus.isolated_cycle(3))
    assert not is_cofinal(corpus.toeplitz())
    assert is_cofinal(corpus.spine_three())
    two = make(["a", "b"], [])
    assert len(terminal_clusters(two)) == 2 and not is_cofinal(two)


def test_double_emitter_pairs():
    g = corpus.double_emitter()
    hs = {p.h for p in admissible_pairs(g)}
    assert hs == {frozenset(), frozenset("a"), frozenset("b"), frozenset("ab"), frozenset("abv")}
    assert breaking_vertices(g, {"a"}) == set()


def test_breaking_vertex_counts_finite_edges_only():
    g = make(["v", "a", "b"], [("v", "a", OMEGA), ("v", "b", 2)])
    assert breaking_vertices(g, {"a"}) == {"v"}
    assert breaking_vertices(g, {"b"}) == set()


def test_bad_pairs_raise():
    g = corpus.toeplitz()
    with pytest.raises(ContractError):
        breaking_vertices(g, {"v"})
    with pytest.raises(ContractError):
        quotient(g, pair({"w"}, {"v"}))


def test_rays_out_of_scope_for_series():
    with pytest.raises(OutOfScope):
        composition_series(corpus.cut_spines()["Eomega"])


@given(small_graphs(4))
@settings(max_examples=80, deadline=None)
def test_admissible_pairs_are_admissible_and_closed_under_meet(g):
    pairs = admissible_pairs(g)
    assert all(is_admissible(g, p) for p in pairs)
    assert pair() in pairs and pair(g.vertices) in pairs
    hs = {p.h for p in pairs}
    for a in hs:
        for b in hs:
            assert a & b in hs


@given(small_graphs(4))
@settings(max_examples=60, deadline=None)
def test_series_chain_increases(g):
    try:
        cs = composition_series(g)
    except (OutOfScope, ValueError):
        return
    for lo, hi in zip(cs.chain, cs.chain[1:]):
        assert lo.le(hi) and lo != hi
        assert is_admissible(g, lo) and is_admissible(g, hi)
    assert cs.chain[-1] == pair(g.vertices)
