import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcanon import corpus
from graphcanon.canonical import replay_graph
from graphcanon.extnat import OMEGA
from graphcanon.graph import ContractError, graph_iso, make
from graphcanon.invariant import graph_key
from graphcanon.moves import (apply_move, breaking_free, canonical_quotient, connecting_matrix, connecting_polynomial,
                              cut, de_state, direct_exit, exit_move_feasible, feasible_set, full_reduce, move_exit,
                              out_amalgamate, out_split, poly_str, realize, single_reduction, total_out_split)

from movegen import random_partition


def test_breaking_free_pairs():
    for g, want in corpus.breaking_pairs():
        h, tr = breaking_free(g)
        assert graph_iso(h, want) is not None
        assert replay_graph(g, tr).fingerprint() == h.fingerprint()


def test_direct_exit_shortcuts_paths():
    g = make(["v", "a", "b", "c"], [("v", "v"), ("v", "a"), ("a", "b"), ("b", "c"), ("c", "b")])
    h, _ = direct_exit(g)
    want = make(["v", "b", "c", "t"], [("v", "v"), ("v", "c"), ("b", "c"), ("c", "b"), ("t", "b")])
    assert graph_iso(h, want) is not None
    assert graph_key(h) == graph_key(g)


def test_connecting_matrix_and_polynomial():
    g = corpus.connecting_example()
    assert connecting_matrix(g) == [[1, 0, 4, 2], [0, 3, 0, 1]]
    assert connecting_polynomial(g) == {1: 1, 3: 7, 4: 2, 5: 1}
    assert poly_str(connecting_polynomial(g)) == "t + 7t^3 + 2t^4 + t^5"


def test_emitter_row_into_spine():
    g = make(["v0", "w0", "w1", "w2"], [("v0", "w2", OMEGA), ("v0", "w0", OMEGA), ("w2", "w1"), ("w1", "w0")])
    assert connecting_matrix(g) == [[OMEGA, 0, OMEGA]]


def test_feasible_sets():
    E0, E, F = corpus.two_feasible()
    assert feasible_set(E0) == {"v0", "v1"}
    assert graph_key(E0) == graph_key(E) == graph_key(F)
    G, C = corpus.single_feasible()
    assert feasible_set(G) == {"v0"}
    h, _ = canonical_quotient(G, "v0")
    assert graph_iso(h, C) is not None


def test_two_cycle_family_certificate():
    # the (1,0)- and (0,1)-tailed graphs with exits (1,2) are joined by legal moves
    a, _ = direct_exit(corpus.two_cycle_family(1, 2, 1, 0))
    b, _ = direct_exit(corpus.two_cycle_family(1, 2, 0, 1))
    st = de_state(a)
    st = move_exit(st, 0, 0)
    st = single_reduction(st, 1, 0)
    st = single_reduction(st, 0, 1)
    st = move_exit(st, 1, 1)
    assert graph_iso(realize(st), realize(de_state(b))) is not None


def test_exit_move_rejects_missing_exit():
    st = de_state(corpus.toeplitz())
    with pytest.raises(ContractError):
        move_exit(st, 0, 0, count=5)


@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_exit_feasibility_matches_orbit(m, n, data):
    # source exit v_j -> w_i, target exit v_k -> w_l
    j, k = data.draw(st.integers(0, m - 1)), data.draw(st.integers(0, m - 1))
    i, l = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
    orbit = {((j - t) % m, (i - t) % n) for t in range(m * n)}
    assert exit_move_feasible(m, n, j, i, l, k) == ((k, l) in orbit)


def test_split_then_amalgamate_roundtrip():
    T = corpus.toeplitz()
    h, mv = out_split(T, "v", [{"v": 1}, {"w": 1}])
    assert len(h.vertices) == 3
    back, _ = out_amalgamate(h, mv.params["new"], "v")
    assert graph_iso(back, T) is not None
    assert apply_move(T, mv).fingerprint() == h.fingerprint()


def test_split_rejects_bad_partitions():
    T = corpus.toeplitz()
    with pytest.raises(ContractError):
        out_split(T, "v", [{"v": 1}])
    with pytest.raises(ContractError):
        out_split(T, "v", [{"v": 1}, {}, {"w": 1}])
    E = corpus.double_emitter()
    with pytest.raises(ContractError):
        out_split(E, "v", [{"a": OMEGA}, {"b": OMEGA}])


def exits_of(st):
    return [(j, i) for j in range(st.m) for i in range(st.n) if st.exits[j][i] != 0]


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_moves_preserve_key(seed):
    rng = random.Random(seed)
    g = corpus.random_sne(rng, 8)
    k = graph_key(g)
    d, _ = direct_exit(g)
    assert graph_key(d) == k
    ts, _ = total_out_split(g)
    assert graph_key(ts) == k
    c, _ = cut(d)
    assert graph_key(c) == k
    try:
        st0 = de_state(d)
    except ContractError:
        return
    if st0.m and st0.n:
        for j, i in exits_of(st0)[:2]:
            s1 = move_exit(st0, j, i)
            assert graph_key(realize(s1)) == k
            s2, _ = full_reduce(s1)
            assert graph_key(realize(s2)) == k


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_cut_is_idempotent(seed):
    g = corpus.random_sne(random.Random(seed), 8)
    c, _ = cut(g)
    c2, _ = cut(c)
    assert c2.fingerprint() == c.fingerprint()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_random_split_preserves_key(seed):
    rng = random.Random(seed)
    g = corpus.random_sne(rng, 7, weights=False)
    v = rng.choice([x for x in g.vertices if g.out(x)] or [None])
    if v is None:
        return
    h, mv = out_split(g, v, random_partition(rng, g.out(v)))
    assert graph_key(h) == graph_key(g)
    back, _ = out_amalgamate(h, mv.params["new"], v)
    assert graph_iso(back, g) is not None
