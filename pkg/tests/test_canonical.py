import random

from hypothesis import given, settings
from hypothesis import strategies as st

from graphcanon import corpus
from graphcanon.canonical import (MatrixInvariant, canonical_1SNE, canonical_form, decide, descriptor_iso,
                                  matrix_invariant_iso, realize_1SNE, replay_graph, verify_witness)
from graphcanon.graph import make


def test_spine_three_invariant():
    inv, _ = canonical_1SNE(corpus.spine_three())
    assert inv.to_json() == {"m": 0, "kappa": 12, "mu": [1, 3, 6, 2]}


def test_matrix_invariant_rotation():
    a, b = MatrixInvariant(2, 3, (1, 2)), MatrixInvariant(2, 3, (2, 1))
    assert matrix_invariant_iso(a, b) == (True, 1)
    assert matrix_invariant_iso(a, MatrixInvariant(2, 4, (1, 3))) == (False, None)


def test_realize_roundtrip():
    E, _ = corpus.tails_on_two_cycle()
    inv, _ = canonical_1SNE(E)
    g = realize_1SNE(inv)
    assert len(g.vertices) == 4
    assert matrix_invariant_iso(canonical_1SNE(g)[0], inv)[0]


def test_toeplitz_descriptor():
    d, tr = canonical_form(corpus.toeplitz())
    assert d.to_json() == {"parts": [{"type": "node", "m1": 0, "m2": 1, "spine": {"prefix": [], "period": [1]},
                                      "fea_period": [1], "connect": [1]}]}
    assert tr.steps[-1].kind == "RelativeCanonical"


def test_out_of_scope():
    d = decide(corpus.toeplitz(), corpus.figure_eight())
    assert d.verdict == "out-of-scope" and "disjoint" in d.reason
    three = decide(corpus.layered_example(), corpus.layered_example())
    assert three.verdict == "out-of-scope"


def test_not_iso_reason_names_a_field():
    d = decide(corpus.four_class()["E1"], corpus.four_class()["E2"])
    assert d.verdict == "not-iso" and "differs" in d.reason


def test_witness_rejects_tampering():
    T, T3 = corpus.toeplitz(), corpus.toeplitz_path(3)
    d = decide(T, T3)
    assert verify_witness(T, T3, d)
    d.witness["iota"] = {"0": 5}
    assert not verify_witness(T, T3, d)
    assert not verify_witness(T, corpus.toeplitz_path(2), decide(T, T3))


def test_disconnected_inputs_are_multisets():
    a = make(["v", "w", "x"], [("v", "v"), ("v", "w")])
    b = make(["x", "p", "q"], [("p", "p"), ("p", "q")])
    assert decide(a, b).verdict == "iso"
    assert decide(a, corpus.toeplitz()).verdict == "not-iso"


graphs = st.integers(0, 10 ** 6).map(lambda s: corpus.random_sne(random.Random(s), 7))


@given(graphs, graphs)
@settings(max_examples=40, deadline=None)
def test_decide_reflexive_symmetric(g, h):
    assert decide(g, g).verdict == "iso"
    assert decide(g, h).verdict == decide(h, g).verdict


@given(graphs)
@settings(max_examples=40, deadline=None)
def test_canonical_form_idempotent(g):
    d, tr = canonical_form(g)
    h = replay_graph(g, tr)
    assert descriptor_iso(d, canonical_form(h)[0]) is not None
    assert verify_witness(g, h, decide(g, h))


@given(graphs, st.randoms(use_true_random=False))
@settings(max_examples=40, deadline=None)
def test_relabel_invariance(g, rnd):
    names = list(g.vertices)
    perm = names[:]
    rnd.shuffle(perm)
    h = g.relabel({a: f"r_{b}" for a, b in zip(names, perm)})
    assert canonical_form(g)[0] == canonical_form(h)[0]
