import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcanon import corpus
from graphcanon.extnat import OMEGA
from graphcanon.graph import ContractError, InputError, make
from graphcanon.monoid import (V, classify_generator, format_expr, freeze, in_interval, monoid_eq, parse_expr,
                               relation_instances, rewrite_step, sites, vertex)

T = corpus.toeplitz()
C2 = corpus.isolated_cycle(2)
EM = make(["v", "a", "b"], [("v", "a", OMEGA), ("v", "b", OMEGA)])


def P(text, g=T):
    return parse_expr(text, g)


def test_parse_format_roundtrip():
    x = P("2*t^-1*w + v + t^3*v")
    assert format_expr(x) == "v + t^3*v + 2*t^-1*w"
    assert freeze(parse_expr(format_expr(x), T)) == freeze(x)
    q = parse_expr("q{v;a:2,b:1} + t^1*b", EM)
    assert format_expr(parse_expr(format_expr(q), EM)) == format_expr(q)


@pytest.mark.parametrize("text", ["x", "t^*v", "q{w;v:1}", "v +"])
def test_parse_errors(text):
    with pytest.raises(InputError):
        parse_expr(text, T)


def test_rewrite_step_regular_vertex():
    assert format_expr(rewrite_step(T, P("v"), (0, V("v"), "A1"))) == "t^1*v + t^1*w"


def test_rewrite_step_emitter():
    out = rewrite_step(EM, parse_expr("v", EM), (0, V("v"), "A2", {"a": 1}))
    assert format_expr(out) == "t^1*a + q{v;a:1}"


def test_toeplitz_equalities():
    assert monoid_eq(T, P("v"), P("t^1*v + t^1*w")).value is True
    assert monoid_eq(T, P("v"), P("t^3*v + t^1*w + t^2*w + t^3*w")).value is True
    no = monoid_eq(T, P("v"), P("w"))
    assert no.value is False and no.invariant["invariant"] == "sink-degree census"
    assert monoid_eq(T, P("v"), P("t^1*v")).value is False


def test_cycle_periodicity():
    assert monoid_eq(C2, P("c0", C2), P("t^2*c0", C2)).value is True
    no = monoid_eq(C2, P("c0", C2), P("t^1*c0", C2))
    assert no.value is False and no.invariant["invariant"] == "cycle-coefficient residue"


def test_emitter_equality():
    x, y = parse_expr("v", EM), parse_expr("q{v;a:2,b:1} + t^1*b + 2*t^1*a", EM)
    assert monoid_eq(EM, x, y).value is True


def test_interval():
    assert in_interval(T, P("t^-1*w")).value is False
    yes = in_interval(T, P("t^1*w"))
    assert yes.value is True and yes.F == ("v",)
    assert in_interval(T, P("v")).value is True


def test_generator_classes():
    assert str(classify_generator(T, "v")) == "Aperiodic"
    assert str(classify_generator(T, "w")) == "Incomparable"
    assert str(classify_generator(C2, "c0")) == "Periodic(2)"
    assert str(classify_generator(corpus.isolated_cycle(3), "c1")) == "Periodic(3)"
    with pytest.raises(ContractError):
        classify_generator(T, "nope")


def test_relation_instances_hold():
    for g in (T, EM, corpus.four_class()["E1"]):
        for lhs, rhs in relation_instances(g):
            assert monoid_eq(g, lhs, rhs).value is True


def test_out_of_scope_is_unknown_not_false():
    rose = corpus.figure_eight()
    v = monoid_eq(rose, parse_expr("a", rose), parse_expr("a + a", rose))
    assert v.value is not False


@given(st.integers(0, 10 ** 6), st.integers(1, 4))
@settings(max_examples=40, deadline=None)
def test_rewrites_are_sound(seed, steps):
    rng = random.Random(seed)
    g = corpus.random_sne(rng, 6)
    v = rng.choice(g.vertices)
    x = vertex(v, rng.randint(-2, 2))
    y = x
    for _ in range(steps):
        opts = list(sites(g, y))
        if not opts:
            break
        y = rewrite_step(g, y, rng.choice(opts))
    assert monoid_eq(g, x, y).value is not False
    assert monoid_eq(g, y, x).value is not False
