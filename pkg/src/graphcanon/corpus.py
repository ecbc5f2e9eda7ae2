"""Named example graphs and random generators used by the tests and scripts."""
from __future__ import annotations

import random

from .extnat import OMEGA as W
from .graph import Graph, OutOfScope, graph_from_obj, make
from .structure import is_composition_SNE


def obj_graph(vs, es, rays=None) -> Graph:
    """Edges as (from, to, mult[, len]); from=None gives fresh sources."""
    edges = []
    for e in es:
        d = {"from": e[0], "to": e[1], "mult": "omega" if e[2] is W else e[2]}
        if len(e) > 3:
            d["len"] = e[3]
        edges.append(d)
    obj = {"vertices": list(vs), "edges": edges}
    if rays:
        obj["rays"] = rays
    return graph_from_obj(obj)


# ---------------------------------------------------------------- small named graphs

def toeplitz() -> Graph:
    return make(["v", "w"], [("v", "v"), ("v", "w")])


def toeplitz_path(k: int) -> Graph:
    """Toeplitz graph with the exit stretched to a path of length k."""
    inner = [f"p{i}" for i in range(1, k)]
    chain = ["v"] + inner + ["w"]
    return make(["v", "w"] + inner, [("v", "v")] + list(zip(chain, chain[1:])))


def isolated_cycle(m: int) -> Graph:
    vs = [f"c{i}" for i in range(m)]
    return make(vs, [(vs[i], vs[(i + 1) % m]) for i in range(m)])


def figure_eight() -> Graph:
    return make(["a"], [("a", "a", 2)])


def four_class() -> dict:
    """Two 2-cycles p<->q, r<->s joined by two exits in four different patterns, plus tailed variants."""
    base = [("p", "q"), ("q", "p"), ("r", "s"), ("s", "r")]
    vs = ["p", "q", "r", "s"]
    return {
        "E1": make(vs, base + [("q", "r", 2)]),
        "E2": make(vs, base + [("q", "r"), ("q", "s")]),
        "E3": make(vs, base + [("p", "s"), ("q", "r")]),
        "E4": make(vs, base + [("p", "r"), ("q", "r")]),
        "E3'": make(vs + ["z"], base + [("q", "r", 2), ("z", "s")]),
        "E4'": make(vs + ["z"], base + [("q", "r"), ("q", "s"), ("z", "r")]),
    }


def omega_bundle(length: int) -> Graph:
    """v sends omega paths of the given length into a loop at w."""
    return obj_graph(["v", "w"], [("v", "w", W, length), ("w", "w", 1)])


def spine_three() -> Graph:
    """Binary-ish tree of depth 3 into a sink: 12 vertices with path counts (1, 3, 6, 2)."""
    return make(["s0", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k"],
                [("a", "s0"), ("b", "s0"), ("c", "s0"), ("d", "a"), ("e", "a"), ("f", "b"), ("g", "b"),
                 ("h", "c"), ("i", "c"), ("j", "d"), ("k", "d")])


def tails_on_two_cycle() -> tuple:
    """Two one-cluster graphs over a 2-cycle with path lengths {0,1,1,2}."""
    E = make(["a", "b", "v0", "v1"], [("a", "b"), ("b", "v0"), ("v0", "v1"), ("v1", "v0")])
    F = make(["a", "v0", "u", "z"], [("a", "v0"), ("v0", "u"), ("u", "v0"), ("z", "u")])
    return E, F


def shared_canonical() -> tuple:
    """Two non-isomorphic 2-cycle-to-sink graphs with a common canonical form C."""
    E = make(["a", "b", "x", "y"], [("a", "b"), ("b", "a"), ("a", "x"), ("a", "y"), ("b", "y"), ("y", "x")])
    F = make(["a", "b", "x", "y"], [("a", "b"), ("b", "a"), ("b", "x"), ("b", "y", 2), ("y", "x")])
    C = make(["a", "b", "x", "y", "z"],
             [("a", "b"), ("b", "a"), ("a", "y"), ("b", "y", 2), ("y", "x"), ("z", "x")])
    return E, F, C


def two_cycle_family(a00, a01, l0, l1) -> Graph:
    """One edge into a 2-cycle v, exits a00 to w0 and a01 to w1 of a 2-cycle w, l0/l1 tails."""
    vs = ["z", "v0", "v1", "w0", "w1", "t0", "t1"]
    es = [("z", "v0"), ("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0")]
    if a00:
        es.append(("v0", "w0", a00))
    if a01:
        es.append(("v0", "w1", a01))
    wt = {}
    for t, w, l in (("t0", "w0", l0), ("t1", "w1", l1)):
        if l:
            es.append((t, w))
            wt[t] = l
        else:
            vs.remove(t)
    return make(vs, es, wt)


def exit_invariant() -> tuple:
    """Graphs whose exit moves return an isomorphic graph (omega tails absorb the new ones)."""
    a = obj_graph(["v", "w"], [("v", "v", 1), ("v", "w", 2), ("w", "w", 1), (None, "w", W)])
    b = obj_graph(["p", "q", "r", "s"],
                  [("p", "q", 1), ("q", "p", 1), ("q", "r", 1), ("r", "s", 1), ("s", "r", 1),
                   (None, "s", W), (None, "r", W)])
    return a, b


def cut_triple() -> tuple:
    """E, E' (omega tails on w0) and F (one tail on w0): the loop-to-loop example with omega sources at v0."""
    E = obj_graph(["v0", "w0"], [(None, "v0", W), ("v0", "v0", 1), ("v0", "w0", 1), ("w0", "w0", 1)])
    Ep = obj_graph(["v0", "w0"], [(None, "v0", W), ("v0", "v0", 1), ("v0", "w0", 1), ("w0", "w0", 1),
                                  (None, "w0", W)])
    F = obj_graph(["v0", "w0"], [(None, "v0", W), ("v0", "v0", 1), ("v0", "w0", 1), ("w0", "w0", 1),
                                 (None, "w0", 1)])
    return E, Ep, F


def cut_spines() -> dict:
    """Loop with omega sources emitting into a sink w0 with spines of length 1, 2, infinite, and infinite with omega tails."""
    head = [(None, "v0", W), ("v0", "v0", 1), ("v0", "w0", 1)]
    return {
        "E1": obj_graph(["v0", "w0", "w1"], head + [("w1", "w0", 1)]),
        "E2": obj_graph(["v0", "w0", "w1", "w2"], head + [("w1", "w0", 1), ("w2", "w1", 1)]),
        "Eomega": obj_graph(["v0", "w0"], head, [{"to": "w0", "tails": []}]),
        "Eomega2": obj_graph(["v0", "w0"], head, [{"to": "w0", "tails": {"prefix": [0], "period": ["omega"]}}]),
    }


def layered_example() -> Graph:
    """Composition length 4: Ter = {v0}, breaking vertices w0, w1."""
    return make(["w1", "w0", "v0", "v1"],
                [("w1", "v0", W), ("w0", "v0", W), ("w1", "w0"), ("w0", "v1"), ("v1", "v1"), ("v1", "v0")])


def double_emitter() -> Graph:
    """v emits omega edges to each of two sinks."""
    return make(["a", "v", "b"], [("v", "a", W), ("v", "b", W)])


def single_feasible() -> tuple:
    """A 2-cycle fed by one edge, both exits into w0; the second graph is its canonical quotient."""
    E = make(["s", "v0", "v1", "w0", "w1"],
             [("s", "v0"), ("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0"), ("v1", "w0"), ("v0", "w0")])
    C = make(["s", "v0", "v1", "w0", "w1", "t"],
             [("s", "v0"), ("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0"), ("v0", "w1"), ("v0", "w0"),
              ("t", "w0")])
    return E, C


def two_feasible() -> tuple:
    """E0 with both cycle vertices feasible, and its two canonical forms E and F."""
    E0 = make(["v0", "v1", "w0", "w1"],
              [("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0"), ("v1", "w0", 2), ("v0", "w0")])
    E = make(["v0", "v1", "w0", "w1", "t"],
             [("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0"), ("v1", "w1"), ("v1", "w0", 2), ("t", "w0")])
    F = make(["v0", "v1", "w0", "w1", "t1", "t2"],
             [("v0", "v1"), ("v1", "v0"), ("w0", "w1"), ("w1", "w0"), ("v0", "w1", 2), ("v0", "w0"),
              ("t1", "w0"), ("t2", "w0")])
    return E0, E, F


def connecting_example() -> Graph:
    """2-cycle to a sink with spine 3 and connecting matrix [[1,0,4,2],[0,3,0,1]]."""
    return make(["v0", "v1", "w0", "w1", "w2", "w3"],
                [("v0", "v1"), ("v1", "v0"), ("v0", "w3", 2), ("v0", "w2", 4), ("v0", "w0", 1), ("v1", "w3"),
                 ("v1", "w1", 3), ("w3", "w2"), ("w2", "w1"), ("w1", "w0")])


def breaking_pairs() -> list:
    """(graph, its breaking-vertex-free form)."""
    return [
        (make(["a", "b"], [("a", "a"), ("a", "b", W), ("b", "b")]),
         make(["a", "x", "b"], [("a", "a"), ("a", "x"), ("x", "b", W), ("b", "b")])),
        (make(["u", "r", "t"], [("u", "t", W), ("u", "r", 2), ("r", "t", W)]),
         make(["u", "r", "t", "y", "z"], [("u", "t", W), ("r", "t", W), ("y", "r"), ("z", "r")])),
    ]


# ---------------------------------------------------------------- random graphs

def random_two_factor(rng: random.Random) -> Graph:
    """A top cycle (or emitter) over a bottom cycle (or sink) with random exits, tails and quotient trees."""
    m = rng.randint(1, 3)
    n = rng.choice([0, 1, 2, 3])
    vs = [f"v{j}" for j in range(m)]
    es = [(f"v{j}", f"v{(j + 1) % m}") for j in range(m)]
    wt = {}
    ws = [f"w{i}" for i in range(max(n, 1))]
    vs += ws
    if n:
        es += [(f"w{i}", f"w{(i + 1) % n}") for i in range(n)]
    hang = []
    for k in range(rng.randint(0, 2)):
        x = f"h{k}"
        vs.append(x)
        es.append((x, rng.choice(ws + hang)))
        hang.append(x)
        if rng.random() < .3:
            wt[x] = rng.choice([2, W])
    for _ in range(rng.randint(1, 3)):
        es.append((rng.choice(vs[:m]), rng.choice(ws + hang), rng.randint(1, 2)))
    for k in range(rng.randint(0, 2)):
        x = f"z{k}"
        vs.append(x)
        es.append((x, rng.choice(vs[:m] + [f"z{q}" for q in range(k)])))
        if rng.random() < .3:
            wt[x] = rng.choice([2, W])
        if rng.random() < .3:
            es.append((x, rng.choice(ws + hang)))
    return make(vs, es, wt)


def random_one_factor(rng: random.Random) -> Graph:
    """A sink or an exitless cycle with a random tree hanging off it."""
    m = rng.choice([0, 1, 2, 3])
    vs = [f"c{i}" for i in range(max(m, 1))]
    es = [(f"c{i}", f"c{(i + 1) % m}") for i in range(m)] if m else []
    wt = {}
    for k in range(rng.randint(0, 4)):
        x = f"t{k}"
        es.append((x, rng.choice(vs), rng.randint(1, 2)))
        vs.append(x)
        if rng.random() < .2:
            wt[x] = rng.choice([2, W])
    return make(vs, es, wt)


def random_sne(rng: random.Random, max_vertices: int = 8, weights: bool = True) -> Graph:
    """Random composition S-NE graph with one or two factors per component."""
    while True:
        g = random_two_factor(rng) if rng.random() < .7 else random_one_factor(rng)
        if not weights and g.weight:
            continue
        if len(g.vertices) > max_vertices:
            continue
        try:
            if is_composition_SNE(g).ok:
                return g
        except OutOfScope:
            continue


def mixed_corpus() -> list:
    """30 named graphs: the worked examples plus seeded random ones."""
    out = [("toeplitz", toeplitz())]
    out += [(f"toeplitz_path{k}", toeplitz_path(k)) for k in (2, 3)]
    out += [(f"four_{k}", g) for k, g in four_class().items()]
    out += [("omega_bundle1", omega_bundle(1)), ("omega_bundle3", omega_bundle(3))]
    E, F = tails_on_two_cycle()
    out += [("tails_E", E), ("tails_F", F)]
    out += [(f"shared_{k}", g) for k, g in zip("EFC", shared_canonical())]
    out += [(f"cut_{k}", g) for k, g in zip(("E", "Ep", "F"), cut_triple())]
    out += [("isolated2", isolated_cycle(2)), ("spine_three", spine_three())]
    rng = random.Random(7)
    while len(out) < 30:
        out.append((f"random{len(out)}", random_sne(rng)))
    return out
