"""Admissible pairs, breaking vertices, porcupine-quotients, clusters and composition series."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import networkx as nx

from .extnat import OMEGA, Seq, add, is_omega, mul, sub, total
from .graph import (ContractError, Graph, OutOfScope, Ray, cycles_disjoint, is_hereditary,
                    is_saturated, saturated_closure)


@dataclass(frozen=True)
class AdmissiblePair:
    h: frozenset
    s: frozenset = frozenset()

    def le(self, other: "AdmissiblePair") -> bool:
        return self.h <= other.h and self.s <= (other.h | other.s)

    def to_json(self, g: Graph) -> dict:
        return {"h": g.order(self.h), "s": g.order(self.s)}


def pair(h=(), s=()) -> AdmissiblePair:
    return AdmissiblePair(frozenset(h), frozenset(s))


def _check_hs(g: Graph, h):
    if not set(h) <= set(g.vertices):
        raise ContractError("vertex set contains unknown vertices")
    if not is_hereditary(g, h) or not is_saturated(g, h):
        raise ContractError("vertex set is not hereditary and saturated")


def breaking_vertices_rel(g: Graph, h, gset) -> set:
    """B_H^G: infinite emitters outside H with 0 < edges into G - H < omega."""
    h, gset = set(h), set(gset)
    out = set()
    for v in g.vertices:
        if v in h or not g.is_infinite_emitter(v):
            continue
        k = total(m for d, m in g.out(v).items() if d in gset and d not in h)
        if k != 0 and not is_omega(k):
            out.add(v)
    return out


def breaking_vertices(g: Graph, h) -> set:
    _check_hs(g, h)
    return breaking_vertices_rel(g, h, g.vertices)


def is_admissible(g: Graph, p: AdmissiblePair) -> bool:
    if not (is_hereditary(g, p.h) and is_saturated(g, p.h)):
        return False
    return p.s <= breaking_vertices_rel(g, p.h, g.vertices)


def _check_pair(g: Graph, p: AdmissiblePair):
    _check_hs(g, p.h)
    if not p.s <= breaking_vertices_rel(g, p.h, g.vertices):
        raise ContractError("S is not a set of breaking vertices of H")


def hereditary_saturated_sets(g: Graph) -> list:
    out = []
    vs = g.vertices
    for r in range(len(vs) + 1):
        for c in combinations(vs, r):
            if is_hereditary(g, c) and is_saturated(g, c):
                out.append(frozenset(c))
    return out


def admissible_pairs(g: Graph) -> list:
    out = []
    for h in hereditary_saturated_sets(g):
        b = g.order(breaking_vertices_rel(g, h, g.vertices))
        for r in range(len(b) + 1):
            for s in combinations(b, r):
                out.append(AdmissiblePair(h, frozenset(s)))
    return out


# ---------------------------------------------------------------- porcupine-quotient

def _wname(seq) -> str:
    return "w^" + ".".join(seq)


def _count_paths(g: Graph, last_edges: dict, limit: int = 4000):
    """Weighted counts of paths ending with one of last_edges {(src, dst): mult}, by length.

    Returns (Seq of counts, finite) where finite tells whether the family of vertex sequences is finite.
    """
    # state[u] = number of paths from u of the current length whose last edge is in last_edges
    state = {}
    for (s, d), k in last_edges.items():
        state[s] = add(state.get(s, 0), k)
    counts = []
    seen = {}
    length = 1
    while True:
        key = tuple(sorted((u, str(x)) for u, x in state.items() if x != 0))
        if not key:
            return Seq.finite(counts).shift(1), True
        if key in seen:
            start = seen[key]
            return Seq(tuple(counts[:start]), tuple(counts[start:])).normal().shift(1), False
        seen[key] = len(counts)
        counts.append(total(mul(g.w(u), x) for u, x in state.items()))
        if length > limit:
            raise OutOfScope("porcupine path family does not settle into a periodic pattern")
        nxt = {}
        for u, x in state.items():
            if x == 0:
                continue
            for s, k in g.inn(u).items():
                nxt[s] = add(nxt.get(s, 0), mul(k, x))
        state = nxt
        length += 1


def _is_finite_family(g: Graph, sources) -> bool:
    """True if no cycle reaches any of the given vertices."""
    G = g.nx()
    anc = set(sources)
    for v in sources:
        anc |= nx.ancestors(G, v)
    sub_g = G.subgraph(anc)
    return nx.is_directed_acyclic_graph(sub_g)


def porcupine_quotient(g: Graph, lower: AdmissiblePair, upper: AdmissiblePair) -> Graph:
    """(G,T)/(H,S). Infinite path families are presented as rays with tails."""
    _check_pair(g, lower)
    _check_pair(g, upper)
    if not lower.le(upper):
        raise ContractError("lower pair is not below upper pair")
    if g.rays:
        raise OutOfScope("porcupine-quotient of a graph with rays is not supported")
    H, S, G, T = set(lower.h), set(lower.s), set(upper.h), set(upper.s)
    GH = G - H
    TS = T - S
    core = GH | TS
    B = breaking_vertices_rel(g, H, G)
    primed = ((G | T) - S) & B

    vertices = [v for v in g.vertices if v in core]
    weight = {v: g.w(v) for v in vertices}
    edges: dict = {}

    def put(s, d, k):
        edges[(s, d)] = add(edges.get((s, d), 0), k)

    for (s, d), k in g.edges.items():
        if d in GH and s in core:
            put(s, d, k)

    # last edges of F1 (into G - H from outside) and F2 (into T - S, any source)
    roots: dict = {}
    for (s, d), k in g.edges.items():
        if (d in GH and s not in core) or d in TS:
            roots.setdefault(d, {})[(s, d)] = k

    rays = []
    for d in g.order(roots):
        last = roots[d]
        if _is_finite_family(g, [s for s, _ in last]):
            # materialize the tree of vertex sequences; weight = number of paths
            stack = [((s, d), k) for (s, _), k in last.items()]
            while stack:
                seq, paths = stack.pop()
                name = _wname(seq)
                vertices.append(name)
                weight[name] = mul(g.w(seq[0]), paths)
                put(name, _wname(seq[1:]) if len(seq) > 2 else d, 1)
                for u, k in g.inn(seq[0]).items():
                    stack.append(((u,) + seq, mul(paths, k)))
        else:
            counts, _ = _count_paths(g, last)
            if any(s in primed or d in primed for s, _ in last):
                raise OutOfScope("infinite porcupine with primed breaking vertices")
            rays.append(Ray(d, _ray_tails(counts)))

    for v in g.order(primed):
        vp = v + "'"
        vertices.append(vp)
        for s, k in g.inn(v).items():
            if v in TS:
                src = _wname((s, v))
            elif s in core:
                src = s
            else:
                src = _wname((s, v))
            if src.startswith("w^") and src not in weight:
                raise OutOfScope("primed copy needs a path vertex that was not materialized")
            put(src, vp, 1 if src.startswith("w^") else k)
    return Graph(tuple(vertices), edges, {v: x for v, x in weight.items() if x != 1}, tuple(rays))


def _ray_tails(counts: Seq) -> Seq:
    """Tails for a ray whose depth-d layer has counts[d] vertices (d >= 1)."""
    c = counts.normal()
    plen = max(len(c.prefix), 1)
    per = len(c.period)
    pre = tuple(sub(c[i], 1) for i in range(1, plen))
    prd = tuple(sub(c[i], 1) for i in range(plen, plen + per))
    return Seq(pre, prd).normal()


def quotient(g: Graph, p: AdmissiblePair) -> Graph:
    return porcupine_quotient(g, p, pair(g.vertices))


def porcupine(g: Graph, p: AdmissiblePair) -> Graph:
    return porcupine_quotient(g, pair(), p)


# ---------------------------------------------------------------- clusters

@dataclass(frozen=True)
class Cluster:
    kind: str  # "sink", "cycle", "extreme", "path"
    vertices: tuple
    length: int = 0

    def to_json(self) -> dict:
        return {"type": self.kind, "len": self.length, "cluster": list(self.vertices)}


def _cycle_order(g: Graph, comp: set) -> Optional[tuple]:
    """The vertices of comp in cycle order if comp carries exactly one simple cycle and no exits."""
    start = g.order(comp)[0]
    seq = [start]
    v = start
    while True:
        outs = g.out(v)
        if len(outs) != 1:
            return None
        (d, k), = outs.items()
        if k != 1 or d not in comp:
            return None
        if d == start:
            break
        seq.append(d)
        v = d
    return tuple(seq) if len(seq) == len(comp) else None


def terminal_clusters(g: Graph) -> list:
    G = g.nx()
    out = []
    for comp in nx.strongly_connected_components(G):
        if any(d not in comp for v in comp for d in g.out(v)):
            continue
        vs = g.order(comp)
        if len(vs) == 1 and g.is_sink(vs[0]):
            out.append(Cluster("sink", (vs[0],), 0))
            continue
        cyc = _cycle_order(g, comp)
        if cyc is not None:
            out.append(Cluster("cycle", cyc, len(cyc)))
        else:
            out.append(Cluster("extreme", tuple(vs), 0))
    out.sort(key=factor_key)
    return out


_KIND_RANK = {"sink": 0, "cycle": 1, "extreme": 2, "path": 3}


def factor_key(c: Cluster):
    return (_KIND_RANK[c.kind], c.length, c.vertices)


def terminal_vertices(g: Graph) -> set:
    return {v for c in terminal_clusters(g) for v in c.vertices}


def ter(g: Graph) -> set:
    return saturated_closure(g, terminal_vertices(g))


def is_cofinal(g: Graph) -> bool:
    cl = terminal_clusters(g)
    return len(cl) == 1 and saturated_closure(g, cl[0].vertices) == set(g.vertices)


# ---------------------------------------------------------------- composition series

@dataclass
class CompositionSeries:
    chain: list
    factors: list
    layers: list = field(default_factory=list)  # layer index for each factor

    def __len__(self):
        return len(self.factors)

    def to_json(self, g: Graph) -> dict:
        return {"chain": [p.to_json(g) for p in self.chain],
                "factors": [c.to_json() for c in self.factors]}


class NoCompositionSeries(ValueError):
    pass


def composition_series(g: Graph) -> CompositionSeries:
    if g.rays:
        raise OutOfScope("composition series of a graph with rays is not supported")
    chain = [pair()]
    factors: list = []
    layers: list = []
    H: set = set()
    S: set = set()
    En = g
    layer = 0
    while En.vertices:
        clusters = terminal_clusters(En)
        if not clusters:
            raise NoCompositionSeries(f"layer {layer} has no terminal cluster")
        acc: set = set()
        for c in clusters:
            acc |= set(c.vertices)
            Hi = H | saturated_closure(En, acc)
            S = {v for v in S if v not in Hi}
            chain.append(AdmissiblePair(frozenset(Hi), frozenset(S)))
            factors.append(c)
            layers.append(layer)
        H = set(chain[-1].h)
        if H == set(g.vertices):
            break
        newb = breaking_vertices_rel(g, H, g.vertices) - S
        for v in g.order(newb):
            S = S | {v}
            chain.append(AdmissiblePair(frozenset(H), frozenset(S)))
            factors.append(Cluster("sink", (v,), 0))
            layers.append(layer)
        En = quotient(g, AdmissiblePair(frozenset(H), frozenset(S)))
        layer += 1
    if chain[-1] != pair(g.vertices):
        chain.append(pair(g.vertices))
    return CompositionSeries(chain, factors, layers)


@dataclass(frozen=True)
class SNEDiagnosis:
    ok: bool
    reason: str
    length: int = 0


def is_composition_SNE(g: Graph) -> SNEDiagnosis:
    if not cycles_disjoint(g):
        return SNEDiagnosis(False, "cycles are not mutually disjoint")
    try:
        cs = composition_series(g)
    except (NoCompositionSeries, OutOfScope) as e:
        return SNEDiagnosis(False, f"no composition series: {e}")
    bad = [c for c in cs.factors if c.kind not in ("sink", "cycle")]
    if bad:
        return SNEDiagnosis(False, f"factor of type {bad[0].kind} at {list(bad[0].vertices)}", len(cs))
    return SNEDiagnosis(True, f"composition S-NE of length {len(cs)}", len(cs))
