"""Directed multigraphs with extended-natural multiplicities, JSON I/O and basic closures."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import networkx as nx

from .extnat import OMEGA, ExtNat, ExtNatError, Seq, add, from_json, is_omega, to_json, total


class InputError(ValueError):
    """Malformed graph input; message carries a position (line/col or JSON path)."""


class ContractError(ValueError):
    pass


class OutOfScope(ValueError):
    """Input lies outside the class of graphs the tool decides."""


@dataclass(frozen=True)
class Ray:
    """Infinite backward path ... -> r_2 -> r_1 -> to.

    With r_0 = to, tails[k] counts extra sources with a single edge into r_k.
    """

    to: str
    tails: Seq = Seq()


@dataclass
class Graph:
    vertices: tuple
    edges: dict  # (src, dst) -> ExtNat >= 1
    weight: dict = field(default_factory=dict)  # vertex -> ExtNat copies (default 1)
    rays: tuple = ()

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.edges = {k: v for k, v in self.edges.items() if v != 0}
        self.weight = {k: v for k, v in self.weight.items() if v != 1}
        self.rays = tuple(self.rays)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self._out = {v: {} for v in self.vertices}
        self._in = {v: {} for v in self.vertices}
        for (s, d), k in self.edges.items():
            self._out[s][d] = k
            self._in[d][s] = k

    # -- accessors
    def out(self, v) -> dict:
        return self._out[v]

    def inn(self, v) -> dict:
        return self._in[v]

    def out_degree(self, v) -> ExtNat:
        return total(self._out[v].values())

    def w(self, v) -> ExtNat:
        return self.weight.get(v, 1)

    def order(self, vs: Iterable) -> list:
        return sorted(vs, key=self._index.__getitem__)

    def mult(self, s, d) -> ExtNat:
        return self.edges.get((s, d), 0)

    def is_sink(self, v) -> bool:
        return not self._out[v]

    def is_infinite_emitter(self, v) -> bool:
        return is_omega(self.out_degree(v))

    def is_regular(self, v) -> bool:
        return not self.is_sink(v) and not self.is_infinite_emitter(v)

    def nx(self) -> nx.DiGraph:
        G = nx.DiGraph()
        G.add_nodes_from(self.vertices)
        G.add_edges_from(self.edges)
        return G

    def subgraph(self, vs) -> "Graph":
        keep = set(vs)
        return Graph(self.order(keep), {k: m for k, m in self.edges.items() if k[0] in keep and k[1] in keep},
                     {v: x for v, x in self.weight.items() if v in keep},
                     tuple(r for r in self.rays if r.to in keep))

    def relabel(self, mapping: dict) -> "Graph":
        f = lambda v: mapping.get(v, v)
        return Graph(tuple(f(v) for v in self.vertices), {(f(s), f(d)): k for (s, d), k in self.edges.items()},
                     {f(v): x for v, x in self.weight.items()}, tuple(Ray(f(r.to), r.tails) for r in self.rays))

    # -- serialization
    def to_json(self) -> dict:
        out = {"vertices": list(self.vertices),
               "edges": [{"from": s, "to": d, "mult": to_json(k)} for (s, d), k in self.edges.items()]}
        if self.weight:
            out["weights"] = {v: to_json(x) for v, x in self.weight.items()}
        if self.rays:
            out["rays"] = [{"to": r.to, "tails": r.tails.to_json()} for r in self.rays]
        return out

    def sorted_encoding(self) -> str:
        enc = {"vertices": sorted(self.vertices),
               "edges": sorted([s, d, str(to_json(k))] for (s, d), k in self.edges.items()),
               "weights": sorted([v, str(to_json(x))] for v, x in self.weight.items()),
               "rays": sorted([r.to, json.dumps(r.tails.to_json())] for r in self.rays)}
        return json.dumps(enc, sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.sorted_encoding().encode()).hexdigest()[:16]


# ---------------------------------------------------------------- parsing

_EDGE_KEYS = {"from", "to", "mult", "len"}
_TOP_KEYS = {"vertices", "edges", "weights", "rays"}


def _fail(path, msg):
    raise InputError(f"{path}: {msg}")


def parse_graph(text: str) -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return graph_from_obj(obj)


def load_graph(path) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read())


def graph_from_obj(obj) -> Graph:
    if not isinstance(obj, dict):
        _fail("$", "expected an object")
    extra = set(obj) - _TOP_KEYS
    if extra:
        _fail("$", f"unknown field(s) {sorted(extra)}")
    if "vertices" not in obj or "edges" not in obj:
        _fail("$", "missing 'vertices' or 'edges'")
    verts = obj["vertices"]
    if not isinstance(verts, list) or not all(isinstance(v, str) for v in verts):
        _fail("$.vertices", "expected a list of strings")
    if len(set(verts)) != len(verts):
        _fail("$.vertices", "duplicate vertex id")
    vertices = list(verts)
    known = set(vertices)
    edges: dict = {}
    weight: dict = {}
    fresh = 0

    def new_vertex(name, wt=1):
        base, k = name, 0
        while name in known:
            k += 1
            name = f"{base}.{k}"
        known.add(name)
        vertices.append(name)
        if wt != 1:
            weight[name] = wt
        return name

    def put(s, d, k):
        edges[(s, d)] = add(edges.get((s, d), 0), k)

    if not isinstance(obj["edges"], list):
        _fail("$.edges", "expected a list")
    for idx, e in enumerate(obj["edges"]):
        p = f"$.edges[{idx}]"
        if not isinstance(e, dict):
            _fail(p, "expected an object")
        extra = set(e) - _EDGE_KEYS
        if extra:
            _fail(p, f"unknown field(s) {sorted(extra)}")
        if "to" not in e or "from" not in e:
            _fail(p, "missing 'from' or 'to'")
        s, d = e["from"], e["to"]
        if d not in known or not isinstance(d, str):
            _fail(p + ".to", f"undeclared vertex {d!r}")
        if s is not None and (not isinstance(s, str) or s not in known):
            _fail(p + ".from", f"undeclared vertex {s!r}")
        try:
            k = from_json(e.get("mult", 1))
        except ExtNatError as err:
            _fail(p + ".mult", str(err))
        if k == 0:
            _fail(p + ".mult", "multiplicity must be >= 1")
        L = e.get("len", 1)
        if isinstance(L, bool) or not isinstance(L, int) or L < 1:
            _fail(p + ".len", "length must be a positive integer")
        if s is not None and L == 1:
            put(s, d, k)
            continue
        tag = f"{s or '_'}>{d}#{idx}"
        if is_omega(k):
            # one chain standing for omega parallel copies
            nxt = d
            for depth in range(1, L):
                z = new_vertex(f"{tag}.{depth}", OMEGA)
                put(z, nxt, 1)
                nxt = z
            if s is None:
                z = new_vertex(f"{tag}.{L}", OMEGA)
                put(z, nxt, 1)
            else:
                put(s, nxt, OMEGA)
            fresh += 1
            continue
        for c in range(k):
            nxt = d
            for depth in range(1, L):
                z = new_vertex(f"{tag}.{c}.{depth}")
                put(z, nxt, 1)
                nxt = z
            if s is None:
                z = new_vertex(f"{tag}.{c}.{L}")
                put(z, nxt, 1)
            else:
                put(s, nxt, 1)
    for v, x in (obj.get("weights") or {}).items():
        if v not in known:
            _fail("$.weights", f"undeclared vertex {v!r}")
        try:
            weight[v] = from_json(x)
        except ExtNatError as err:
            _fail(f"$.weights.{v}", str(err))
    rays = []
    for idx, r in enumerate(obj.get("rays") or []):
        p = f"$.rays[{idx}]"
        if not isinstance(r, dict) or set(r) - {"to", "tails"} or r.get("to") not in known:
            _fail(p, "expected {'to': vertex, 'tails': sequence}")
        try:
            tails = Seq.from_json(r.get("tails", []))
        except (ExtNatError, AttributeError, TypeError) as err:
            _fail(p + ".tails", str(err))
        rays.append(Ray(r["to"], tails))
    return Graph(tuple(vertices), edges, weight, tuple(rays))


def make(vertices, edges, weight=None, rays=()) -> Graph:
    """Convenience constructor: edges as (src, dst) or (src, dst, mult)."""
    ed: dict = {}
    for e in edges:
        s, d = e[0], e[1]
        k = e[2] if len(e) > 2 else 1
        ed[(s, d)] = add(ed.get((s, d), 0), k)
    return Graph(tuple(vertices), ed, dict(weight or {}), tuple(rays))


# ---------------------------------------------------------------- closures

def tree(g: Graph, vs) -> set:
    """Vertices reachable from vs (including vs)."""
    seen = set(vs)
    stack = list(vs)
    while stack:
        v = stack.pop()
        for d in g.out(v):
            if d not in seen:
                seen.add(d)
                stack.append(d)
    return seen


def root(g: Graph, vs) -> set:
    """Vertices that reach vs (including vs)."""
    seen = set(vs)
    stack = list(vs)
    while stack:
        v = stack.pop()
        for s in g.inn(v):
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


def is_hereditary(g: Graph, vs) -> bool:
    vs = set(vs)
    return all(d in vs for v in vs for d in g.out(v))


def is_saturated(g: Graph, vs) -> bool:
    vs = set(vs)
    for v in g.vertices:
        if v not in vs and g.is_regular(v) and all(d in vs for d in g.out(v)):
            return False
    return True


def saturated_closure(g: Graph, vs) -> set:
    """Least hereditary and saturated set containing vs."""
    h = tree(g, vs)
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v not in h and g.is_regular(v) and all(d in h for d in g.out(v)):
                h |= tree(g, [v])
                changed = True
    return h


@dataclass(frozen=True)
class CycleClass:
    vertices: tuple  # in cycle order, starting at the earliest declared vertex
    disjoint: bool


def simple_cycles(g: Graph) -> list:
    out = []
    for cyc in nx.simple_cycles(g.nx()):
        i = min(range(len(cyc)), key=lambda k: g._index[cyc[k]])
        out.append(tuple(cyc[i:] + cyc[:i]))
    out.sort(key=lambda c: [g._index[v] for v in c])
    return out


def cycle_classes(g: Graph) -> list:
    cycles = simple_cycles(g)
    count: dict = {}
    for c in cycles:
        for v in c:
            count[v] = count.get(v, 0) + 1
    # a parallel edge on a cycle gives a second cycle through the same vertices
    single = lambda c: all(g.mult(c[i], c[(i + 1) % len(c)]) == 1 for i in range(len(c)))
    return [CycleClass(c, single(c) and all(count[v] == 1 for v in c)) for c in cycles]


def cycles_disjoint(g: Graph) -> bool:
    return all(c.disjoint for c in cycle_classes(g))


class VertexClass(str, Enum):
    Sink = "Sink"
    InfiniteEmitter = "InfiniteEmitter"
    RegularOnCycle = "RegularOnCycle"
    RegularOffCycle = "RegularOffCycle"


def on_cycle_vertices(g: Graph) -> set:
    G = g.nx()
    out = set()
    for comp in nx.strongly_connected_components(G):
        if len(comp) > 1:
            out |= comp
        else:
            v = next(iter(comp))
            if G.has_edge(v, v):
                out.add(v)
    return out


def classify(g: Graph, v) -> VertexClass:
    if g.is_sink(v):
        return VertexClass.Sink
    if g.is_infinite_emitter(v):
        return VertexClass.InfiniteEmitter
    if v in on_cycle_vertices(g):
        return VertexClass.RegularOnCycle
    return VertexClass.RegularOffCycle


def graph_iso(g1: Graph, g2: Graph) -> Optional[dict]:
    """A multiplicity- and weight-exact vertex bijection g1 -> g2, or None."""
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return None
    if sorted(r.tails.key() for r in g1.rays) != sorted(r.tails.key() for r in g2.rays):
        return None

    def build(g):
        G = nx.DiGraph()
        rays: dict = {}
        for r in g.rays:
            rays.setdefault(r.to, []).append(r.tails.key())
        for v in g.vertices:
            G.add_node(v, w=str(to_json(g.w(v))), rays=tuple(sorted(rays.get(v, []))))
        for (s, d), k in g.edges.items():
            G.add_edge(s, d, m=str(to_json(k)))
        return G

    gm = nx.algorithms.isomorphism.DiGraphMatcher(
        build(g1), build(g2),
        node_match=lambda a, b: a["w"] == b["w"] and a["rays"] == b["rays"],
        edge_match=lambda a, b: a["m"] == b["m"])
    for mapping in gm.isomorphisms_iter():
        return {v: mapping[v] for v in g1.vertices}
    return None


def weak_components(g: Graph) -> list:
    comps = [g.order(c) for c in nx.weakly_connected_components(g.nx())]
    comps.sort(key=lambda c: g._index[c[0]])
    return comps
