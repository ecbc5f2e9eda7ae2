"""Graph moves: out-splits, direct-exit form, exit moves, reductions and tail cutting.

Two-factor components are handled through an explicit direct-exit state: the quotient part
above the bottom cluster is kept as a graph, the exits of the top cluster form the connecting
matrix, and everything hanging off the bottom cluster is reduced to tail counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import networkx as nx

from .extnat import OMEGA, Seq, add, is_omega, mul, sub, to_json
from .graph import ContractError, Graph, OutOfScope, Ray, graph_from_obj, root, weak_components
from .invariant import arrivals, component_shape, rot, sources, two_factor_data
from .structure import breaking_vertices_rel, composition_series

KINDS = ("OutSplit", "OutAmalgamate", "TotalOutSplit", "BreakingFree", "DirectExit", "RelativeCanonical",
         "ExitMove", "Reduction", "LReduction", "SpineReduction", "OmegaReduction", "TailCut",
         "TailCutInverse", "StepMove", "Relabel")

DIAGONAL = {
    "OutSplit": "OutSplitClass", "OutAmalgamate": "OutSplitClass", "TotalOutSplit": "OutSplitClass",
    "BreakingFree": "OutSplitClass", "ExitMove": "OutSplitClass", "Reduction": "OutSplitClass",
    "LReduction": "OutSplitClass", "SpineReduction": "OutSplitClass", "OmegaReduction": "OutSplitClass",
    "StepMove": "OutSplitClass",
    "DirectExit": "OneSNEMove", "RelativeCanonical": "OneSNEMove", "Relabel": "OneSNEMove",
    "TailCut": "TailCutClass", "TailCutInverse": "TailCutClass",
}

INVERSE = {
    "OutSplit": "OutAmalgamate", "OutAmalgamate": "OutSplit", "TotalOutSplit": "OutAmalgamate",
    "BreakingFree": "OutAmalgamate", "DirectExit": "DirectExit", "RelativeCanonical": "RelativeCanonical",
    "ExitMove": "Reduction", "Reduction": "ExitMove", "LReduction": "LReduction",
    "SpineReduction": "ExitMove", "OmegaReduction": "ExitMove", "TailCut": "TailCutInverse",
    "TailCutInverse": "TailCut", "StepMove": "StepMove", "Relabel": "Relabel",
}


def jsonable(x):
    if is_omega(x):
        return "omega"
    if isinstance(x, Seq):
        return x.to_json()
    if isinstance(x, Graph):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else "|".join(map(str, k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(jsonable(v) for v in x)
    return x


@dataclass(frozen=True)
class Move:
    kind: str
    params: dict = field(default_factory=dict)
    back: dict = field(default_factory=dict)  # parameters of the inverse move

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown move kind {self.kind}")

    @property
    def diagonal_class(self) -> str:
        return DIAGONAL[self.kind]

    def inverse(self) -> "Move":
        return Move(INVERSE[self.kind], self.back, self.params)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": jsonable(self.params), "diagonal_class": self.diagonal_class}


@dataclass
class Trace:
    steps: list
    source: str
    target: str

    def inverse(self) -> "Trace":
        return Trace([s.inverse() for s in reversed(self.steps)], self.target, self.source)

    def then(self, other: "Trace") -> "Trace":
        return Trace(self.steps + other.steps, self.source, other.target)

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "source": self.source, "target": self.target}


def identity_trace(g: Graph) -> Trace:
    fp = g.fingerprint()
    return Trace([], fp, fp)


def _trace(g: Graph, h: Graph, steps) -> Trace:
    return Trace(list(steps), g.fingerprint(), h.fingerprint())


def _fresh(g: Graph, base: str, taken: set) -> str:
    k = 1
    while f"{base}#{k}" in taken:
        k += 1
    name = f"{base}#{k}"
    taken.add(name)
    return name


def union(graphs) -> Graph:
    vs, es, wt, rays = [], {}, {}, []
    for g in graphs:
        vs.extend(g.vertices)
        es.update(g.edges)
        wt.update(g.weight)
        rays.extend(g.rays)
    return Graph(tuple(vs), es, wt, tuple(rays))


# ---------------------------------------------------------------- out-splits

def out_split(g: Graph, v, partition, names=None):
    """Out-split v along a partition of its edge units, given as a list of {dst: count} cells."""
    cells = [{d: k for d, k in c.items() if k != 0} for c in partition]
    if any(not c for c in cells):
        raise ContractError("empty partition cell")
    got: dict = {}
    for c in cells:
        for d, k in c.items():
            got[d] = add(got.get(d, 0), k)
    if got != dict(g.out(v)):
        raise ContractError(f"partition does not cover the edges out of {v}")
    if sum(1 for c in cells if any(is_omega(k) for k in c.values())) > 1:
        raise ContractError("at most one partition cell may be infinite")
    if any(r.to == v for r in g.rays):
        raise OutOfScope("out-split at a vertex fed by a ray")
    taken = set(g.vertices)
    new = list(names) if names else [_fresh(g, v, taken) for _ in cells]
    vs = []
    for u in g.vertices:
        vs.extend(new if u == v else [u])
    es: dict = {}
    for (s, d), k in g.edges.items():
        if s == v:
            continue
        if d == v:
            for x in new:
                es[(s, x)] = k
        else:
            es[(s, d)] = k
    for x, c in zip(new, cells):
        for d, k in c.items():
            if d == v:
                for y in new:
                    es[(x, y)] = add(es.get((x, y), 0), k)
            else:
                es[(x, d)] = add(es.get((x, d), 0), k)
    wt = {u: k for u, k in g.weight.items() if u != v}
    if g.w(v) != 1:
        wt.update({x: g.w(v) for x in new})
    h = Graph(tuple(vs), es, wt, g.rays)
    params = {"vertex": v, "partition": cells, "new": new}
    return h, Move("OutSplit", params, {"vertices": new, "into": v})


def out_amalgamate(g: Graph, vertices, into):
    """Inverse of out_split: merge vertices that receive identical edges."""
    vertices = list(vertices)
    vs_set = set(vertices)
    for s in g.vertices:
        ks = {g.mult(s, x) for x in vertices}
        if len(ks) > 1:
            raise ContractError("vertices do not receive identical edges")
    if len({g.w(x) for x in vertices}) > 1:
        raise ContractError("vertices carry different weights")
    first = vertices[0]
    vs = []
    for u in g.vertices:
        if u == first:
            vs.append(into)
        elif u not in vs_set:
            vs.append(u)
    es: dict = {}
    cells = []
    for (s, d), k in g.edges.items():
        if s in vs_set:
            continue
        if d in vs_set:
            if d == first:
                es[(s, into)] = k
        else:
            es[(s, d)] = k
    for x in vertices:
        cell = {}
        for d, k in g.out(x).items():
            if d in vs_set:
                if d == first:
                    cell[into] = k
            else:
                cell[d] = k
        for d, k in cell.items():
            es[(into, d)] = add(es.get((into, d), 0), k)
        cells.append(cell)
    wt = {u: k for u, k in g.weight.items() if u not in vs_set}
    if g.w(first) != 1:
        wt[into] = g.w(first)
    h = Graph(tuple(vs), es, wt, g.rays)
    return h, Move("OutAmalgamate", {"vertices": vertices, "into": into},
                   {"vertex": into, "partition": cells, "new": vertices})


def _unit_cells(g: Graph, v) -> list:
    return [{d: 1} for d, k in g.out(v).items() for _ in range(k)]


def total_out_split(g: Graph):
    """Split every regular vertex off the cycles until it emits exactly one edge."""
    from .graph import on_cycle_vertices

    cyc = on_cycle_vertices(g)
    cond = nx.condensation(g.nx())
    order = {}
    for rank, c in enumerate(nx.topological_sort(cond)):
        for v in cond.nodes[c]["members"]:
            order[v] = rank
    h = g
    splits = []
    while True:
        cand = [v for v in h.vertices if v not in cyc and h.is_regular(v) and h.out_degree(v) > 1]
        if not cand:
            break
        v = max(cand, key=lambda x: order[x])
        h, mv = out_split(h, v, _unit_cells(h, v))
        for x in mv.params["new"]:
            order[x] = order[v]
        splits.append(mv)
    if not splits:
        return g, identity_trace(g)
    mv = Move("TotalOutSplit", {"splits": [s.params for s in splits]},
              {"merges": [s.back for s in reversed(splits)]})
    return h, _trace(g, h, [mv])


def breaking_free(g: Graph):
    """Out-split breaking vertices so that their finitely many edges leaving H get their own vertex."""
    h = g
    splits = []
    for _ in range(len(g.vertices) + 1):
        cs = composition_series(h)
        found = None
        for p, nxt in zip(cs.chain, cs.chain[1:]):
            for v in h.order(breaking_vertices_rel(h, p.h, set(h.vertices))):
                found = (v, p.h)
                break
            if found:
                break
        if not found:
            break
        v, hs = found
        inside = {d: k for d, k in h.out(v).items() if d in hs}
        outside = [{d: 1} for d, k in h.out(v).items() if d not in hs for _ in range(k)]
        h, mv = out_split(h, v, outside + [inside])
        splits.append(mv)
    if not splits:
        return g, identity_trace(g)
    mv = Move("BreakingFree", {"splits": [s.params for s in splits]},
              {"merges": [s.back for s in reversed(splits)]})
    return h, _trace(g, h, [mv])


# ---------------------------------------------------------------- direct-exit state

@dataclass(frozen=True)
class DEState:
    """Direct-exit data of a connected graph with two composition factors.

    exits[j] is row j of the connecting matrix: a list over w_0..w_{n-1} (n > 0) or a Seq over
    spine positions (n = 0).  tails[i] counts sources with one edge into w_i (n > 0); for n = 0,
    tails is the sequence of vertex counts of the tail graph by distance to the sink.
    """

    top: Graph
    cycle: tuple
    m: int
    n: int
    dnames: tuple
    exits: tuple
    tails: object

    def row(self, j):
        return self.exits[j]


def de_state(g: Graph) -> DEState:
    shape = component_shape(g)
    if shape.kind != "two":
        raise ContractError("direct-exit form needs a component with two composition factors")
    d, c = shape.clusters
    D = two_factor_data(g, d, c)
    m, n = D.m, D.n
    top = g.subgraph(root(g, c.vertices))
    rows = []
    for e in D.E:
        if n:
            row = [0] * n
            for p, k in enumerate(e):
                row[(1 - p) % n] = add(row[(1 - p) % n], k)
            rows.append(row)
        else:
            if e[0] != 0:
                raise ContractError("exit of length zero")
            H = e.horizon()
            rows.append(Seq(tuple(e[p] for p in range(1, H)),
                            tuple(e[p] for p in range(H, H + len(e.period)))).normal())
    if n:
        tails = tuple(sub(D.beta0[(1 - i) % n], 1) for i in range(n))
    else:
        tails = D.beta0
    return DEState(top, tuple(c.vertices), m, n, tuple(d.vertices), tuple(rows), tails)


def _spine_need(st: DEState) -> int:
    """Highest spine position hit by an exit (n = 0)."""
    k = 0
    for r in st.exits:
        b = r.support_bound()
        if b is None:
            raise OutOfScope("exits spread over an unbounded spine")
        k = max(k, b - 1)
    return k


def realize(st: DEState) -> Graph:
    top = st.top
    taken = set(top.vertices) | set(st.dnames)
    vs = list(top.vertices)
    es = dict(top.edges)
    wt = dict(top.weight)
    rays = list(top.rays)

    def source(into, count, label):
        if count == 0:
            return
        if is_omega(count):
            x = _fresh(top, label, taken)
            vs.append(x)
            wt[x] = OMEGA
            es[(x, into)] = 1
            return
        for _ in range(count):
            x = _fresh(top, label, taken)
            vs.append(x)
            es[(x, into)] = 1

    if st.n:
        ws = list(st.dnames)
        vs.extend(ws)
        for i in range(st.n):
            es[(ws[i], ws[(i + 1) % st.n])] = add(es.get((ws[i], ws[(i + 1) % st.n]), 0), 1)
        for i, k in enumerate(st.tails):
            source(ws[i], k, ws[i] + "t")
        for j, r in enumerate(st.exits):
            for i, k in enumerate(r):
                if k != 0:
                    es[(st.cycle[j], ws[i])] = k
        return Graph(tuple(vs), es, wt, tuple(rays))

    w0 = st.dnames[0]
    mu: Seq = st.tails
    vs.append(w0)
    need = _spine_need(st)
    if mu.is_finite_support():
        last = mu.support_bound() - 1
        last_fin = max([L for L in range(last + 1) if mu[L] != 0 and not is_omega(mu[L])], default=0)
        K = max(need, last - 1, last_fin)
    else:
        K = max(need, len(mu.prefix))
    spine = [w0]
    for L in range(1, K + 1):
        if mu[L] == 0:
            raise ContractError("tail graph is not contiguous")
        x = _fresh(top, w0 + "s", taken)
        vs.append(x)
        es[(x, spine[-1])] = 1
        spine.append(x)
        source(spine[L - 1], sub(mu[L], 1), w0 + "t")
    if mu.is_finite_support():
        source(spine[K], mu[K + 1], w0 + "t")
    else:
        rest = Seq(tuple(mu[K + 1 + k] for k in range(len(mu.prefix) + 1)), mu.period)
        if any(x == 0 for x in rest.period):
            raise OutOfScope("tail graph with an unbounded gapped spine")
        rays.append(Ray(spine[K], rest.map(lambda x: sub(x, 1))))
    for j, r in enumerate(st.exits):
        for i in range(need + 1):
            if r[i] != 0:
                es[(st.cycle[j], spine[i])] = r[i]
    return Graph(tuple(vs), es, wt, tuple(rays))


def _two_factor(g: Graph) -> bool:
    try:
        return component_shape(g).kind == "two"
    except OutOfScope:
        return False


def _per_component(g: Graph, f):
    """Apply f (DEState -> DEState, info) to every two-factor component; returns graph and infos."""
    parts, infos = [], []
    for comp in weak_components(g):
        sg = g.subgraph(comp)
        if _two_factor(sg):
            st, info = f(de_state(sg))
            parts.append(realize(st))
            infos.append(info)
        else:
            parts.append(sg)
    return union(parts), infos


def direct_exit(g: Graph):
    h, _ = _per_component(g, lambda st: (st, None))
    if h.fingerprint() == g.fingerprint():
        return g, identity_trace(g)
    return h, _trace(g, h, [Move("DirectExit", {}, {"graph": g.to_json()})])


# ---------------------------------------------------------------- connecting data

def connecting_matrix(g: Graph) -> list:
    """Rows v_j of the connecting matrix; columns w_i (n > 0) or spine positions (n = 0).

    Rows of an infinite emitter (m = 0) with exits spread along an unbounded spine are Seqs.
    """
    st = de_state(g)
    if st.n:
        return [list(r) for r in st.exits]
    rows = []
    bounds = [r.support_bound() for r in st.exits]
    if any(b is None for b in bounds):
        return list(st.exits)
    k = max(bounds)
    return [[r[i] for i in range(k)] for r in st.exits]


def polynomial_from_matrix(mat, m: int, n: int) -> dict:
    if m == 0:
        raise ContractError("no connecting polynomial without a cycle")
    poly: dict = {}
    for j, row in enumerate(mat):
        for i, a in enumerate(row):
            if a == 0:
                continue
            if is_omega(a):
                raise ContractError("infinite connecting entry")
            e = j + 1 + ((n - i) % n if n else i)
            poly[e] = poly.get(e, 0) + a
    return dict(sorted(poly.items()))


def connecting_polynomial(g: Graph) -> dict:
    """Exponent -> coefficient of a_E(t)."""
    st = de_state(g)
    return polynomial_from_matrix(connecting_matrix(g), st.m, st.n)


def poly_str(poly: dict) -> str:
    terms = []
    for e, c in sorted(poly.items()):
        mon = "1" if e == 0 else ("t" if e == 1 else f"t^{e}")
        terms.append(mon if c == 1 else (str(c) if e == 0 else f"{c}{mon}"))
    return " + ".join(terms) if terms else "0"


def exit_move_feasible(m: int, n: int, j: int, i: int, l: int, k: int) -> bool:
    """Can the exit v_j -> w_i be moved to v_k -> w_l?"""
    return (i - j - (l - k)) % math.gcd(m, n) == 0


# ---------------------------------------------------------------- exit moves and reductions

def _paths_into(st: DEState, j: int) -> Seq:
    top = st.top
    region = set(top.vertices) - set(st.cycle)
    return arrivals(top, st.cycle[j], region, sources(top))


def _set_row(st: DEState, j: int, row) -> DEState:
    ex = list(st.exits)
    ex[j] = row
    return replace(st, exits=tuple(ex))


def _bump(st: DEState, j: int, i: int, k) -> DEState:
    """Add k (possibly negative, never omega-minus) units to exit (j, i)."""
    r = st.exits[j]
    if st.n:
        r = list(r)
        r[i] = add(r[i], k) if not isinstance(k, int) or k >= 0 else sub(r[i], -k)
        return _set_row(st, j, r)
    vals = [r[x] for x in range(max(r.horizon(), i + 1))]
    vals[i] = add(vals[i], k) if not isinstance(k, int) or k >= 0 else sub(vals[i], -k)
    return _set_row(st, j, Seq(tuple(vals), r.period).normal())


def move_exit(st: DEState, j: int, i: int, count=1) -> DEState:
    """Move count units of the exit v_j -> w_i one step back along the cycle."""
    if st.m == 0:
        raise ContractError("exit moves need a cycle")
    have = st.exits[j][i]
    if have == 0 or (not is_omega(have) and not is_omega(count) and have < count) or (
            is_omega(count) and not is_omega(have)):
        raise ContractError(f"no exit v{j} -> w{i} to move")
    P = _paths_into(st, j).scale(count)
    jp = (j - 1) % st.m
    if is_omega(count):
        st = _set_row(st, j, _zero_at(st, j, i))
    else:
        st = _bump(st, j, i, -count)
    if st.n:
        ip = (i - 1) % st.n
        st = _bump(st, jp, ip, count)
        Pf = P.fold(st.n)
        tails = tuple(add(st.tails[x], Pf[(i - x) % st.n]) for x in range(st.n))
    else:
        st = _bump(st, jp, i + 1, count)
        tails = st.tails + P.shift(i + 1)
    return replace(st, tails=tails)


def _zero_at(st, j, i):
    r = st.exits[j]
    if st.n:
        r = list(r)
        r[i] = 0
        return r
    vals = [r[x] for x in range(max(r.horizon(), i + 1))]
    vals[i] = 0
    return Seq(tuple(vals), r.period).normal()


def _csub(a, b):
    """Tail subtraction where an omega contribution is absorbed by an omega count."""
    if b == 0:
        return a
    if is_omega(b):
        if not is_omega(a):
            raise ContractError("omega contribution against a finite count")
        return OMEGA
    return sub(a, b)


def single_reduction(st: DEState, j: int, i: int) -> Optional[DEState]:
    """Undo one exit move that produced the exit at (j-1, i-1) (n > 0) or (j-1, i+1) (n = 0).

    Returns None when the reduction does not apply or would not shrink any finite count.
    """
    if st.m == 0:
        raise ContractError("reductions need a cycle")
    jp = (j - 1) % st.m
    src_i = (i - 1) % st.n if st.n else i + 1
    if st.exits[jp][src_i] == 0:
        return None
    P = _paths_into(st, j)
    try:
        if st.n:
            Pf = P.fold(st.n)
            new = tuple(_csub(st.tails[x], Pf[(i - x) % st.n]) for x in range(st.n))
            shrink = any(not is_omega(a) and a != b for a, b in zip(st.tails, new))
        else:
            new = st.tails.zip_with(P.shift(i + 1), _csub)
            H = max(st.tails.horizon(), new.horizon())
            shrink = any(not is_omega(st.tails[x]) and st.tails[x] != new[x] for x in range(H))
    except Exception:
        return None
    if not shrink:
        return None
    moved = _bump(st, jp, src_i, -1) if not is_omega(st.exits[jp][src_i]) else st
    moved = _bump(moved, j, i, 1)
    out = replace(moved, tails=new)
    if not st.n and not _spine_ok(out):
        return None
    return out


def _spine_ok(st: DEState) -> bool:
    mu = st.tails
    if mu[0] == 0:
        return False
    need = _spine_need(st)
    if mu.is_finite_support():
        top = max(need, mu.support_bound() - 1)
    else:
        top = max(need, mu.horizon())
    return all(mu[L] != 0 for L in range(top + 1))


def _exit_positions(st: DEState) -> list:
    if st.n:
        return [(j, i) for j in range(st.m) for i in range(st.n)]
    k = _spine_need(st) + 1
    return [(j, i) for j in range(st.m) for i in range(k + 1)]


def full_reduce(st: DEState, mode_kind="Reduction"):
    steps = []
    changed = True
    while changed:
        changed = False
        for j, i in _exit_positions(st):
            r = single_reduction(st, j, i)
            if r is not None:
                steps.append((j, i))
                st = r
                changed = True
                break
    return st, steps


REDUCE_MODES = ("Single", "L", "Spine", "Omega", "Full")


def reduce(g: Graph, mode="Full", j: int = 0, i: int = 0):
    """Apply reductions to every two-factor component; mode one of REDUCE_MODES."""
    if mode not in REDUCE_MODES:
        raise ContractError(f"unknown reduction mode {mode}")
    kind = {"Single": "Reduction", "Full": "Reduction", "L": "LReduction", "Spine": "SpineReduction",
            "Omega": "OmegaReduction"}[mode]

    def f(st: DEState):
        if st.m == 0:
            raise ContractError("reductions need a cycle")
        if mode == "L" and not st.n:
            raise ContractError("L-reduction needs a cycle as bottom cluster")
        if mode == "Spine" and st.n:
            raise ContractError("spine reduction needs a sink as bottom cluster")
        if mode == "Omega":
            tl = st.tails if st.n else [st.tails[x] for x in range(st.tails.horizon())]
            if not any(is_omega(x) for x in tl):
                raise ContractError("omega reduction needs omega tails")
        if mode == "Single":
            r = single_reduction(st, j, i)
            return (st, []) if r is None else (r, [(j, i)])
        return full_reduce(st)

    h, infos = _per_component(g, f)
    steps = [p for info in infos for p in info]
    if not steps:
        return g, identity_trace(g)
    return h, _trace(g, h, [Move(kind, {"steps": steps}, {"graph": g.to_json()})])


def _locate_exit(g: Graph, st: DEState, exit) -> tuple:
    src, dst = exit[0], exit[1]
    if src not in st.cycle:
        raise ContractError(f"{src} is not on the exit-emitting cycle")
    j = st.cycle.index(src)
    if st.n:
        if dst not in st.dnames:
            raise ContractError("exit is not direct")
        return j, st.dnames.index(dst)
    # position on the spine: the unique path length from dst to the sink
    L, cur = 0, dst
    while cur != st.dnames[0]:
        outs = g.out(cur)
        if len(outs) != 1 or list(outs.values())[0] != 1:
            raise ContractError("exit does not land on the spine")
        cur = next(iter(outs))
        L += 1
    return j, L


def exit_move(g: Graph, exit):
    """Move one unit of the exit (src, dst) of a direct-exit graph."""
    comp = next(c for c in weak_components(g) if exit[0] in c)
    sg = g.subgraph(comp)
    st = de_state(sg)
    j, i = _locate_exit(sg, st, exit)
    new = realize(move_exit(st, j, i))
    rest = [g.subgraph(c) for c in weak_components(g) if exit[0] not in c]
    h = union([new] + rest)
    return h, Move("ExitMove", {"exit": list(exit[:2]), "j": j, "i": i}, {"graph": g.to_json()})


# ---------------------------------------------------------------- tail cutting

def saturated_mask(st: DEState, Q: Seq, A) -> object:
    """x-exponents whose coefficient in the generating interval is forced to omega."""
    m, n = st.m, st.n
    if n:
        Af = [k for k, a in enumerate(A) if a != 0]
        G = math.gcd(m, n) if m else n
        L_om = [L for L in range(Q.horizon() + max(m, 1) * len(Q.period)) if is_omega(Q[L])]
        res = {(L + a) % G for L in L_om for a in Af}
        return [p % G in res for p in range(n)]
    Af = [k for k in range(A.horizon()) if A[k] != 0]
    if not A.is_finite_support():
        Af = list(range(A.horizon() + len(A.period)))
    per = math.lcm(max(m, 1), len(Q.period))
    N = Q.horizon() + max(Af, default=0) + 2 * per + 2
    vals = []
    for p in range(N + per):
        hit = False
        for a in Af:
            for L in range(p - a + 1):
                if is_omega(Q[L]) and (L == p - a or (m and (p - a - L) % m == 0)):
                    hit = True
                    break
            if hit:
                break
        vals.append(hit)
    return Seq(tuple(vals[:N]), tuple(vals[N:])).normal()


def cut_state(st: DEState) -> DEState:
    D = two_factor_data(realize(st), *component_shape(realize(st)).clusters)
    mask = saturated_mask(st, D.Q, D.A)
    if st.n:
        tails = tuple(0 if mask[(1 - i) % st.n] else k for i, k in enumerate(st.tails))
        return replace(st, tails=tails)
    mu: Seq = st.tails
    cutv = mu.zip_with(mask.map(lambda b: 1 if b else 0), lambda x, b: 0 if b and x != 0 else x)
    cutv = Seq(tuple(cutv[x] for x in range(cutv.horizon())), cutv.period).normal()
    need = _spine_need(st)
    if cutv.is_finite_support():
        keep = max(need, cutv.support_bound() - 1)
        vals = [mu[L] if cutv[L] != 0 else (1 if L <= keep else 0) for L in range(keep + 1)]
        vals[0] = mu[0]
        return replace(st, tails=Seq.finite(vals))
    H = max(mu.horizon(), cutv.horizon()) + len(cutv.period) * len(mu.period)
    per = math.lcm(len(mu.period), len(cutv.period))
    vals = [mu[L] if cutv[L] != 0 else 1 for L in range(H + per)]
    return replace(st, tails=Seq(tuple(vals[:H]), tuple(vals[H:])).normal())


def cut(g: Graph):
    h, _ = _per_component(g, lambda st: (cut_state(st), None))
    if h.fingerprint() == g.fingerprint():
        return g, identity_trace(g)
    return h, _trace(g, h, [Move("TailCut", {}, {"graph": g.to_json()})])


# ---------------------------------------------------------------- feasible set and canonical quotient

def _rank(mu: Seq) -> tuple:
    b = mu.support_bound()
    spine = (1, 0) if b is None else (0, b - 1)
    H = mu.horizon() + 1
    return (spine, tuple((1, 0) if is_omega(mu[L]) else (0, mu[L]) for L in range(1, H)))


def _gap_key(ranks: list, trivial, fea: list, j: int) -> tuple:
    """Distance to the next candidate along the cycle, then the ranks of the nontrivial trees in between."""
    m = len(ranks)
    gap = next(d for d in range(1, m + 1) if (j + d) % m in fea)
    return gap, tuple(ranks[(j + d) % m] for d in range(1, gap) if ranks[(j + d) % m] != trivial)


def feasible_set(g: Graph) -> set:
    """Cycle vertices whose own quotient tree ranks highest (spine, then path counts by length),
    ties broken by the spacing to the next candidate and the trees met on the way."""
    st = de_state(g)
    if st.m == 0:
        return {st.cycle[0]}
    ranks = [_rank(_paths_into(st, j)) for j in range(st.m)]
    trivial = _rank(Seq((1,)))
    best = max(ranks)
    fea = [j for j in range(st.m) if ranks[j] == best]
    while len(fea) > 1:
        keys = {j: _gap_key(ranks, trivial, fea, j) for j in fea}
        top = max(keys.values())
        nxt = [j for j in fea if keys[j] == top]
        if nxt == fea:
            break
        fea = nxt
    return {st.cycle[j] for j in fea}


def canonical_quotient(g: Graph, base):
    """Move every exit of the top cycle to base (one full bundle at a time)."""
    if base not in feasible_set(g):
        raise ContractError(f"{base} is not feasible")
    st = de_state(g)
    if st.m == 0:
        return g, identity_trace(g)
    b = st.cycle.index(base)
    steps = []
    for dist in range(st.m - 1, 0, -1):
        cur = (b + dist) % st.m
        row = st.exits[cur]
        positions = range(st.n) if st.n else range(_spine_need(st) + 1)
        for i in positions:
            k = row[i]
            if k != 0:
                st = move_exit(st, cur, i, k)
                steps.append({"j": cur, "i": i, "count": to_json(k)})
    h = realize(st)
    if not steps:
        return g, identity_trace(g)
    return h, _trace(g, h, [Move("ExitMove", {"bulk": steps}, {"graph": g.to_json()})])


# ---------------------------------------------------------------- generator maps

def _allocate(cells: list, Z: dict) -> tuple:
    """Split the edge units Z of an infinite emitter over the cells: finite cells first."""
    fin_left = []
    rest = dict(Z)
    inf = None
    for idx, c in enumerate(cells):
        if any(is_omega(k) for k in c.values()):
            inf = idx
            continue
        left = {}
        for d, k in c.items():
            take = min(k, rest.get(d, 0))
            rest[d] = rest.get(d, 0) - take
            if k - take:
                left[d] = k - take
        fin_left.append(left)
    return inf, {d: k for d, k in rest.items() if k}, fin_left


def generator_map(g: Graph, mv: Move):
    """The monoid map M_g -> M_h induced by an out-split or out-amalgamation of g.

    Returns a function on talented-monoid expressions (Counters of (shift, generator)).
    """
    from collections import Counter

    from .monoid import V, Qgen

    def lift(img):
        def f(x):
            out = Counter()
            for (k, gen), c in x.items():
                for (k2, g2), c2 in img(gen).items():
                    out[(k + k2, g2)] += c * c2
            return +out
        return f

    if mv.kind == "OutSplit":
        v, cells, new = mv.params["vertex"], mv.params["partition"], mv.params["new"]

        def via(d):
            return Counter({(1, V(x)): 1 for x in new}) if d == v else Counter({(1, V(d)): 1})

        def img(gen):
            if gen[0] == "v":
                if gen[1] == v:
                    return Counter({(0, V(x)): 1 for x in new})
                return Counter({(0, gen): 1})
            u, Z = gen[1], dict(gen[2])
            if u != v:
                if v in Z:
                    c = Z.pop(v)
                    Z.update({x: c for x in new})
                return Counter({(0, Qgen(u, Z)): 1})
            inf, zin, left = _allocate(cells, Z)
            if inf is None:
                raise ContractError("q-generator at a vertex split into finite cells")
            zin = {x: c for d, c in zin.items() for x in (new if d == v else [d])}
            out = Counter({(0, Qgen(new[inf], zin) if zin else V(new[inf])): 1})
            for cell in left:
                for d, k in cell.items():
                    for key, c in via(d).items():
                        out[key] += k * c
            return out
        return lift(img)

    if mv.kind == "OutAmalgamate":
        verts, into = list(mv.params["vertices"]), mv.params["into"]
        cells = mv.back["partition"]
        merged = set(verts)
        inf = next((i for i, c in enumerate(cells) if any(is_omega(k) for k in c.values())), None)
        covered: dict = {}
        for i, c in enumerate(cells):
            if i != inf:
                for d, k in c.items():
                    covered[d] = covered.get(d, 0) + k

        def merge_units(Z: dict):
            """Units into the merged copies become max-many units into `into` plus the surplus."""
            counts = [Z.pop(x, 0) for x in verts]
            top = max(counts)
            if top:
                Z[into] = Z.get(into, 0) + top
            extra = Counter()
            for x, c in zip(verts, counts):
                if top - c:
                    for key, c2 in img(V(x)).items():
                        extra[(key[0] + 1, key[1])] += (top - c) * c2
            return Z, extra

        def img(gen):
            if gen[0] == "v":
                x = gen[1]
                if x not in merged:
                    return Counter({(0, gen): 1})
                i = verts.index(x)
                if i == inf:
                    return Counter({(0, Qgen(into, covered) if covered else V(into)): 1})
                return Counter({(1, V(d)): k for d, k in cells[i].items()})
            u, Z = gen[1], dict(gen[2])
            if u in merged and verts.index(u) != inf:
                raise ContractError("q-generator at a finite cell")
            Z, extra = merge_units(Z)
            if u in merged:
                for d, k in covered.items():
                    Z[d] = Z.get(d, 0) + k
                u = into
            extra[(0, Qgen(u, Z))] += 1
            return extra
        return lift(img)

    raise ContractError(f"no generator map recorded for {mv.kind}")


# ---------------------------------------------------------------- replay

def apply_move(g: Graph, mv: Move) -> Graph:
    p = mv.params
    k = mv.kind
    if k == "OutSplit":
        return out_split(g, p["vertex"], p["partition"], p["new"])[0]
    if k in ("TotalOutSplit", "BreakingFree"):
        for s in p["splits"]:
            g = out_split(g, s["vertex"], s["partition"], s["new"])[0]
        return g
    if k == "OutAmalgamate":
        for s in p.get("merges", [p]):
            g = out_amalgamate(g, s["vertices"], s["into"])[0]
        return g
    if "graph" in p:
        return graph_from_obj(p["graph"])
    if k == "DirectExit":
        return direct_exit(g)[0]
    if k == "TailCut":
        return cut(g)[0]
    if k == "ExitMove":
        if "bulk" in p:
            raise ContractError("bulk exit moves replay through canonical_quotient")
        return exit_move(g, p["exit"])[0]
    if k in ("Reduction", "LReduction", "SpineReduction", "OmegaReduction"):
        mode = {"LReduction": "L", "SpineReduction": "Spine", "OmegaReduction": "Omega"}.get(k, "Full")
        return reduce(g, mode)[0]
    if k == "Relabel":
        return g.relabel(p["map"])
    raise ContractError(f"cannot replay {k}")


def replay(g: Graph, trace: Trace) -> Graph:
    for mv in trace.steps:
        g = apply_move(g, mv)
    return g
