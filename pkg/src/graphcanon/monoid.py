"""The talented monoid as a rewriting system.

Expressions are finite sums of shifted generators t^k [v] and t^k [q^v_Z].  Rewriting uses
(A1) at regular vertices, (A2) at infinite emitters and (A3) on q-generators.  Equality is
certified by a common reduct; inequality by a homomorphism into path-count coordinates.
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .extnat import OMEGA, add, is_omega, mul
from .graph import ContractError, Graph, InputError, cycle_classes, on_cycle_vertices, tree
from .structure import NoCompositionSeries, composition_series, is_composition_SNE

# generator: ("v", name) or ("q", name, Z) with Z a sorted tuple of (dst, count)
# expression: Counter {(shift, generator): coefficient}


def V(name) -> tuple:
    return ("v", name)


def Qgen(v, Z) -> tuple:
    return ("q", v, tuple(sorted((d, c) for d, c in dict(Z).items() if c)))


def expr(*terms) -> Counter:
    """expr((coeff, shift, gen), ...) or expr(gen) for a single generator."""
    out = Counter()
    for t in terms:
        if isinstance(t, tuple) and t and t[0] in ("v", "q"):
            out[(0, t)] += 1
        else:
            c, k, g = t
            out[(k, g)] += c
    return out


def vertex(name, shift=0, coeff=1) -> Counter:
    return Counter({(shift, V(name)): coeff})


def shift(x: Counter, k: int) -> Counter:
    return Counter({(s + k, g): c for (s, g), c in x.items()})


def plus(*xs) -> Counter:
    out = Counter()
    for x in xs:
        out.update(x)
    return +out


def freeze(x: Counter) -> tuple:
    return tuple(sorted(((s, g), c) for (s, g), c in x.items() if c))


# ---------------------------------------------------------------- parsing and printing

_TERM = re.compile(r"^(?:(\d+)\s*\*)?\s*(?:t\^\s*(-?\d+)\s*\*)?\s*(.+)$")


def parse_expr(text: str, g: Optional[Graph] = None) -> Counter:
    text = text.strip()
    if text in ("", "0"):
        return Counter()
    out = Counter()
    depth = 0
    parts, cur = [], ""
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "+" and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    for pos, part in enumerate(parts):
        mt = _TERM.match(part.strip())
        if not mt:
            raise InputError(f"term {pos}: cannot parse {part!r}")
        coeff = int(mt.group(1)) if mt.group(1) else 1
        k = int(mt.group(2)) if mt.group(2) else 0
        atom = mt.group(3).strip()
        if atom.startswith("q{"):
            if not atom.endswith("}") or ";" not in atom:
                raise InputError(f"term {pos}: malformed q-generator {atom!r}")
            v, body = atom[2:-1].split(";", 1)
            Z = {}
            for item in body.split(","):
                if ":" not in item:
                    raise InputError(f"term {pos}: malformed edge unit {item!r}")
                d, c = item.rsplit(":", 1)
                Z[d.strip()] = Z.get(d.strip(), 0) + int(c)
            gen = Qgen(v.strip(), Z)
        else:
            gen = V(atom)
        if g is not None:
            _check_gen(g, gen, pos)
        out[(k, gen)] += coeff
    return +out


def _check_gen(g: Graph, gen, pos=0):
    if gen[1] not in g.vertices:
        raise InputError(f"term {pos}: unknown vertex {gen[1]!r}")
    if gen[0] == "q":
        v = gen[1]
        if not g.is_infinite_emitter(v):
            raise InputError(f"term {pos}: q-generator at {v!r}, which is not an infinite emitter")
        for d, c in gen[2]:
            m = g.mult(v, d)
            if c <= 0 or (not is_omega(m) and c > m):
                raise InputError(f"term {pos}: edge unit {d}:{c} exceeds the edges out of {v}")


def format_gen(gen) -> str:
    if gen[0] == "v":
        return gen[1]
    return "q{" + gen[1] + ";" + ",".join(f"{d}:{c}" for d, c in gen[2]) + "}"


def format_expr(x: Counter) -> str:
    terms = []
    for (k, gen), c in sorted(x.items(), key=lambda kv: (format_gen(kv[0][1]), kv[0][0])):
        if not c:
            continue
        s = format_gen(gen)
        if k:
            s = f"t^{k}*" + s
        if c != 1:
            s = f"{c}*" + s
        terms.append(s)
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------- rewriting

def rule_image(g: Graph, k: int, gen, rule: str, unit=None) -> Counter:
    """Image of the single term t^k gen under a rule instance."""
    v = gen[1]
    if rule == "A1":
        if gen[0] != "v" or not g.is_regular(v):
            raise ContractError(f"(A1) needs a regular vertex, got {format_gen(gen)}")
        return Counter({(k + 1, V(d)): m for d, m in g.out(v).items()})
    if rule == "A2":
        if gen[0] != "v" or not g.is_infinite_emitter(v):
            raise ContractError(f"(A2) needs an infinite emitter, got {format_gen(gen)}")
        Z = dict(unit)
        for d, c in Z.items():
            m = g.mult(v, d)
            if c <= 0 or (not is_omega(m) and c > m):
                raise ContractError("(A2) edge set is not inside the edges out of v")
        out = Counter({(k, Qgen(v, Z)): 1})
        for d, c in Z.items():
            out[(k + 1, V(d))] += c
        return out
    if rule == "A3":
        if gen[0] != "q":
            raise ContractError("(A3) needs a q-generator")
        Z = dict(gen[2])
        add_units = dict(unit)
        W = dict(Z)
        for d, c in add_units.items():
            W[d] = W.get(d, 0) + c
            m = g.mult(v, d)
            if c <= 0 or (not is_omega(m) and W[d] > m):
                raise ContractError("(A3) enlarged edge set exceeds the edges out of v")
        out = Counter({(k, Qgen(v, W)): 1})
        for d, c in add_units.items():
            out[(k + 1, V(d))] += c
        return out
    raise ContractError(f"unknown rule {rule}")


def rewrite_step(g: Graph, x: Counter, site) -> Counter:
    """site = (shift, generator, rule[, unit]) with unit a {dst: count} dict for (A2)/(A3)."""
    k, gen, rule = site[0], site[1], site[2]
    unit = site[3] if len(site) > 3 else None
    if x.get((k, gen), 0) <= 0:
        raise ContractError("site does not select a term of the expression")
    if rule in ("A2", "A3") and not unit:
        raise ContractError(f"{rule} needs an edge set")
    img = rule_image(g, k, gen, rule, unit)
    out = Counter(x)
    out[(k, gen)] -= 1
    out.update(img)
    return +out


def sites(g: Graph, x: Counter):
    """All single-step rule instances (unit steps for (A2)/(A3))."""
    for (k, gen), c in sorted(x.items(), key=lambda kv: str(kv[0])):
        if c <= 0:
            continue
        v = gen[1]
        if gen[0] == "v":
            if g.is_regular(v):
                yield (k, gen, "A1")
            elif g.is_infinite_emitter(v):
                for d in g.out(v):
                    yield (k, gen, "A2", {d: 1})
        else:
            Z = dict(gen[2])
            for d, m in g.out(v).items():
                if is_omega(m) or Z.get(d, 0) < m:
                    yield (k, gen, "A3", {d: 1})


def relation_instances(g: Graph) -> list:
    """Defining relations as (lhs, rhs) pairs: (A1) at regular vertices, (A2) and (A3) with unit steps."""
    out = []
    for v in g.vertices:
        if g.is_regular(v):
            out.append((vertex(v), rule_image(g, 0, V(v), "A1")))
        elif g.is_infinite_emitter(v):
            for d in g.out(v):
                out.append((vertex(v), rule_image(g, 0, V(v), "A2", {d: 1})))
                q = Qgen(v, {d: 1})
                for d2, m in g.out(v).items():
                    if is_omega(m) or (d2 != d and m >= 1) or m >= 2:
                        out.append((expr(q), rule_image(g, 0, q, "A3", {d2: 1})))
    return out


def default_depth(g: Graph) -> int:
    longest = max((len(c.vertices) for c in cycle_classes(g)), default=0)
    return 4 * (len(g.vertices) + longest)


# ---------------------------------------------------------------- separating invariants

def _quotients(g: Graph) -> list:
    """The graph itself and its quotients by the hereditary saturated sets of a composition series."""
    out = [(frozenset(), g)]
    try:
        cs = composition_series(g)
    except NoCompositionSeries:
        return out
    seen = {frozenset()}
    for p in cs.chain:
        if p.h in seen or len(p.h) == len(g.vertices):
            continue
        seen.add(p.h)
        keep = [v for v in g.vertices if v not in p.h]
        out.append((p.h, g.subgraph(keep)))
    return out


def _lfp(g: Graph, base: dict, step, zero, combine, limit: int):
    """Least fixed point of val(v) = base(v) + sum_e mult * step(val(r(e))) with omega saturation."""
    val = {v: base.get(v, zero) for v in g.vertices}
    for it in range(limit):
        new = {}
        for v in g.vertices:
            acc = base.get(v, zero)
            for d, k in g.out(v).items():
                acc = combine(acc, step(val[d]), k)
            new[v] = acc
        if new == val:
            return val, True
        val = new
    return val, False


class _Skip(Exception):
    pass


class _Census:
    """Homomorphisms from the monoid into path-count coordinates of one terminal vertex set."""

    def __init__(self, q: Graph, cluster: tuple, horizon: int):
        self.q = q
        self.cluster = cluster
        self.m = len(cluster) if len(cluster) > 1 or q.mult(cluster[0], cluster[0]) else 0
        self.horizon = horizon
        self.val = self._compute()

    def _compute(self):
        q, cl = self.q, self.cluster
        cset = set(cl)
        if self.m:
            return self._residues()
        H = self.horizon
        zero = (0,) * H
        s = cl[0]
        base = {s: tuple(1 if i == 0 else 0 for i in range(H))}

        def step(x):
            return (0,) + x[:-1]

        def combine(acc, x, k):
            return tuple(add(a, mul(k, b)) for a, b in zip(acc, x))

        val, _ = _lfp(q, base, step, zero, combine, H + 1)
        return val

    def _residues(self):
        """[c_i] = t^-i [c_0]; vertices on other cycles get omega on every residue they feed."""
        import networkx as nx

        q, cl, m = self.q, self.cluster, self.m
        cset = set(cl)
        val = {}
        for i, c in enumerate(cl):
            b = [0] * m
            b[(-i) % m] = 1
            val[c] = tuple(b)
        G = nx.DiGraph()
        G.add_nodes_from(v for v in q.vertices if v not in cset)
        G.add_edges_from(e for e in q.edges if e[0] not in cset and e[1] not in cset)
        cond = nx.condensation(G)
        for comp in reversed(list(nx.topological_sort(cond))):
            members = list(cond.nodes[comp]["members"])
            base = {}
            for u in members:
                acc = [0] * m
                for d, k in q.out(u).items():
                    if d in members:
                        continue
                    x = val[d]
                    for r in range(m):
                        acc[(r + 1) % m] = add(acc[(r + 1) % m], mul(k, x[r]))
                base[u] = acc
            if len(members) == 1 and not q.mult(members[0], members[0]):
                val[members[0]] = tuple(base[members[0]])
                continue
            # a simple cycle u_0 -> u_1 -> ... of length p with exits
            order = [members[0]]
            while len(order) < len(members):
                nxt = [d for d in q.out(order[-1]) if d in members]
                if len(nxt) != 1:
                    raise _Skip()
                order.append(nxt[0])
            p = len(order)
            if any(q.mult(u, order[(i + 1) % p]) != 1 for i, u in enumerate(order)):
                raise _Skip()
            step = math.gcd(p, m)
            for i, v in enumerate(order):
                out = [0] * m
                for j, u in enumerate(order):
                    dist = (j - i) % p
                    for r0, c in enumerate(base[u]):
                        if c != 0:
                            for r in range(m):
                                if (r - r0 - dist) % step == 0:
                                    out[r] = OMEGA
                val[v] = tuple(out)
        return val

    def image(self, x: Counter):
        """Coordinates of x, or None where a q-generator makes them undetermined."""
        if self.m:
            acc = [0] * self.m
            for (k, gen), c in x.items():
                vec = self._gen(gen)
                if vec is None:
                    return None
                for r in range(self.m):
                    acc[(r + k) % self.m] = add(acc[(r + k) % self.m], mul(c, vec[r]))
            return ("res", tuple(acc))
        out = {}
        for (k, gen), c in x.items():
            vec = self._gen(gen)
            if vec is None:
                return None
            for i, a in enumerate(vec):
                if a:
                    out[i + k] = add(out.get(i + k, 0), mul(c, a))
        return ("deg", out)

    def _gen(self, gen):
        q = self.q
        v = gen[1]
        if v not in q.vertices:
            return (0,) * (self.m or self.horizon)
        if gen[0] == "v":
            return self.val[v]
        # [q_Z] = [v] - sum_{e in Z} t [r(e)]
        acc = list(self.val[v])
        for d, c in gen[2]:
            if d not in q.vertices:
                continue
            x = self.val[d]
            sh = tuple(x[(r - 1) % self.m] for r in range(self.m)) if self.m else (0,) + tuple(x[:-1])
            for i, b in enumerate(sh):
                b = mul(c, b)
                if b == 0:
                    continue
                if is_omega(b) or (not is_omega(acc[i]) and acc[i] < b):
                    return None
                if not is_omega(acc[i]):
                    acc[i] -= b
        return tuple(acc)


def _terminal_sets(q: Graph) -> list:
    out = [(v,) for v in q.vertices if q.is_sink(v)]
    cyc = on_cycle_vertices(q)
    for c in cycle_classes(q):
        vs = list(c.vertices)
        if all(set(q.out(v)) <= set(vs) for v in vs) and all(q.out_degree(v) == 1 for v in vs):
            # order along the cycle
            order = [vs[0]]
            while len(order) < len(vs):
                order.append(next(iter(q.out(order[-1]))))
            out.append(tuple(order))
    return out


def separating_invariant(g: Graph, x: Counter, y: Counter) -> Optional[dict]:
    span = [k for (k, _) in list(x) + list(y)]
    lo = min(span, default=0)
    hi = max(span, default=0)
    horizon = (hi - lo) + 2 * len(g.vertices) + 4
    for h, q in _quotients(g):
        px = Counter({(k, gen): c for (k, gen), c in x.items() if gen[1] not in h})
        py = Counter({(k, gen): c for (k, gen), c in y.items() if gen[1] not in h})
        if bool(+px) != bool(+py):
            return {"invariant": "quotient-projection", "erased": sorted(h),
                    "left": format_expr(px), "right": format_expr(py)}
        for cl in _terminal_sets(q):
            try:
                cen = _Census(q, cl, horizon)
            except _Skip:
                continue
            a, b = cen.image(px), cen.image(py)
            if a is None or b is None:
                continue
            if a[0] == "deg":
                keys = set(a[1]) | set(b[1])
                diff = [d for d in sorted(keys) if d < lo + horizon and a[1].get(d, 0) != b[1].get(d, 0)]
                if diff:
                    return {"invariant": "sink-degree census", "sink": cl[0], "erased": sorted(h),
                            "degree": diff[0], "left": str(a[1].get(diff[0], 0)), "right": str(b[1].get(diff[0], 0))}
            elif a != b:
                return {"invariant": "cycle-coefficient residue", "cycle": list(cl), "erased": sorted(h),
                        "left": [str(z) for z in a[1]], "right": [str(z) for z in b[1]]}
    return None


# ---------------------------------------------------------------- equality

@dataclass
class EqVerdict:
    value: Optional[bool]  # True, False, or None for unknown
    reduct: Optional[Counter] = None
    invariant: Optional[dict] = None
    steps: int = 0

    def __bool__(self):
        return self.value is True

    @property
    def label(self) -> str:
        return {True: "True", False: "False", None: "Unknown"}[self.value]

    def to_json(self) -> dict:
        out = {"verdict": self.label}
        if self.reduct is not None:
            out["reduct"] = format_expr(self.reduct)
        if self.invariant is not None:
            out["invariant"] = self.invariant
        return out


def _rank(g: Graph) -> dict:
    import networkx as nx

    cond = nx.condensation(g.nx())
    rank = {}
    for i, c in enumerate(nx.topological_sort(cond)):
        for v in cond.nodes[c]["members"]:
            rank[v] = i
    return rank


def _cycle_pos(g: Graph) -> dict:
    pos = {}
    for c in cycle_classes(g):
        for i, v in enumerate(c.vertices):
            pos[v] = i
    return pos


def _greedy(g: Graph, x: Counter, y: Counter, budget: int):
    """Rewrite the most upstream, least advanced unmatched term until both sides agree."""
    rank = _rank(g)
    pos = _cycle_pos(g)
    x, y = Counter(x), Counter(y)
    steps = 0
    while True:
        common = x & y
        rx, ry = x - common, y - common
        if not rx and not ry:
            return x, steps
        if steps >= budget:
            return None, steps
        cands = []
        for side, r, other in ((0, rx, ry), (1, ry, rx)):
            for (k, gen) in r:
                v = gen[1]
                if gen[0] == "v" and g.is_sink(v):
                    continue
                cands.append((rank[v], k - pos.get(v, 0), pos.get(v, 0), side, k, gen))
        if not cands:
            return None, steps
        cands.sort(key=lambda c: (c[0], c[1], c[2], c[3]))
        site = None
        for _, _, _, side, k, gen in cands:
            site = _choose_site(g, k, gen, ry if side == 0 else rx)
            if site is not None:
                break
        if site is None:
            return None, steps
        if side == 0:
            x = Counter(rewrite_step(g, x, site))
        else:
            y = Counter(rewrite_step(g, y, site))
        steps += 1


def _choose_site(g: Graph, k: int, gen, other: Counter):
    v = gen[1]
    if gen[0] == "v" and g.is_regular(v):
        return (k, gen, "A1")
    Z = dict(gen[2]) if gen[0] == "q" else {}
    # aim at a q-generator of the other side, else at a target term one step downstream
    for (k2, g2), c in other.items():
        if g2[0] == "q" and g2[1] == v and k2 == k:
            W = dict(g2[2])
            if all(W.get(d, 0) >= z for d, z in Z.items()) and W != Z:
                d = next(d for d in sorted(W) if W[d] > Z.get(d, 0))
                return (k, gen, "A2" if gen[0] == "v" else "A3", {d: 1})
    for (k2, g2), c in sorted(other.items(), key=str):
        if k2 == k + 1 and g2[0] == "v" and g2[1] in g.out(v):
            d = g2[1]
            m = g.mult(v, d)
            if is_omega(m) or Z.get(d, 0) < m:
                return (k, gen, "A2" if gen[0] == "v" else "A3", {d: 1})
    return None


def _bfs(g: Graph, x: Counter, y: Counter, depth: int, cap: int = 4000):
    fx, fy = freeze(x), freeze(y)
    if fx == fy:
        return x
    seen = [{fx: x}, {fy: y}]
    front = [[x], [y]]
    for _ in range(depth):
        for side in (0, 1):
            nxt = []
            for e in front[side]:
                for s in sites(g, e):
                    try:
                        z = rewrite_step(g, e, s)
                    except ContractError:
                        continue
                    fz = freeze(z)
                    if fz in seen[side]:
                        continue
                    seen[side][fz] = z
                    if fz in seen[1 - side]:
                        return z
                    nxt.append(z)
                    if len(seen[side]) > cap:
                        return None
            front[side] = nxt
    return None


def monoid_eq(g: Graph, x: Counter, y: Counter, depth: Optional[int] = None) -> EqVerdict:
    if depth is None:
        depth = default_depth(g)
    x, y = +Counter(x), +Counter(y)
    if freeze(x) == freeze(y):
        return EqVerdict(True, x)
    if depth > 0:
        red, n = _greedy(g, x, y, depth * (len(g.vertices) + 1))
        if red is not None:
            return EqVerdict(True, red, steps=n)
        red = _bfs(g, x, y, min(depth, 6))
        if red is not None:
            return EqVerdict(True, red)
    inv = separating_invariant(g, x, y)
    if inv is not None:
        return EqVerdict(False, invariant=inv)
    return EqVerdict(None)


# ---------------------------------------------------------------- classification and interval

@dataclass(frozen=True)
class GeneratorClass:
    kind: str  # "Periodic", "Aperiodic", "Incomparable"
    period: int = 0

    def __str__(self):
        return f"Periodic({self.period})" if self.kind == "Periodic" else self.kind


def classify_generator(g: Graph, v) -> GeneratorClass:
    if v not in g.vertices:
        raise ContractError(f"unknown vertex {v!r}")
    diag = is_composition_SNE(g)
    if not diag.ok:
        from .graph import OutOfScope

        raise OutOfScope(diag.reason)
    T = tree(g, [v])
    cycles = [c for c in cycle_classes(g) if set(c.vertices) <= T]
    if not cycles:
        return GeneratorClass("Incomparable")
    sinks = any(g.is_sink(u) for u in T)
    emitters = any(g.is_infinite_emitter(u) for u in T)
    exits = False
    for c in cycles:
        cs = set(c.vertices)
        for u in c.vertices:
            if any(d not in cs for d in g.out(u)) or g.out_degree(u) != 1:
                exits = True
    if not sinks and not emitters and not exits:
        return GeneratorClass("Periodic", math.lcm(*[len(c.vertices) for c in cycles]))
    return GeneratorClass("Aperiodic")


@dataclass
class IntervalVerdict(EqVerdict):
    F: tuple = ()
    rest: Optional[Counter] = None

    def to_json(self) -> dict:
        out = super().to_json()
        if self.value:
            out["F"] = list(self.F)
            out["r"] = format_expr(self.rest)
        return out


def _reach_lengths(g: Graph, target, L: int) -> list:
    """Vertices u with a path of length exactly L from u to target through regular vertices."""
    layer = {target}
    for _ in range(L):
        layer = {s for d in layer for s in g.inn(d) if g.is_regular(s) or g.is_infinite_emitter(s)}
    return sorted(layer, key=str)


def in_interval(g: Graph, x: Counter, depth: Optional[int] = None) -> IntervalVerdict:
    if depth is None:
        depth = default_depth(g)
    x = +Counter(x)
    # sound refutation: a term that no finite vertex sum dominates in the sink census
    span = [k for (k, _) in x]
    horizon = (max(span, default=0) - min(span, default=0)) + 2 * len(g.vertices) + 4
    for cl in _terminal_sets(g):
        if len(cl) > 1 or g.mult(cl[0], cl[0]):
            continue
        try:
            cen = _Census(g, cl, horizon)
        except _Skip:
            continue
        img = cen.image(x)
        if img is not None and any(d < 0 and c != 0 for d, c in img[1].items()):
            return IntervalVerdict(False, invariant={"invariant": "sink-degree census", "sink": cl[0],
                                                     "negative-degree": min(d for d in img[1] if img[1][d])})
    # constructive search: each copy of t^k gen below a distinct vertex via a path of length k
    pos = _cycle_pos(g)
    cyc_len = {v: len(c.vertices) for c in cycle_classes(g) for v in c.vertices}
    F = []
    for (k, gen), c in sorted(x.items(), key=str):
        for _ in range(c):
            target = gen[1]
            kk = k
            if kk < 0 and target in cyc_len:
                kk %= cyc_len[target]
            if kk < 0 or kk > depth:
                return IntervalVerdict(None)
            us = [u for u in _reach_lengths(g, target, kk) if u not in F]
            if not us:
                return IntervalVerdict(None)
            F.append(us[0])
    total = plus(*[vertex(u) for u in F])
    # remainder: expand the vertex sum along the chosen paths and subtract x
    r = _remainder(g, total, x, depth)
    if r is None:
        return IntervalVerdict(None)
    v = monoid_eq(g, plus(x, r), total, depth)
    if v.value:
        return IntervalVerdict(True, v.reduct, F=tuple(F), rest=r)
    return IntervalVerdict(None)


def _remainder(g: Graph, total: Counter, x: Counter, depth: int):
    """Find r with x + r reachable from total by rewriting, searching greedily toward x."""
    cur = Counter(total)
    need = Counter(x)
    for _ in range(depth * (len(g.vertices) + 1)):
        if not (need - cur):
            return +(cur - need)
        missing = need - cur
        # rewrite a term of cur that is upstream of some missing term and less advanced
        best = None
        for (k, gen), c in cur.items():
            v = gen[1]
            if gen[0] == "v" and g.is_sink(v):
                continue
            if (k, gen) in need and cur[(k, gen)] <= need[(k, gen)]:
                continue
            for (k2, g2) in missing:
                if k2 > k and g2[1] in tree(g, [v]):
                    cand = (k, str(gen), gen)
                    if best is None or cand < best:
                        best = cand
        if best is None:
            return None
        k, _, gen = best
        site = _choose_site(g, k, gen, missing) if gen[0] != "v" or not g.is_regular(gen[1]) else (k, gen, "A1")
        if site is None:
            return None
        cur = Counter(rewrite_step(g, cur, site))
    return None
