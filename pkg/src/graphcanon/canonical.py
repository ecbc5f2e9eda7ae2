"""Canonical descriptors, descriptor isomorphism and the graded isomorphism decision."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

from .extnat import OMEGA, Seq, is_omega, to_json, total
from .graph import ContractError, Graph, OutOfScope, make, weak_components
from .invariant import arrivals, component_shape, leaf_key, rot, sources, two_factor_normal, zadd
from .moves import Move, Trace, apply_move, breaking_free, cut, direct_exit, reduce, total_out_split
from .structure import is_composition_SNE


# ---------------------------------------------------------------- 1-S-NE

@dataclass(frozen=True)
class MatrixInvariant:
    """m = cycle length (0 for a sink); mu[k] = vertices at path length k (mod m when m > 0)."""

    m: int
    kappa: object
    mu: object  # tuple for m > 0, Seq for m = 0

    def residues(self) -> list:
        """Sorted list of path-length residues, one entry per vertex (finite kappa only)."""
        if is_omega(self.kappa):
            raise ContractError("infinitely many vertices")
        if self.m:
            return [r for r in range(self.m) for _ in range(self.mu[r])]
        return [k for k in range(self.mu.horizon()) for _ in range(self.mu[k])]

    def to_json(self) -> dict:
        mu = [to_json(x) for x in self.mu] if self.m else self.mu.to_json()
        return {"m": self.m, "kappa": to_json(self.kappa), "mu": mu}


def _single_cluster(g: Graph):
    if len(weak_components(g)) != 1:
        raise OutOfScope("graph is not connected")
    shape = component_shape(g)
    if shape.kind != "leaves" or len(shape.clusters) != 1:
        raise OutOfScope("graph is not cofinal with a sink or a cycle without exits")
    return shape.clusters[0]


def canonical_1SNE(g: Graph):
    cl = _single_cluster(g)
    src = sources(g)
    region = set(g.vertices) - set(cl.vertices)
    if cl.kind == "sink":
        mu = arrivals(g, cl.vertices[0], region, src)
        inv = MatrixInvariant(0, mu.sum(), mu)
    else:
        n = cl.length
        mu = [0] * n
        for i, w in enumerate(cl.vertices):
            mu = [zadd(a, b) for a, b in zip(mu, rot(arrivals(g, w, region, src).fold(n), -i))]
        inv = MatrixInvariant(n, total(mu), tuple(mu))
    h = realize_1SNE(inv)
    mv = Move("RelativeCanonical", {"invariant": inv.to_json()}, {"graph": g.to_json()})
    return inv, Trace([mv], g.fingerprint(), h.fingerprint())


def realize_1SNE(inv: MatrixInvariant) -> Graph:
    """The canonical graph: a spine (sink) or a cycle carrying the tails."""
    vs, es, wt = [], [], {}

    def tails(into, count, label):
        if count == 0:
            return
        if is_omega(count):
            vs.append(label)
            wt[label] = OMEGA
            es.append((label, into))
            return
        for r in range(count):
            vs.append(f"{label}.{r}")
            es.append((f"{label}.{r}", into))

    if inv.m:
        m = inv.m
        vs.extend(f"c{i}" for i in range(m))
        es.extend((f"c{i}", f"c{(i + 1) % m}") for i in range(m))
        for r in range(m):
            extra = inv.mu[r] if is_omega(inv.mu[r]) else inv.mu[r] - 1
            tails(f"c{(1 - r) % m}", extra, f"t{r}")
        return make(vs, es, wt)
    mu: Seq = inv.mu
    if not mu.is_finite_support():
        raise ContractError("infinite spine has no finite realization")
    top = mu.support_bound() - 1
    K = max([k for k in range(top + 1) if not is_omega(mu[k])], default=0)
    vs.append("s0")
    for k in range(1, K + 1):
        vs.append(f"s{k}")
        es.append((f"s{k}", f"s{k - 1}"))
        tails(f"s{k - 1}", OMEGA if is_omega(mu[k]) else mu[k] - 1, f"t{k}")
    for k in range(K + 1, top + 1):
        tails(f"s{k - 1}", mu[k], f"t{k}")
    return make(vs, es, wt)


def matrix_invariant_iso(a: MatrixInvariant, b: MatrixInvariant):
    """(True, i) with mu_a[k] = mu_b[k + i], or (False, None)."""
    if a.m != b.m or a.kappa != b.kappa:
        return False, None
    if a.m == 0:
        return (True, 0) if a.mu.key() == b.mu.key() else (False, None)
    for i in range(a.m):
        if all(a.mu[k] == b.mu[(k + i) % a.m] for k in range(a.m)):
            return True, i
    return False, None


# ---------------------------------------------------------------- descriptors

def _dec(v):
    """Undo the (0, x) / (1, 0) sort encoding of extended naturals, recursively."""
    if isinstance(v, tuple) and len(v) == 2 and all(isinstance(z, int) for z in v) and v[0] in (0, 1):
        return "omega" if v[0] == 1 else v[1]
    if isinstance(v, tuple):
        return [_dec(z) for z in v]
    return v


def _seq_json(k) -> dict:
    pre, per = k
    return {"prefix": _dec(pre), "period": _dec(per)}


@dataclass(frozen=True)
class Part:
    kind: str  # "leaf" or "node"
    key: tuple

    def fields(self) -> dict:
        k = self.key
        if k[0] == "sink":
            return {"m": 0, "mu": _seq_json(k[1])}
        if k[0] == "cycle":
            return {"m": k[1], "mu": _dec(k[2])}
        _, m, n = k[:3]
        if m and n:
            return {"m1": n, "m2": m, "connect": _dec(k[3]), "fea_period": _dec(k[4]), "tails": _dec(k[5])}
        if m:
            return {"m1": 0, "m2": m, "spine": _seq_json(k[3]), "fea_period": _dec(k[4]), "connect": _dec(k[5])}
        if n:
            return {"m1": n, "m2": 0, "quotient": _seq_json(k[3]), "connect": list(k[4]), "tails": _dec(k[5])}
        return {"m1": 0, "m2": 0, "quotient": _seq_json(k[3]), "connect": list(k[4]), "spine": _seq_json(k[5])}

    def to_json(self) -> dict:
        return {"type": self.kind, **self.fields()}


@dataclass(frozen=True)
class Descriptor:
    parts: tuple  # sorted Parts, one per independent piece of each component

    def to_json(self) -> dict:
        return {"parts": [p.to_json() for p in self.parts]}

    def fingerprint(self) -> str:
        enc = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(enc.encode()).hexdigest()[:16]


def _component_parts(g: Graph) -> list:
    shape = component_shape(g)
    if shape.kind == "leaves":
        allv = {v for c in shape.clusters for v in c.vertices}
        return [Part("leaf", leaf_key(g, c, allv)) for c in shape.clusters]
    d, c = shape.clusters
    key, _ = two_factor_normal(g, d, c)
    return [Part("node", key)]


def descriptor(g: Graph) -> Descriptor:
    parts = []
    for comp in weak_components(g):
        parts.extend(_component_parts(g.subgraph(comp)))
    return Descriptor(tuple(sorted(parts, key=lambda p: p.key)))


def _rotations(g: Graph) -> list:
    out = []
    for comp in weak_components(g):
        sg = g.subgraph(comp)
        shape = component_shape(sg)
        if shape.kind == "two":
            d, c = shape.clusters
            _, (R, s) = two_factor_normal(sg, d, c)
            out.append({"top": list(c.vertices), "bottom": list(d.vertices), "R": R, "s": s})
    return out


PIPELINE = (("TotalOutSplit", total_out_split), ("BreakingFree", breaking_free),
            ("DirectExit", direct_exit), ("Reduction", lambda g: reduce(g, "Full")), ("TailCut", cut))


_CACHE: dict = {}
_CACHE_SIZE = 1024


def canonical_form(g: Graph):
    """Descriptor of g and the trace of graph moves leading to its canonical representative."""
    # traces name vertices of g and fresh names depend on vertex order, so the order is part of the key
    enc = (g.vertices, g.sorted_encoding())
    hit = _CACHE.get(enc)
    if hit is None:
        try:
            hit = _canonical_form(g)
        except OutOfScope as e:
            hit = e
        if len(_CACHE) >= _CACHE_SIZE:
            _CACHE.pop(next(iter(_CACHE)))
        _CACHE[enc] = hit
    if isinstance(hit, OutOfScope):
        raise hit
    desc, tr = hit
    return desc, Trace(list(tr.steps), tr.source, tr.target)


def _canonical_form(g: Graph):
    diag = is_composition_SNE(g)
    if not diag.ok:
        raise OutOfScope(diag.reason)
    desc = descriptor(g)
    steps = []
    h = g
    for name, op in PIPELINE:
        try:
            h2, tr = op(h)
        except (ContractError, OutOfScope):
            continue
        if not tr.steps:
            continue
        try:
            same = descriptor(h2) == desc
        except OutOfScope:
            same = False
        if same:
            steps.extend(tr.steps)
            h = h2
    steps.append(Move("RelativeCanonical", {"rotations": _rotations(h)}, {}))
    return desc, Trace(steps, g.fingerprint(), desc.fingerprint())


def descriptor_iso(d1: Descriptor, d2: Descriptor) -> Optional[dict]:
    """Part bijection when the descriptors agree (parts are stored in normal form), else None."""
    if len(d1.parts) != len(d2.parts):
        return None
    used = set()
    iota = {}
    for i, p in enumerate(d1.parts):
        j = next((j for j, q in enumerate(d2.parts) if j not in used and q.key == p.key), None)
        if j is None:
            return None
        used.add(j)
        iota[i] = j
    return iota


# ---------------------------------------------------------------- decision

@dataclass
class Decision:
    verdict: str  # "iso", "not-iso", "out-of-scope"
    witness: Optional[dict]
    reason: str

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness, "reason": self.reason}


def _difference(d1: Descriptor, d2: Descriptor) -> str:
    if len(d1.parts) != len(d2.parts):
        return f"number of independent parts differs ({len(d1.parts)} vs {len(d2.parts)})"
    for i, (a, b) in enumerate(zip(d1.parts, d2.parts)):
        if a.key == b.key:
            continue
        if a.kind != b.kind:
            return f"part {i}: {a.kind} vs {b.kind}"
        fa, fb = a.fields(), b.fields()
        for name in fa:
            if fa[name] != fb.get(name):
                return f"part {i}: {name} differs ({json.dumps(fa[name])} vs {json.dumps(fb.get(name))})"
    return "descriptors differ"


def decide(g1: Graph, g2: Graph) -> Decision:
    try:
        d1, t1 = canonical_form(g1)
        d2, t2 = canonical_form(g2)
    except OutOfScope as e:
        return Decision("out-of-scope", None, str(e))
    iota = descriptor_iso(d1, d2)
    if iota is None:
        return Decision("not-iso", None, _difference(d1, d2))
    witness = {"trace1": t1.to_json(), "iota": {str(k): v for k, v in iota.items()},
               "trace2_inverse": t2.inverse().to_json(), "descriptor": d1.to_json()}
    return Decision("iso", witness, "canonical descriptors agree")


def verify_witness(g1: Graph, g2: Graph, dec: Decision) -> bool:
    """Replay both traces and check that they meet in the same canonical descriptor."""
    if dec.verdict != "iso" or not dec.witness:
        return False
    w = dec.witness
    d1, t1 = canonical_form(g1)
    d2, t2 = canonical_form(g2)
    if t1.to_json() != w["trace1"] or t2.inverse().to_json() != w["trace2_inverse"]:
        return False
    if w["trace1"]["source"] != g1.fingerprint() or w["trace2_inverse"]["target"] != g2.fingerprint():
        return False
    h1, h2 = replay_graph(g1, t1), replay_graph(g2, t2)
    e1, e2 = descriptor(h1), descriptor(h2)
    if e1.fingerprint() != w["trace1"]["target"] or e2.fingerprint() != w["trace2_inverse"]["source"]:
        return False
    iota = descriptor_iso(e1, e2)
    return iota is not None and {str(k): v for k, v in iota.items()} == w["iota"]


def replay_graph(g: Graph, trace: Trace) -> Graph:
    """Apply the graph-level moves of a trace; descriptor-level moves leave the graph unchanged."""
    for mv in trace.steps:
        if mv.kind in ("RelativeCanonical", "Relabel"):
            continue
        g = apply_move(g, mv)
    return g
