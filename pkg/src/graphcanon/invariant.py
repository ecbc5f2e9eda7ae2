"""Complete isomorphism keys for composition S-NE graphs with at most two composition factors.

The key of a connected component is a normal form of the pair (talented monoid, generating
interval), computed from path counts into the terminal clusters.  Conventions:

* bottom cluster d: sink x, or cycle w_0 -> w_1 -> ... with [w_i] = t^-i x and t^n x = x;
* top cluster c: cycle v_0 -> v_1 -> ... with y = [v_0] and y = t^m y + A x, or (m = 0) an
  infinite emitter v_0 whose omega-exits let y absorb or release x terms;
* u = sum of all vertex classes = Q(t) y + beta(t) x, coefficients in N plus omega.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from .extnat import OMEGA, Seq, add, geometric, is_omega, mul, sort_key
from .graph import Graph, OutOfScope, cycles_disjoint, weak_components
from .structure import Cluster, NoCompositionSeries, composition_series, terminal_clusters


# ---------------------------------------------------------------- arithmetic helpers

def zadd(a, b):
    """Integer addition (either sign) with omega absorbing."""
    if is_omega(a) or is_omega(b):
        return OMEGA
    return a + b


def zmul(a, b):
    if a == 0 or b == 0:
        return 0
    if is_omega(a) or is_omega(b):
        return OMEGA
    return a * b


def rot(vec, k: int) -> list:
    """Multiply a cyclic vector by t^k."""
    n = len(vec)
    out = [0] * n
    for i, x in enumerate(vec):
        out[(i + k) % n] = x
    return out


def cconv(a, b) -> list:
    """Cyclic convolution of two equal-length vectors."""
    n = len(a)
    out = [0] * n
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y != 0:
                out[(i + j) % n] = zadd(out[(i + j) % n], zmul(x, y))
    return out


def fold(vec, g: int) -> list:
    out = [0] * g
    for i, x in enumerate(vec):
        out[i % g] = zadd(out[i % g], x)
    return out


def seq_mul(a: Seq, b: Seq) -> Seq:
    """Cauchy product of eventually periodic sequences when the result is eventually periodic."""
    if a.is_finite_support():
        return b.conv_poly({i: x for i, x in enumerate(a.prefix) if x != 0})
    if b.is_finite_support():
        return a.conv_poly({i: x for i, x in enumerate(b.prefix) if x != 0})
    ha, hb = a.horizon(), b.horizon()
    per = math.lcm(len(a.period), len(b.period))
    start = 2 * (ha + hb)
    vals = []
    for k in range(start + 3 * per):
        s = 0
        for i in range(k + 1):
            s = add(s, mul(a[i], b[k - i]))
        vals.append(s)
    body = vals[start:]
    if any(body[i] != body[i % per] for i in range(len(body))) or any(not is_omega(x) and x != 0 for x in body):
        raise OutOfScope("path counts grow without bound")
    return Seq(tuple(vals[:start]), tuple(body[:per])).normal()


def lattice_reduce(v: list, gens: list) -> list:
    """Canonical representative of v modulo the integer lattice spanned by gens."""
    gens = [g for g in gens if any(x != 0 for x in g)]
    if not gens or not v:
        return list(v)
    H = hermite_normal_form(Matrix(gens).T)
    cols = []
    for j in range(H.shape[1]):
        col = [int(H[i, j]) for i in range(H.shape[0])]
        nz = [i for i, x in enumerate(col) if x != 0]
        if nz:
            cols.append((nz[-1], col))
    cols.sort(key=lambda c: -c[0])
    out = list(v)
    for p, col in cols:
        piv = col[p]
        if piv < 0:
            col = [-x for x in col]
            piv = -piv
        q = out[p] // piv
        if q:
            out = [x - q * c for x, c in zip(out, col)]
    return out


def _k(vec) -> tuple:
    return tuple(sort_key(x) for x in vec)


# ---------------------------------------------------------------- path counting

def sources(g: Graph) -> dict:
    """vertex -> Seq: number of sources at each distance whose paths end at the vertex through rays."""
    out = {v: Seq.finite([g.w(v)]) for v in g.vertices}
    for r in g.rays:
        out[r.to] = out[r.to] + Seq((0,), (1,)) + r.tails.shift(1)
    return out


def paths_to(g: Graph, target, region: set) -> dict:
    """{h: {L: count}} for paths h -> target whose vertices other than target lie in region."""
    memo: dict = {target: {0: 1}}
    active: set = set()

    def go(h):
        if h in memo:
            return memo[h]
        if h in active:
            raise OutOfScope("cycle outside the terminal clusters")
        active.add(h)
        acc: dict = {}
        for d, k in g.out(h).items():
            if d != target and d not in region:
                continue
            for L, c in go(d).items():
                acc[L + 1] = add(acc.get(L + 1, 0), mul(k, c))
        active.discard(h)
        memo[h] = acc
        return acc

    for h in region:
        go(h)
    return {h: p for h, p in memo.items() if p}


def arrivals(g: Graph, target, region: set, src: dict) -> Seq:
    """Weighted count of paths into target by length, sources in region or target itself."""
    acc = Seq()
    for h, p in paths_to(g, target, region).items():
        acc = acc + src[h].conv_poly(p)
    return acc


# ---------------------------------------------------------------- keys

def leaf_key(g: Graph, cl: Cluster, others=()) -> tuple:
    """Key of a component part attached to a single terminal cluster (sink or exitless cycle)."""
    src = sources(g)
    region = set(g.vertices) - set(cl.vertices) - set(others)
    if cl.kind == "sink":
        return ("sink", arrivals(g, cl.vertices[0], region, src).key())
    n = cl.length
    mu = [0] * n
    for i, w in enumerate(cl.vertices):
        mu = [zadd(a, b) for a, b in zip(mu, rot(arrivals(g, w, region, src).fold(n), -i))]
    return ("cycle", n, min(_k(rot(mu, s)) for s in range(n)))


@dataclass
class TwoFactorData:
    m: int
    n: int
    A: object  # m > 0: x-poly of the relation; m = 0: x-poly of all exits of v_0
    Q: Seq  # y-coefficients of u
    beta: object  # x-coefficients of u: tuple (n > 0) or Seq (n = 0)
    E: list = None  # per cycle vertex: x-poly of its exits
    beta0: object = None  # x-part contributed by paths that avoid the top cluster


def two_factor_data(g: Graph, d: Cluster, c: Cluster) -> TwoFactorData:
    n = d.length
    m = c.length
    src = sources(g)
    region = set(g.vertices) - set(c.vertices) - set(d.vertices)

    def xpoly_zero():
        return [0] * n if n else Seq()

    def xadd(a, b):
        if n:
            return [zadd(x, y) for x, y in zip(a, b)]
        return a + b

    def xshift(seq: Seq, i: int):
        # a sequence indexed by path length, landing at w_i
        return rot(seq.fold(n), -i) if n else seq

    # class of every vertex that reaches d avoiding c, as an x-poly
    cls: dict = {}
    for i, w in enumerate(d.vertices):
        for h, p in paths_to(g, w, region).items():
            cls[h] = xadd(cls.get(h, xpoly_zero()), xshift(Seq.from_dict(p), i))

    beta = xpoly_zero()
    for i, w in enumerate(d.vertices):
        beta = xadd(beta, xshift(arrivals(g, w, region, src), i))

    def exits_of(v):
        acc = xpoly_zero()
        for h, k in g.out(v).items():
            if h in c.vertices:
                continue
            if h not in cls:
                raise OutOfScope("exit does not lead to the bottom cluster")
            p = cls[h]
            p = rot(p, 1) if n else p.shift(1)
            acc = xadd(acc, [zmul(k, x) for x in p] if n else p.scale(k))
        return acc

    if m == 0:
        v0 = c.vertices[0]
        Q = arrivals(g, v0, region, src)
        e0 = exits_of(v0)
        return TwoFactorData(0, n, e0, Q, tuple(beta) if n else beta, [e0], beta)

    E = [exits_of(v) for v in c.vertices]
    if not n and any(not e.is_finite_support() or any(is_omega(x) for x in e.prefix) for e in E):
        raise OutOfScope("cycle with infinitely many exits")
    if n and any(is_omega(x) for e in E for x in e):
        raise OutOfScope("cycle with infinitely many exits")
    beta0 = beta
    A = xpoly_zero()
    for k, e in enumerate(E):
        A = xadd(A, rot(e, k) if n else e.shift(k))
    Q = Seq()
    for j, v in enumerate(c.vertices):
        N = arrivals(g, v, region, src)
        Q = Q + N.shift((m - j) % m)
        if j == 0:
            continue
        tail = xpoly_zero()
        for k in range(j, m):
            tail = xadd(tail, rot(E[k], k - j) if n else E[k].shift(k - j))
        if n:
            beta = xadd(beta, cconv(N.fold(n), tail))
        else:
            beta = beta + seq_mul(N, tail)
    return TwoFactorData(m, n, A, Q, tuple(beta) if n else beta, E, beta0)


def _key_cycle_cycle(D: TwoFactorData) -> tuple:
    m, n = D.m, D.n
    G = math.gcd(m, n)
    A = list(D.A)
    Q = D.Q
    ubar = Q.fold(m)
    beta = list(D.beta)
    # bring y-exponents into [0, m) using t^(r+km) y = t^r y - sum_{i<k} t^(r+im) A x
    for L in range(len(Q.prefix) + len(Q.period) * m):
        r, k = L % m, L // m
        q = Q[L]
        if q == 0 or is_omega(ubar[r]) or k == 0:
            continue
        for i in range(k):
            for a, coef in enumerate(A):
                if coef:
                    j = (r + i * m + a) % n
                    beta[j] = zadd(beta[j], -q * coef)
    best = None
    for R in range(m):
        for s in range(n):
            cand = _cycle_cycle_candidate(m, n, G, A, ubar, beta, R, s)
            if best is None or cand < best:
                best, rotation = cand, (R, s)
    return ("two", m, n) + best, rotation


def _cycle_cycle_candidate(m, n, G, A, ubar, beta, R, s):
    A_new = rot(A, R - s)
    Abar = fold(A_new, G)
    A_can = [Abar[i] if i < G else 0 for i in range(n)]
    Dv = [a - b for a, b in zip(A_new, A_can)]
    delta = [0] * n
    for c0 in range(G):
        i = c0
        for _ in range(n // G - 1):
            j = (i + m) % n
            delta[j] = delta[i] - Dv[j]
            i = j
    ub = [ubar[(r + R) % m] for r in range(m)]
    b = rot(beta, -s)
    for r in range(m):
        q = ubar[r]
        if is_omega(q) or q == 0:
            continue
        for i in range(n):
            j = (i + r - R) % n
            b[j] = zadd(b[j], -q * delta[i])
            if r < R:
                b[j] = zadd(b[j], q * A_can[i])
    supp = [c0 for c0 in range(G) if Abar[c0] != 0]
    sat = {(r + c0) % G for r in range(m) if is_omega(ub[r]) for c0 in supp}
    for i in range(n):
        if i % G in sat:
            b[i] = OMEGA
    # lattice of coset shifts: kappa supported on supp, acting through fold_G(ub)
    ubf = fold([0 if is_omega(x) else x for x in ub], G)
    coords = []
    for c0 in range(G):
        ref = next((i for i in range(c0, n, G) if not is_omega(b[i])), None)
        if ref is not None:
            coords.append((c0, ref))
    gens = []
    for c0 in supp:
        vec = [ubf[(cp - c0) % G] for cp, _ in coords]
        gens.append(vec)
    v = [b[ref] for _, ref in coords]
    v2 = lattice_reduce(v, gens)
    for (c0, ref), old, new in zip(coords, v, v2):
        if old != new:
            for i in range(c0, n, G):
                if not is_omega(b[i]):
                    b[i] = b[i] + new - old
    return (_k(Abar), _k(ub), _k(b))


def _key_cycle_sink(D: TwoFactorData) -> tuple:
    m = D.m
    A: Seq = D.A
    Gm = geometric({i: x for i, x in enumerate(A.prefix) if x != 0}, m)
    Phi = D.beta + seq_mul(D.Q, Gm)
    ubar = D.Q.fold(m)
    Abar = A.fold(m)
    best, R = min(((_k(rot(ubar, -R)), _k(rot(Abar, R))), R) for R in range(m))
    return ("two", m, 0, Phi.key()) + best, (R, 0)


def _key_emitter(D: TwoFactorData) -> tuple:
    n = D.n
    Q = D.Q
    if n:
        Aall = list(D.A)
        W = [i for i, x in enumerate(Aall) if is_omega(x)]
        Afin = [0 if is_omega(x) else x for x in Aall]
        Qt = Q.fold(n)
        b = [zadd(x, y) for x, y in zip(D.beta, cconv(Qt, Afin))]
        supp = [i for i, x in enumerate(Aall) if x != 0]
        for r in range(n):
            if is_omega(Qt[r]):
                for a in supp:
                    b[(r + a) % n] = OMEGA
        Qf = [0 if is_omega(x) else x for x in Qt]
        best = None
        for s in range(n):
            bs = rot(b, -s)
            Ws = sorted((a - s) % n for a in W)
            free = [i for i in range(n) if not is_omega(bs[i])]
            gens = [[Qf[(i - a) % n] for i in free] for a in Ws]
            red = lattice_reduce([bs[i] for i in free], gens)
            for i, x in zip(free, red):
                bs[i] = x
            cand = (tuple(Ws), _k(bs))
            if best is None or cand < best:
                best, rotation = cand, (0, s)
        return ("two", 0, n, Q.key()) + best, rotation
    A: Seq = D.A
    W = [i for i in range(A.horizon()) if is_omega(A[i])]
    if not A.is_finite_support():
        raise OutOfScope("infinite emitter with unbounded exit classes")
    Afin = {i: x for i, x in enumerate(A.prefix) if x != 0 and not is_omega(x)}
    b = D.beta + Q.conv_poly(Afin)
    supp = {i: 1 for i, x in enumerate(A.prefix) if x != 0}
    mask = Q.map(lambda x: 1 if is_omega(x) else 0).conv_poly(supp)
    b = b.zip_with(mask, lambda x, k: OMEGA if k != 0 else x)
    Qf = Q.map(lambda x: 0 if is_omega(x) else x)
    K = max(b.horizon(), Qf.horizon() + (max(W) + 1 if W else 0)) + 1
    vals = [b[i] for i in range(K)]
    free = [i for i in range(K) if not is_omega(vals[i])]
    gens = [[Qf[i - a] for i in free] for a in W]
    red = lattice_reduce([vals[i] for i in free], gens)
    for i, x in zip(free, red):
        vals[i] = x
    tail = Seq(tuple(vals), tuple(b[i] for i in range(K, K + len(b.period))))
    return ("two", 0, 0, Q.key(), tuple(W), (_k(tail.prefix), _k(tail.period))), (0, 0)


def two_factor_normal(g: Graph, d: Cluster, c: Cluster):
    """(key, (R, s)): the key and the rotations of the top and bottom cycles that attain it."""
    D = two_factor_data(g, d, c)
    if D.m and D.n:
        return _key_cycle_cycle(D)
    if D.m:
        return _key_cycle_sink(D)
    return _key_emitter(D)


def two_factor_key(g: Graph, d: Cluster, c: Cluster) -> tuple:
    return two_factor_normal(g, d, c)[0]


# ---------------------------------------------------------------- components

@dataclass
class ComponentShape:
    kind: str  # "leaves" or "two"
    clusters: list  # leaves: terminal clusters; two: [bottom, top]


def component_shape(g: Graph) -> ComponentShape:
    if not cycles_disjoint(g):
        raise OutOfScope("cycles are not mutually disjoint")
    if g.rays:
        bare = Graph(g.vertices, g.edges, g.weight)
    else:
        bare = g
    try:
        cs = composition_series(bare)
    except NoCompositionSeries as e:
        raise OutOfScope(str(e))
    bad = [f for f in cs.factors if f.kind not in ("sink", "cycle")]
    if bad:
        raise OutOfScope(f"terminal cluster of type {bad[0].kind}")
    if all(layer == 0 for layer in cs.layers):
        return ComponentShape("leaves", list(cs.factors))
    if len(cs.factors) == 2:
        return ComponentShape("two", list(cs.factors))
    raise OutOfScope(f"composition length {len(cs.factors)} with {max(cs.layers) + 1} layers")


def component_keys(g: Graph) -> list:
    """Keys of the independent parts of a connected graph (one per leaf cluster, or one in total)."""
    shape = component_shape(g)
    if shape.kind == "leaves":
        allv = {v for c in shape.clusters for v in c.vertices}
        return [leaf_key(g, c, allv) for c in shape.clusters]
    d, c = shape.clusters
    return [two_factor_key(g, d, c)]


def graph_key(g: Graph) -> tuple:
    """Sorted multiset of part keys; two graphs are graded isomorphic iff their keys agree."""
    keys = []
    for comp in weak_components(g):
        keys.extend(component_keys(g.subgraph(comp)))
    return tuple(sorted(keys))
