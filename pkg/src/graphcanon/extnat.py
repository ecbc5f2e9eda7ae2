"""Extended naturals (N plus omega) and eventually periodic sequences of them."""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Union


@total_ordering
class _Omega:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "ω"

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return other is not self

    def __hash__(self):
        return hash("omega")

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other == 0:
            return 0
        return self

    __rmul__ = __mul__

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()
ExtNat = Union[int, _Omega]


class ExtNatError(ValueError):
    pass


def is_omega(x) -> bool:
    return x is OMEGA


def check(x) -> ExtNat:
    if x is OMEGA:
        return x
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise ExtNatError(f"not an extended natural: {x!r}")
    return x


def add(a: ExtNat, b: ExtNat) -> ExtNat:
    if a is OMEGA or b is OMEGA:
        return OMEGA
    return a + b


def sub(a: ExtNat, b: ExtNat) -> ExtNat:
    """Truncated cardinal subtraction: omega - n = omega, n - omega is an error."""
    if b is OMEGA:
        raise ExtNatError("cannot subtract omega")
    if a is OMEGA:
        return OMEGA
    if a < b:
        raise ExtNatError(f"{a} - {b} is negative")
    return a - b


def mul(a: ExtNat, b: ExtNat) -> ExtNat:
    if a == 0 or b == 0:
        return 0
    if a is OMEGA or b is OMEGA:
        return OMEGA
    return a * b


def total(xs: Iterable[ExtNat]) -> ExtNat:
    s = 0
    for x in xs:
        s = add(s, x)
    return s


def to_json(x: ExtNat):
    return "omega" if x is OMEGA else x


def from_json(x) -> ExtNat:
    if x in ("omega", "ω", "w"):
        return OMEGA
    return check(x)


def sort_key(x: ExtNat):
    return (1, 0) if x is OMEGA else (0, x)


@dataclass(frozen=True)
class Seq:
    """Eventually periodic sequence s_0, s_1, ...: prefix then period repeated forever."""

    prefix: tuple = ()
    period: tuple = (0,)

    def __post_init__(self):
        if not self.period:
            object.__setattr__(self, "period", (0,))
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))

    @staticmethod
    def finite(values) -> "Seq":
        return Seq(tuple(values), (0,)).normal()

    @staticmethod
    def from_dict(d: dict) -> "Seq":
        if not d:
            return Seq()
        n = max(d) + 1
        return Seq.finite([d.get(i, 0) for i in range(n)])

    def __getitem__(self, i: int) -> ExtNat:
        if i < 0:
            return 0
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def horizon(self) -> int:
        return len(self.prefix) + len(self.period)

    def is_finite_support(self) -> bool:
        return all(x == 0 for x in self.period)

    def support_bound(self):
        """Last nonzero index + 1 for finite support, None otherwise."""
        if not self.is_finite_support():
            return None
        p = list(self.prefix)
        while p and p[-1] == 0:
            p.pop()
        return len(p)

    def normal(self) -> "Seq":
        per = list(self.period)
        # minimal period
        n = len(per)
        for d in range(1, n + 1):
            if n % d == 0 and all(per[i] == per[i % d] for i in range(n)):
                per = per[:d]
                break
        pre = list(self.prefix)
        # absorb prefix tail into the period
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = [per[-1]] + per[:-1]
        return Seq(tuple(pre), tuple(per))

    def _common(self, other: "Seq"):
        import math

        plen = max(len(self.prefix), len(other.prefix))
        per = len(self.period) * len(other.period) // math.gcd(len(self.period), len(other.period))
        return plen, per

    def zip_with(self, other: "Seq", f) -> "Seq":
        plen, per = self._common(other)
        pre = tuple(f(self[i], other[i]) for i in range(plen))
        prd = tuple(f(self[i], other[i]) for i in range(plen, plen + per))
        return Seq(pre, prd).normal()

    def __add__(self, other: "Seq") -> "Seq":
        return self.zip_with(other, add)

    def map(self, f) -> "Seq":
        return Seq(tuple(f(x) for x in self.prefix), tuple(f(x) for x in self.period)).normal()

    def scale(self, c: ExtNat) -> "Seq":
        return self.map(lambda x: mul(c, x))

    def shift(self, k: int) -> "Seq":
        """Multiply by t^k (k >= 0): s'_i = s_{i-k}."""
        if k < 0:
            raise ValueError("negative shift")
        if k == 0:
            return self
        per = self.period
        # keep the periodic phase consistent
        pre = (0,) * k + self.prefix
        return Seq(pre, per).normal()

    def le(self, other: "Seq") -> bool:
        plen, per = self._common(other)
        return all(self[i] <= other[i] for i in range(plen + per))

    def sum(self) -> ExtNat:
        if not self.is_finite_support():
            return OMEGA
        return total(self.prefix)

    def fold(self, m: int) -> tuple:
        """Sum of entries by index class mod m (m > 0)."""
        out = [0] * m
        for i, x in enumerate(self.prefix):
            out[i % m] = add(out[i % m], x)
        if not self.is_finite_support():
            start = len(self.prefix)
            for i in range(start, start + len(self.period) * m):
                if self[i] != 0:
                    out[i % m] = OMEGA
        return tuple(out)

    def conv_poly(self, poly: dict) -> "Seq":
        """Multiply by a finite polynomial {exponent>=0: coeff}."""
        acc = Seq()
        for e, c in poly.items():
            if c != 0:
                acc = acc + self.shift(e).scale(c)
        return acc

    def to_json(self):
        s = self.normal()
        if s.is_finite_support():
            return [to_json(x) for x in s.prefix]
        return {"prefix": [to_json(x) for x in s.prefix], "period": [to_json(x) for x in s.period]}

    @staticmethod
    def from_json(obj) -> "Seq":
        if isinstance(obj, list):
            return Seq.finite([from_json(x) for x in obj])
        return Seq(tuple(from_json(x) for x in obj.get("prefix", [])),
                   tuple(from_json(x) for x in obj.get("period", [0]))).normal()

    def key(self):
        s = self.normal()
        return (tuple(sort_key(x) for x in s.prefix), tuple(sort_key(x) for x in s.period))

    def __repr__(self):
        s = self.normal()
        if s.is_finite_support():
            return f"Seq{list(s.prefix)}"
        return f"Seq({list(s.prefix)}, ({list(s.period)})*)"


def geometric(poly: dict, m: int) -> Seq:
    """Coefficients of poly(t) / (1 - t^m) for a finite polynomial with nonneg coefficients."""
    if not poly:
        return Seq()
    deg = max(poly)
    n = deg + 1
    vals = []
    for i in range(n + m):
        s = 0
        j = i
        while j >= 0:
            s = add(s, poly.get(j, 0))
            j -= m
        vals.append(s)
    return Seq(tuple(vals[:n]), tuple(vals[n:n + m])).normal()
