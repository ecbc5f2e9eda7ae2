import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphcanon.extnat import OMEGA, ExtNatError, Seq, add, check, from_json, geometric, mul, sub, to_json, total

extnat = st.one_of(st.integers(0, 50), st.just(OMEGA))
small = st.integers(0, 4)
seqs = st.builds(lambda pre, per: Seq(tuple(pre), tuple(per)),
                 st.lists(st.one_of(small, st.just(OMEGA)), max_size=4),
                 st.lists(st.one_of(small, st.just(OMEGA)), min_size=1, max_size=3))


def test_omega_arithmetic():
    assert add(3, OMEGA) is OMEGA
    assert mul(0, OMEGA) == 0
    assert mul(OMEGA, 2) is OMEGA
    assert sub(OMEGA, 5) is OMEGA
    assert total([1, 2, 3]) == 6
    assert total([1, OMEGA]) is OMEGA
    assert OMEGA > 10 ** 9 and not OMEGA < 0


def test_sub_errors():
    with pytest.raises(ExtNatError):
        sub(2, 3)
    with pytest.raises(ExtNatError):
        sub(OMEGA, OMEGA)


@pytest.mark.parametrize("bad", [-1, 1.5, "x", True])
def test_check_rejects(bad):
    with pytest.raises(ExtNatError):
        check(bad)


def test_json_roundtrip():
    for x in (0, 7, OMEGA):
        assert from_json(to_json(x)) == x
    assert from_json("ω") is OMEGA


@given(extnat, extnat, extnat)
def test_semiring_laws(a, b, c):
    assert add(a, b) == add(b, a)
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(a, b) == mul(b, a)
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@given(extnat, st.integers(0, 50))
def test_sub_inverts_add(a, b):
    assert sub(add(a, b), b) == a


@given(seqs)
def test_normal_preserves_values(s):
    n = s.normal()
    assert all(n[i] == s[i] for i in range(3 * s.horizon() + 6))
    assert n.normal() == n


@given(seqs, st.integers(0, 5))
def test_shift(s, k):
    sh = s.shift(k)
    assert all(sh[i] == s[i - k] for i in range(s.horizon() + k + 6))


@given(seqs, seqs)
def test_add_pointwise(a, b):
    c = a + b
    assert all(c[i] == add(a[i], b[i]) for i in range(a.horizon() * b.horizon() + 8))


@given(seqs, st.integers(1, 4))
def test_fold_matches_sums(s, m):
    f = s.fold(m)
    p = len(s.prefix)
    for r in range(m):
        head = total(s[i] for i in range(r, p, m))
        tail = any(s[i] != 0 for i in range(p, p + m * len(s.period)) if i % m == r)
        assert f[r] == (OMEGA if tail else head)


@given(seqs)
def test_seq_json_roundtrip(s):
    assert Seq.from_json(s.to_json()).key() == s.key()


def test_geometric_series():
    # (t + 2t^2) / (1 - t^2) = t + 2t^2 + t^3 + 2t^4 + ...
    g = geometric({1: 1, 2: 2}, 2)
    assert [g[i] for i in range(7)] == [0, 1, 2, 1, 2, 1, 2]
