import pytest
from hypothesis import given, settings, strategies as st

from oracles import LiftRing
from supertheta.ffield import (FieldElement, FieldError, NilRing, embed_map, is_irreducible, make_field,
                               nilring_unit_sqrt)

FIELDS = [make_field(3), make_field(3, 2), make_field(3, 4), make_field(5, 2), make_field(7, 3)]


def elems(F):
    return st.integers(min_value=0, max_value=F.q - 1)


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: f"F{F.p}^{F.k}")
def test_mul_matches_schoolbook(F):
    R = LiftRing(F.modulus)
    for a in range(0, F.q, max(1, F.q // 40)):
        for b in range(1, F.q, max(1, F.q // 30)):
            want = [c % F.p for c in R.mul(list(F.coords(a)), list(F.coords(b)))]
            assert list(F.coords(F.mul(a, b))) == want


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: f"F{F.p}^{F.k}")
def test_inverse_and_frobenius(F):
    for a in range(1, F.q):
        assert F.mul(a, F.inv(a)) == 1
    for a in range(F.q):
        assert F.frob(a, F.k) == a
        assert F.frob(a) == F.pow(a, F.p)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_field_axioms(data):
    F = data.draw(st.sampled_from(FIELDS))
    a, b, c = (data.draw(elems(F)) for _ in range(3))
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.sub(F.add(a, b), b) == a


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_sqrt_roundtrip(data):
    F = data.draw(st.sampled_from(FIELDS))
    a = data.draw(elems(F))
    sq = F.mul(a, a)
    assert F.is_square(sq)
    r = F.sqrt(sq)
    assert F.mul(r, r) == sq


def test_embedding_is_a_ring_map():
    small, big = make_field(3, 2), make_field(3, 4)
    e = embed_map(small, big)
    for a in range(small.q):
        for b in range(small.q):
            assert e[small.mul(a, b)] == big.mul(e[a], e[b])
            assert e[small.add(a, b)] == big.add(e[a], e[b])
    with pytest.raises(FieldError):
        embed_map(make_field(3, 2), make_field(3, 3))


def test_irreducibility():
    assert is_irreducible((2, 1, 1), 3)
    assert not is_irreducible((2, 0, 1), 3)  # x^2 - 1


def test_nilring_units():
    F = make_field(3, 2)
    R = NilRing(F, ("s", "t"), (3, 9))
    s, t = R.gens()
    u = R.one() * FieldElement(F, 5) + s + t * t
    assert u * u.inverse() == R.one()
    assert (t ** 9).is_zero() and not (t ** 8).is_zero()
    v = u * u
    r = nilring_unit_sqrt(v)
    assert r * r == v
    assert (s * t).coefficient((1, 1)) == FieldElement(F, 1)
    with pytest.raises(Exception):
        (s + t).inverse()


@given(st.lists(st.integers(0, 8), min_size=3, max_size=3), st.lists(st.integers(0, 8), min_size=3, max_size=3))
@settings(max_examples=40, deadline=None)
def test_nilring_multiplication_commutes(xs, ys):
    F = make_field(3, 2)
    R = NilRing(F, ("s", "t"), (3, 9))
    s, t = R.gens()
    basis = [R.one(), s, t]
    x = sum((b * FieldElement(F, c) for b, c in zip(basis, xs)), R.zero())
    y = sum((b * FieldElement(F, c) for b, c in zip(basis, ys)), R.zero())
    assert x * y == y * x
    assert (x + y) ** 3 == x ** 3 + y ** 3
