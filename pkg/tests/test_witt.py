from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supertheta.ffield import FieldElement, NilRing, make_field
from supertheta.witt import (WittError, WittVector, ah_exp_eval, ah_pairing, ah_series, frobenius,
                             pairing_length, shift_t, sigma_pad, teichmuller, universal_points, witt_from_int, witt_one, witt_zero)

F9 = make_field(3, 2)


def wv(F, vals):
    return WittVector(F.p, [FieldElement(F, v) for v in vals])


witt3 = st.lists(st.integers(0, F9.q - 1), min_size=3, max_size=3).map(lambda v: wv(F9, v))


@given(witt3, witt3, witt3)
@settings(max_examples=50, deadline=None)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == witt_zero(3, 3, a.coords[0])


@given(witt3, witt3)
@settings(max_examples=40, deadline=None)
def test_frobenius_is_a_ring_map(a, b):
    assert frobenius(a + b) == frobenius(a) + frobenius(b)
    assert frobenius(a * b) == frobenius(a) * frobenius(b)


@given(witt3)
@settings(max_examples=40, deadline=None)
def test_v_f_is_multiplication_by_p(a):
    one = a.coords[0] * 0 + 1
    assert shift_t(frobenius(a)) == witt_from_int(3, 3, 3, one) * a


@given(st.integers(0, F9.q - 1), st.integers(0, F9.q - 1))
@settings(max_examples=40, deadline=None)
def test_teichmuller_is_multiplicative(x, y):
    tx, ty = teichmuller(3, 3, FieldElement(F9, x)), teichmuller(3, 3, FieldElement(F9, y))
    assert tx * ty == teichmuller(3, 3, FieldElement(F9, F9.mul(x, y)))


def test_small_integers():
    one = FieldElement(F9, 1)
    assert witt_from_int(3, 2, 1, one) == witt_one(3, 2, one)
    # 3 = (0, 1) in W_2(F_3) and -1 = (-1, 0) for odd p
    assert witt_from_int(3, 2, 3, one).coords == (FieldElement(F9, 0), FieldElement(F9, 1))
    assert witt_from_int(3, 2, -1, one).coords == (FieldElement(F9, 2), FieldElement(F9, 0))


@pytest.mark.parametrize("p", [3, 5])
def test_artin_hasse_series(p):
    N = 3 * p * p
    s = ah_series(p, N)
    # exp(sum t^{p^i}/p^i) by the same recursion, then multiply: product is 1
    e = [Fraction(0)] * (N + 1)
    e[0] = Fraction(1)
    for k in range(1, N + 1):
        acc = Fraction(0)
        q = 1
        while q <= k:
            acc += e[k - q]
            q *= p
        e[k] = acc / k
    for k in range(N + 1):
        assert sum(s.rational[j] * e[k - j] for j in range(k + 1)) == (1 if k == 0 else 0)
    assert all(r.denominator % p for r in s.rational)


def test_ah_exp_is_a_homomorphism():
    F = make_field(3)
    R = NilRing(F, ("a0", "a1", "b0", "b1"), (3, 3, 3, 3))
    g = R.gens()
    a, b = WittVector(3, g[:2]), WittVector(3, g[2:])
    # additivity needs the untruncated sum: pad until the carries vanish
    L = pairing_length(a, b) + 1
    a, b = sigma_pad(a, L), sigma_pad(b, L)
    assert ah_exp_eval(a + b) == ah_exp_eval(a) * ah_exp_eval(b)


def test_pairing_argument_checks():
    F = make_field(3)
    R, x, y = universal_points(3, 1, 1, F)
    with pytest.raises(WittError):
        ah_pairing(x, y, 2, 1)
    S = NilRing(F, ("u",), (9,))
    u = WittVector(3, [S.gen(0)])
    with pytest.raises(WittError):
        ah_pairing(u, u, 1, 1)


def test_pairing_is_trivial_on_zero():
    F = make_field(3)
    R, x, y = universal_points(3, 2, 1, F)
    zero = WittVector(3, [R.zero()] * 2)
    assert ah_pairing(x, zero, 2, 1) == R.one()
