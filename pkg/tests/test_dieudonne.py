from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from supertheta.dieudonne import (DieudonneError, DieudonneModule, PsiMap, WnK, dieudonne_pairing,
                                  is_maximal_isotropic, kernel_for, kernel_module, psi_extend, sigma_of,
                                  splitting_sigma, standard_psi, witt_cover)
from supertheta.ecurve import Curve
from supertheta.ffield import make_field
from supertheta.order import parse_oexpr, parse_omatrix

F81 = make_field(3, 4)
E = Curve(F81, F81.neg(1), 0)
RELS = E.relations()
W2 = WnK(F81, 2)


def builder(W):
    return standard_psi(W, u_i=E.sqrt_minus_one, relations=RELS)


wel = st.tuples(st.integers(0, 80), st.integers(0, 80))


@given(wel, wel, wel)
@settings(max_examples=60, deadline=None)
def test_witt_ring_and_sigma(a, b, c):
    W = W2
    assert W.mul(a, W.add(b, c)) == W.add(W.mul(a, b), W.mul(a, c))
    assert W.sigma(W.mul(a, b)) == W.mul(W.sigma(a), W.sigma(b))
    assert W.sigma_inv(W.sigma(a)) == a
    if W.val(a) == 0:
        assert W.mul(a, W.inv(a)) == W.one
    if W.val(a) >= W.val(b) and not W.is_zero(b):
        assert W.mul(b, W.div(a, b)) == a


def test_witt_integers():
    W = W2
    assert W.mul(W.from_fraction(Fraction(1, 2)), W.from_int(2)) == W.one
    assert W.val(W.from_int(3)) == 1 and W.val(W.from_int(9)) == 2
    assert W.p_power(1) == W.from_int(3)


def test_psi_validation():
    psi = builder(W2)
    F = psi.of(parse_oexpr("F"))
    m3 = W2.neg(W2.from_int(3))
    FF = [[sum_ for sum_ in row] for row in psi.of(parse_oexpr("F F"))]
    assert FF == [[m3, W2.zero], [W2.zero, m3]]
    assert psi.of(parse_oexpr("i i")) == psi.of(parse_oexpr("-1"))
    bad = {"F": [[W2.one, W2.zero], [W2.zero, W2.one]]}
    with pytest.raises(DieudonneError):
        PsiMap(W2, bad)
    with pytest.raises(DieudonneError):
        PsiMap(W2, dict(psi.table), relations=[("ii", "1")])
    assert F[1][0] == W2.one


def test_kernel_length_check():
    # ker(3) = E[3] is not killed by F, so n = 1 is too small
    with pytest.raises(DieudonneError):
        kernel_for(WnK(F81, 1), 1, builder, parse_omatrix([["3"]]))
    amb, ker = kernel_for(WnK(F81, 2), 1, builder, parse_omatrix([["3"]]))
    assert ker.length == 2


def mb_setup():
    W = WnK(F81, 1)
    H = parse_omatrix([["3", "(1+i)F"], ["-(1+i)F", "3"]])
    amb, ker = kernel_for(W, 2, builder, H)
    psi = builder(W)
    subs = [kernel_module(amb, psi_extend(psi, parse_omatrix(rows)))
            for rows in ([["1", "0"], ["1+i", "iF"]], [["0", "1"], ["F", "i-1"]])]
    return amb, ker, psi_extend(psi, H), subs


def test_pairing_is_alternating_on_the_kernel():
    amb, ker, psiH, _ = mb_setup()
    W = amb.W
    for u in ker.gens:
        assert not any(dieudonne_pairing(amb, psiH, u, u, ker))
        for v in ker.gens:
            assert dieudonne_pairing(amb, psiH, u, v) == W.neg(dieudonne_pairing(amb, psiH, v, u))


def test_splitting_and_witt_cover():
    amb, ker, psiH, subs = mb_setup()
    assert sum(S.length for S in subs) == ker.length
    sig = splitting_sigma(subs, ker)
    W = amb.W
    for g, parts in zip(ker.gens, sig):
        total = [W.zero] * amb.rank
        for part, S in zip(parts, subs):
            assert S.contains(part)
            total = [W.add(a, b) for a, b in zip(total, part)]
        assert amb.canon(total) == g
    beta = F81.elem([0, 1, 0, 0]).v
    m = amb.canon(((1,), (0,), (beta,), (0,)))
    parts = sigma_of(subs, m)
    assert len(parts) == 2
    S = DieudonneModule(amb, [m])
    assert is_maximal_isotropic(S, ker, psiH)
    cov = witt_cover(S)
    assert cov.a == 1


def test_non_isotropic_rejected():
    amb, ker, psiH, _ = mb_setup()
    # for n = 1 the ambient is M(ker) itself; the whole of it is not isotropic
    assert not is_maximal_isotropic(DieudonneModule(amb, list(ker.gens)), ker, psiH)
    assert not is_maximal_isotropic(DieudonneModule(amb, [amb.basis_vector(0), amb.basis_vector(2)]),
                                    ker, psiH)
