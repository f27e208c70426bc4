import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from supertheta.ffield import make_field
from supertheta.thetanull import (E2, H2, D_minus1, Heisenberg, ThetaConstants, ThetaError, ThetaNullpoint,
                                  fourier_theta, labels, odd_labels, rosenhain_g2, squares_from_level2,
                                  thomae_fourth_powers, vanishing_profile)

F9 = make_field(3, 2)
I = F9.sqrt(F9.neg(1))
G4 = Heisenberg(F9, 4, 2, I)
G2 = Heisenberg(F9, 2, 2, F9.neg(1))


def helts(G):
    z = st.tuples(*[st.integers(0, G.N - 1)] * G.g)
    return st.tuples(st.integers(1, F9.q - 1), z, z).map(lambda t: G.element(*t))


@given(helts(G4), helts(G4), helts(G4))
@settings(max_examples=50, deadline=None)
def test_heisenberg_group_axioms(u, v, w):
    G = G4
    assert G.mul(G.mul(u, v), w) == G.mul(u, G.mul(v, w))
    assert G.mul(u, G.inv(u)) == G.identity() == G.mul(G.inv(u), u)
    assert G.mul(u, G.identity()) == u


@given(helts(G4), helts(G4))
@settings(max_examples=30, deadline=None)
def test_action_is_a_representation(u, v):
    rng = random.Random(hash((u, v)))
    f = {y: rng.randrange(F9.q) for y in G4.points()}
    assert G4.act(u, G4.act(v, f)) == G4.act(G4.mul(u, v), f)


@given(helts(G2), helts(G2))
@settings(max_examples=30, deadline=None)
def test_structural_maps_are_homomorphisms(u, v):
    assert E2(G2, G4, G2.mul(u, v)) == G4.mul(E2(G2, G4, u), E2(G2, G4, v))
    a, b = (G4.element(s, x, c) for s, x, c in (u, v))
    assert H2(G4, G2, G4.mul(a, b)) == G2.mul(H2(G4, G2, a), H2(G4, G2, b))
    assert D_minus1(G4, G4.mul(a, b)) == G4.mul(D_minus1(G4, a), D_minus1(G4, b))


def test_heisenberg_checks():
    with pytest.raises(ThetaError):
        Heisenberg(F9, 4, 2, F9.neg(1))
    with pytest.raises(ThetaError):
        E2(G4, G4, G4.identity())
    with pytest.raises(ThetaError):
        ThetaNullpoint(F9, 2, 1, {(0,): 0, (1,): 0})


def test_fourier_needs_level_four_and_a_root():
    q2 = ThetaNullpoint(F9, 2, 1, {(0,): 1, (1,): 2})
    with pytest.raises(ThetaError):
        fourier_theta(q2, I)
    q4 = ThetaNullpoint(F9, 4, 1, {(0,): 1, (1,): 2, (2,): 0, (3,): 2})
    with pytest.raises(ThetaError):
        fourier_theta(q4, 1)
    assert q4.is_symmetric()
    th = fourier_theta(q4, I)
    assert th.table[((1,), (1,))] == 0
    assert vanishing_profile(th) == set()


def test_squares_of_a_product_nullpoint():
    # a level 2 nullpoint that is a tensor product gives product squares
    a, b = {0: 1, 1: 2}, {0: 1, 1: 4}
    q = ThetaNullpoint(F9, 2, 2, {x: F9.mul(a[x[0]], b[x[1]]) for x in itertools.product((0, 1), repeat=2)})
    sq = squares_from_level2(q)
    qa = squares_from_level2(ThetaNullpoint(F9, 2, 1, {(k,): v for k, v in a.items()}))
    qb = squares_from_level2(ThetaNullpoint(F9, 2, 1, {(k,): v for k, v in b.items()}))
    for (a1, b1), va in qa.table.items():
        for (a2, b2), vb in qb.table.items():
            assert sq.table[((a1[0], a2[0]), (b1[0], b2[0]))] == F9.mul(va, vb)


def _moebius_classes(F, pts):
    """Images of the rest of a point set of P^1 under the maps sending a triple to 0, 1, inf.

    Points are affine values or None for infinity.
    """
    proj = [(1, 0) if z is None else (z, 1) for z in pts]

    def form(a, z):
        return F.sub(F.mul(a[1], z[0]), F.mul(a[0], z[1]))

    def norm(z):
        return None if z[1] == 0 else F.div(z[0], z[1])

    out = set()
    for a, b, c in itertools.permutations(proj, 3):
        img = [(F.mul(form(a, z), form(c, b)), F.mul(form(c, z), form(a, b)))
               for z in proj if z not in (a, b, c)]
        out.add(frozenset(norm(z) for z in img))
    return out


def test_rosenhain_matches_thomae():
    F = make_field(101)
    roots = [0, 1, 2, 3, 5]
    target = _moebius_classes(F, roots + [None])
    fourth = thomae_fourth_powers(F, roots)
    assert {lab for lab, v in fourth.table.items() if v == 0} == odd_labels(2)
    # on fourth powers the formula returns lambda^2
    lam2 = rosenhain_g2(ThetaConstants(F, 2, fourth.table, squares=True))
    found = False
    for lam in itertools.product(*[[r, F.neg(r)] for r in (F.sqrt(x) for x in lam2)]):
        if frozenset(lam) in target:
            found = True
    assert found


def test_rosenhain_rejects_bad_input():
    F = make_field(101)
    tab = {lab: (0 if lab in odd_labels(2) else 1) for lab in labels(2)}
    with pytest.raises(ThetaError):
        rosenhain_g2(ThetaConstants(F, 2, tab, squares=True))  # all lambda equal
    tab[((0, 0), (0, 0))] = 0
    with pytest.raises(ThetaError):
        rosenhain_g2(ThetaConstants(F, 2, tab, squares=True))
    tab = {lab: 1 for lab in labels(2)}
    with pytest.raises(ThetaError):
        rosenhain_g2(ThetaConstants(F, 2, tab, squares=True))
