import random

import pytest

from oracles import brute_nullspace_check
from supertheta.ecurve import CDDivisor, Curve, eg_neg, normalizing_point, rational_equiv_translate, torsion_frame
from supertheta.ffield import NilRing, make_field
from supertheta.linalg import proportional
from supertheta.sections import (FPoint, PoleError, Prod, Root, SectionError, SubgroupPart, build_section_space,
                                 comodule_on_sections, exact, field_ctx, invariant_section, laurent_ctx,
                                 level_functions, level_word, nil_ctx, random_point, relating_function,
                                 rho2_and_eval)
from supertheta.series import Laurent

MB_H = [["3", "(1+i)F"], ["-(1+i)F", "3"]]


@pytest.fixture(scope="module")
def mb():
    F = make_field(3, 4)
    E = Curve(F, F.neg(1), 0)
    D1 = CDDivisor.from_config([["1", "0"], ["1+i", "iF"]])
    D2 = CDDivisor.from_config([["0", "1"], ["F", "i-1"]])
    frame = torsion_frame(E, MB_H)
    D = D2.translate(E, eg_neg(E, normalizing_point(E, D2, frame)))
    rng = random.Random(1)
    S = build_section_space(E, D, 1, 1, 3, rng)
    oracle = lambda Dp, _D: relating_function(E, S, Dp, rng)
    P1, r1 = rational_equiv_translate(E, D1, D, MB_H, oracle)
    P2, r2 = rational_equiv_translate(E, D2, D, MB_H, oracle)
    beta = F.elem([0, 1, 0, 0]).v
    parts = [SubgroupPart(r1, [[0, beta]]), SubgroupPart(r2, [[1, 0]])]
    avoid = [D1.translate(E, P1), D2.translate(E, P2)]
    data = comodule_on_sections(E, S, parts, avoid, rng)
    return dict(F=F, E=E, D=D, frame=frame, S=S, data=data)


def _values(E, D, f, rng, count=4):
    out = []
    while len(out) < count:
        P = random_point(E, 2, rng, [D])
        try:
            out.append((P, f.ev(exact(P), field_ctx(E)).v))
        except PoleError:
            continue
    return out


def test_section_space_dimension(mb):
    assert mb["S"].dim == 3
    with pytest.raises(SectionError):
        build_section_space(mb["E"], mb["D"], 1, 1, 4, random.Random(2), rounds=4)


def test_root_inverts_powers(mb):
    E, D, S = mb["E"], mb["D"], mb["S"]
    f = S.basis[1]
    g = Root(Prod([(f, 3)]), 1)
    for P, v in _values(E, D, f, random.Random(5)):
        assert g.ev(exact(P), field_ctx(E)).v == v


def test_contexts_agree_on_constant_terms(mb):
    E, D, S, F = mb["E"], mb["D"], mb["S"], mb["F"]
    f = S.basis[0]
    rng = random.Random(9)
    ring = NilRing(F, ("t0", "t1"), (3, 3))
    for P, v in _values(E, D, f, rng, 3):
        nil = f.ev(tuple(FPoint(c, t) for c, t in zip(P, ring.gens())), nil_ctx(E, ring))
        assert nil.constant() == v
        t = Laurent.monomial(F, 1, 1).truncate(12)
        lau = f.ev(tuple(FPoint(c, t) for c in P), laurent_ctx(E, 12))
        assert lau.coeff(0) == v


def test_level_group_is_a_heisenberg_representation(mb):
    E, D, F, frame = mb["E"], mb["D"], mb["F"], mb["frame"]
    levs = level_functions(E, frame, D)
    f = mb["S"].basis[0]
    rng = random.Random(3)

    def ratio(w1, w2):
        vals = set()
        a, b = level_word(levs, w1, f), level_word(levs, w2, f)
        for P, _ in _values(E, D, f, rng, 6):
            try:
                num, den = a.ev(exact(P), field_ctx(E)).v, b.ev(exact(P), field_ctx(E)).v
            except PoleError:
                continue
            if num and den:
                vals.add(F.div(num, den))
        assert len(vals) == 1
        return vals.pop()

    z = frame.zeta
    for k in (1, 2):
        assert ratio([f"x{k}", f"y{k}"], [f"y{k}", f"x{k}"]) in (z, F.inv(z))
        assert ratio([f"x{k}"] * 4, []) == 1
        assert ratio([f"y{k}"] * 4, []) == 1
    assert ratio(["x1", "y2"], ["y2", "x1"]) == 1
    assert ratio(["x1", "x2"], ["x2", "x1"]) == 1


def test_invariant_section(mb):
    S, data, F = mb["S"], mb["data"], mb["F"]
    v, rho = invariant_section(S, data)
    assert any(v)
    for C in data.comodules:
        assert brute_nullspace_check(F, C.X, v)
        assert C.is_invariant(v)
    for start in ([1, 0, 0], [0, 1, 0], [1, 1, 2]):
        w, _ = invariant_section(S, data, start)
        assert proportional(F, v, w)


def test_evaluation_is_independent_of_the_formal_line(mb):
    E, D, S = mb["E"], mb["D"], mb["S"]
    _, ev = rho2_and_eval(E, D)
    f = S.basis[2]
    assert ev(f, 1, random.Random(1)) == ev(f, 1, random.Random(77))
