"""Finite Heisenberg groups, theta nullpoints and their transforms.

Elements of Z_delta are tuples in (Z/N)^g (delta = (N, ..., N)); a character chi
of Z_delta is stored as a tuple c with chi(y) = zeta_N^{c . y}.  Field values are
raw encodings of a FieldDesc.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ffield import FieldDesc


class ThetaError(ValueError):
    pass


# --- Heisenberg groups ---------------------------------------------------------------

@dataclass(frozen=True)
class Heisenberg:
    F: FieldDesc
    N: int
    g: int
    zeta: int

    def __post_init__(self):
        F = self.F
        if F.pow(self.zeta, self.N) != 1 or (self.N > 1 and F.pow(self.zeta, self.N // 2) == 1):
            raise ThetaError("zeta is not a primitive N-th root of unity")

    def points(self):
        return list(itertools.product(range(self.N), repeat=self.g))

    def char(self, chi, y) -> int:
        e = sum(a * b for a, b in zip(chi, y)) % self.N
        return self.F.pow(self.zeta, e)

    def element(self, s, x, chi):
        return (s, tuple(a % self.N for a in x), tuple(a % self.N for a in chi))

    def identity(self):
        z = (0,) * self.g
        return (1, z, z)

    def mul(self, u, v):
        """(s, x, chi)(s', x', chi') = (s s' chi'(x), x + x', chi + chi')."""
        s, x, c = u
        t, y, d = v
        F = self.F
        return self.element(F.mul(F.mul(s, t), self.char(d, x)),
                            [a + b for a, b in zip(x, y)], [a + b for a, b in zip(c, d)])

    def inv(self, u):
        s, x, c = u
        F = self.F
        # (s, x, c)^{-1} = (s^{-1} c(x), -x, -c)
        return self.element(F.mul(F.inv(s), self.char(c, x)), [-a for a in x], [-a for a in c])

    def act(self, u, f: dict) -> dict:
        """(U_{(r, x, chi)} f)(y) = r chi(y) f(x + y)."""
        r, x, c = u
        F, N = self.F, self.N
        out = {}
        for y in self.points():
            xy = tuple((a + b) % N for a, b in zip(x, y))
            out[y] = F.mul(F.mul(r, self.char(c, y)), f.get(xy, 0))
        return out


def _same_shape(G: Heisenberg, H: Heisenberg):
    if G.F != H.F or G.g != H.g:
        raise ThetaError("delta mismatch")


def E2(G: Heisenberg, G2: Heisenberg, u):
    """G(delta) -> G(2 delta): (s, x, chi) -> (s^2, [2]x, r^D(chi))."""
    _same_shape(G, G2)
    if G2.N != 2 * G.N:
        raise ThetaError("delta mismatch")
    s, x, c = u
    return G2.element(G.F.mul(s, s), [2 * a for a in x], [2 * a for a in c])


def H2(G2: Heisenberg, G: Heisenberg, u):
    """G(2 delta) -> G(delta): (s, x, chi) -> (s^2, r(x), [2]^D(chi))."""
    _same_shape(G, G2)
    if G2.N != 2 * G.N:
        raise ThetaError("delta mismatch")
    s, x, c = u
    return G.element(G.F.mul(s, s), x, c)


def D_minus1(G: Heisenberg, u):
    s, x, c = u
    return G.element(s, [-a for a in x], [-a for a in c])


# --- nullpoints and theta constants ---------------------------------------------------------

@dataclass
class ThetaNullpoint:
    F: FieldDesc
    N: int
    g: int
    values: dict

    def __post_init__(self):
        if not any(self.values.values()):
            raise ThetaError("nullpoint is identically zero")

    def __call__(self, x):
        return self.values.get(tuple(a % self.N for a in x), 0)

    def is_symmetric(self) -> bool:
        return all(self(x) == self(tuple(-a for a in x)) for x in self.values)


@dataclass
class ThetaConstants:
    F: FieldDesc
    g: int
    table: dict
    squares: bool = False

    def labels(self):
        return sorted(self.table)

    def normalized(self):
        """Divide by the first nonzero even entry."""
        F = self.F
        for lab in self.labels():
            v = self.table[lab]
            if v:
                inv = F.inv(v)
                return ThetaConstants(F, self.g, {k: F.mul(inv, w) for k, w in self.table.items()},
                                      self.squares)
        raise ThetaError("all theta constants vanish")

    def squared(self):
        F = self.F
        if self.squares:
            raise ThetaError("already squares")
        return ThetaConstants(F, self.g, {k: F.mul(v, v) for k, v in self.table.items()}, True)


def labels(g: int):
    bits = list(itertools.product((0, 1), repeat=g))
    return [(a, b) for a in bits for b in bits]


def parity(a, b) -> int:
    return sum(x * y for x, y in zip(a, b)) % 2


def fourier_theta(q: ThetaNullpoint, i: int) -> ThetaConstants:
    """theta_{a,b} = sum_{c = a mod 2} i^{c.b} q(c) for a level-4 nullpoint."""
    F = q.F
    if q.N != 4:
        raise ThetaError("fourier_theta needs a level 4 nullpoint")
    if F.mul(i, i) != F.neg(1):
        raise ThetaError("i is not a square root of -1")
    table = {}
    for a, b in labels(q.g):
        s = 0
        for c in itertools.product(range(4), repeat=q.g):
            if any((x - y) % 2 for x, y in zip(c, a)):
                continue
            e = sum(x * y for x, y in zip(c, b)) % 4
            s = F.add(s, F.mul(F.pow(i, e), q(c)))
        table[(a, b)] = s
    return ThetaConstants(F, q.g, table)


def squares_from_level2(q2: ThetaNullpoint) -> ThetaConstants:
    """theta_{a,b}^2 = sum_{x in Z_2} (-1)^{x.b} q(x) q(x + a)."""
    F = q2.F
    if q2.N != 2:
        raise ThetaError("squares_from_level2 needs a level 2 nullpoint")
    table = {}
    for a, b in labels(q2.g):
        s = 0
        for x in itertools.product((0, 1), repeat=q2.g):
            t = F.mul(q2(x), q2(tuple(u + v for u, v in zip(x, a))))
            s = F.sub(s, t) if parity(x, b) else F.add(s, t)
        table[(a, b)] = s
    return ThetaConstants(F, q2.g, table, squares=True)


def duplication_image(g: int) -> dict:
    """Indicator of 2 Z_4 in Z_4^g."""
    return {x: (1 if all(a % 2 == 0 for a in x) else 0)
            for x in itertools.product(range(4), repeat=g)}


def vanishing_profile(th: ThetaConstants):
    """Even labels with vanishing theta constant."""
    return {lab for lab, v in th.table.items() if v == 0 and parity(*lab) == 0}


def odd_labels(g: int):
    return {lab for lab in labels(g) if parity(*lab)}


# --- genus 2 ----------------------------------------------------------------------------------

def theta_index(a, b) -> int:
    """Classical numbering a1 + 2 a2 + 4 b1 + 8 b2 of a genus 2 characteristic."""
    return a[0] + 2 * a[1] + 4 * b[0] + 8 * b[1]


def _by_index(sq: ThetaConstants):
    return {theta_index(a, b): v for (a, b), v in sq.table.items()}


def rosenhain_g2(sq: ThetaConstants):
    """Rosenhain invariants from the squares of the ten even theta constants.

    lambda1 = t0 t2 / (t1 t3), lambda2 = t2 t12 / (t1 t15), lambda3 = t0 t12 / (t3 t15)
    with t_i = theta_i^2 in the classical numbering.
    """
    if sq.g != 2:
        raise ThetaError("Rosenhain reconstruction is for g = 2")
    if not sq.squares:
        sq = sq.squared()
    F = sq.F
    t = _by_index(sq)
    even = [theta_index(a, b) for a, b in labels(2) if parity(a, b) == 0]
    if any(t[k] == 0 for k in even):
        raise ThetaError("decomposable or non-hyperelliptic input: an even theta constant vanishes")
    if any(t[theta_index(a, b)] for a, b in labels(2) if parity(a, b)):
        raise ThetaError("odd theta constants must vanish")

    def q(n1, n2, d1, d2):
        return F.div(F.mul(t[n1], t[n2]), F.mul(t[d1], t[d2]))

    lams = (q(0, 2, 1, 3), q(2, 12, 1, 15), q(0, 12, 3, 15))
    pts = [0, 1, *lams]
    if len(set(pts)) != 5:
        raise ThetaError("Rosenhain points are not distinct: singular model")
    return lams


# Mumford's characteristics eta_1 .. eta_5 for g = 2, as (a, b) bit pairs (eta = (a/2, b/2))
_ETA = {
    1: ((1, 0), (0, 0)),
    2: ((1, 0), (1, 0)),
    3: ((0, 1), (1, 0)),
    4: ((0, 1), (1, 1)),
    5: ((0, 0), (1, 1)),
}


def _eta_of(S):
    a, b = [0, 0], [0, 0]
    for k in S:
        ea, eb = _ETA[k]
        a = [(x + y) % 2 for x, y in zip(a, ea)]
        b = [(x + y) % 2 for x, y in zip(b, eb)]
    return tuple(a), tuple(b)


def thomae_fourth_powers(F: FieldDesc, roots):
    """Fourth powers of the even theta constants of y^2 = prod (x - roots[k]) (five roots).

    Thomae: theta[eta_{S o U}]^4 = c (-1)^{|S n U|} prod_{i<j in S} (a_i - a_j) prod_{i<j not in S} (a_i - a_j)
    for S of size 3 in {1..5}, U = {1, 3, 5}; returned up to the common constant c.
    """
    if len(roots) != 5:
        raise ThetaError("need five finite branch points")
    U = {1, 3, 5}
    out = {}
    for S in itertools.combinations(range(1, 6), 3):
        S = set(S)
        T = set(range(1, 6)) - S
        v = 1
        for X in (S, T):
            for i, j in itertools.combinations(sorted(X), 2):
                v = F.mul(v, F.sub(roots[i - 1], roots[j - 1]))
        if len(S & U) % 2:
            v = F.neg(v)
        out[_eta_of(S ^ U)] = v
    for a, b in labels(2):
        out.setdefault((a, b), 0)
    return ThetaConstants(F, 2, out, squares=False)
