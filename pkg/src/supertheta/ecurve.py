"""Supersingular elliptic curves, explicit endomorphisms, torsion frames and
completely decomposed divisors on E^g.

Points are ``None`` (the origin) or a pair ``(x, y)`` of raw field integers.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .ffield import FieldDesc
from .order import OElem, canonical_involution, oelem_equal, parse_oexpr, standard_relations


class CurveError(ValueError):
    pass


Point = tuple | None


class Curve:
    """y^2 = x^3 + a x + b over F with the endomorphisms it supports."""

    def __init__(self, F: FieldDesc, a: int, b: int):
        self.F, self.a, self.b = F, a, b
        disc = F.add(F.mul(F.from_int(4), F.pow(a, 3)), F.mul(F.from_int(27), F.mul(b, b)))
        if disc == 0:
            raise CurveError("singular Weierstrass model")
        self.p = F.p
        self.over_prime_field = F.frob(a) == a and F.frob(b) == b

    def __repr__(self):
        F = self.F
        return f"Curve(y^2 = x^3 + {F.format(self.a)}x + {F.format(self.b)} over F_{F.q})"

    # basic arithmetic ---------------------------------------------------
    def is_on(self, P) -> bool:
        if P is None:
            return True
        F = self.F
        x, y = P
        rhs = F.add(F.add(F.pow(x, 3), F.mul(self.a, x)), self.b)
        return F.mul(y, y) == rhs

    def neg(self, P):
        return None if P is None else (P[0], self.F.neg(P[1]))

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        F = self.F
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if F.add(y1, y2) == 0:
                return None
            lam = F.div(F.add(F.mul(F.from_int(3), F.mul(x1, x1)), self.a), F.mul(F.from_int(2), y1))
        else:
            lam = F.div(F.sub(y2, y1), F.sub(x2, x1))
        x3 = F.sub(F.sub(F.mul(lam, lam), x1), x2)
        y3 = F.sub(F.mul(lam, F.sub(x1, x3)), y1)
        return (x3, y3)

    def sub(self, P, Q):
        return self.add(P, self.neg(Q))

    def mul(self, n: int, P):
        if n < 0:
            return self.mul(-n, self.neg(P))
        R, A = None, P
        while n:
            if n & 1:
                R = self.add(R, A)
            A = self.add(A, A)
            n >>= 1
        return R

    # enumeration --------------------------------------------------------
    @cached_property
    def points(self):
        F = self.F
        out = [None]
        for x in range(F.q):
            rhs = F.add(F.add(F.pow(x, 3), F.mul(self.a, x)), self.b)
            if rhs == 0:
                out.append((x, 0))
            elif F.is_square(rhs):
                r = F.sqrt(rhs)
                out.append((x, r))
                out.append((x, F.neg(r)))
        return out

    def order(self) -> int:
        return len(self.points)

    def point_order(self, P) -> int:
        n, Q = 1, P
        while Q is not None:
            Q = self.add(Q, P)
            n += 1
        return n

    def random_point(self, rng: random.Random):
        pts = self.points
        return pts[rng.randrange(len(pts))]

    def torsion(self, N: int):
        return [P for P in self.points if self.mul(N, P) is None]

    def two_torsion(self):
        return self.torsion(2)

    # endomorphisms ------------------------------------------------------
    @cached_property
    def sqrt_minus_one(self):
        F = self.F
        m1 = F.neg(1)
        if not F.is_square(m1):
            raise CurveError("field does not contain sqrt(-1)")
        return F.sqrt(m1)

    @cached_property
    def cube_root_of_unity(self):
        F = self.F
        for w in range(2, F.q):
            if F.pow(w, 3) == 1:
                return w
        raise CurveError("field does not contain a primitive cube root of unity")

    def generators(self):
        gens = []
        if self.over_prime_field:
            gens.append("F")
        if self.b == 0 and self.F.is_square(self.F.neg(1)):
            gens.append("i")
        if self.a == 0 and any(self.F.pow(w, 3) == 1 for w in range(2, self.F.q)):
            gens.append("zeta3")
        return gens

    def relations(self):
        return standard_relations(self.p, self.generators())

    def apply_gen(self, g: str, P):
        if P is None:
            return None
        F = self.F
        x, y = P
        if g == "F":
            if not self.over_prime_field:
                raise CurveError("Frobenius endomorphism needs a model over the prime field")
            return (F.frob(x), F.frob(y))
        if g == "i":
            if self.b != 0:
                raise CurveError("i needs a model y^2 = x^3 + a x")
            return (F.neg(x), F.mul(self.sqrt_minus_one, y))
        if g == "zeta3":
            if self.a != 0:
                raise CurveError("zeta3 needs a model y^2 = x^3 + b")
            return (F.mul(self.cube_root_of_unity, x), y)
        raise CurveError(f"unsupported endomorphism symbol {g!r}")

    def gen_formal_scale(self, g: str):
        """Action on the formal parameter t = -x/y: F is t -> t^p, the others scale t."""
        if g == "i":
            return self.sqrt_minus_one
        if g == "zeta3":
            return self.cube_root_of_unity
        if g == "F":
            return None
        raise CurveError(f"unsupported endomorphism symbol {g!r}")

    def apply_word(self, word, P):
        for g in reversed(word):
            P = self.apply_gen(g, P)
        return P

    def endo(self, alpha, P):
        """alpha(P) for an integral element of the order."""
        alpha = parse_oexpr(alpha)
        R = None
        for word, c in alpha.terms.items():
            R = self.add(R, self.mul(_integral(c), self.apply_word(word, P)))
        return R

    def frobenius_check(self, samples: int = 100, seed: int = 0) -> bool:
        """F^2 + p = 0 on sample points."""
        rng = random.Random(seed)
        for _ in range(samples):
            P = self.random_point(rng)
            FF = self.apply_gen("F", self.apply_gen("F", P))
            if self.add(FF, self.mul(self.p, P)) is not None:
                return False
        return True

    # Weil pairing ---------------------------------------------------------
    def _line(self, T1, T2, R):
        """Value at R of the line through T1, T2 divided by the vertical at T1+T2."""
        F = self.F
        xr, yr = R
        if T1 is None or T2 is None:
            return 1
        x1, y1 = T1
        x2, y2 = T2
        if x1 == x2 and F.add(y1, y2) == 0:
            return F.sub(xr, x1)
        if T1 == T2:
            lam = F.div(F.add(F.mul(F.from_int(3), F.mul(x1, x1)), self.a), F.mul(F.from_int(2), y1))
        else:
            lam = F.div(F.sub(y2, y1), F.sub(x2, x1))
        num = F.sub(F.sub(yr, y1), F.mul(lam, F.sub(xr, x1)))
        T3 = self.add(T1, T2)
        den = F.sub(xr, T3[0])
        if num == 0 or den == 0:
            raise ZeroDivisionError
        return F.div(num, den)

    def miller(self, P, R, N: int):
        """f(R) for the function with divisor N(P) - N(O)."""
        F = self.F
        f, T = 1, P
        for bit in bin(N)[3:]:
            f = F.mul(F.mul(f, f), self._line(T, T, R))
            T = self.add(T, T)
            if bit == "1":
                f = F.mul(f, self._line(T, P, R))
                T = self.add(T, P)
        if T is not None:
            raise CurveError("point is not N-torsion")
        if f == 0:
            raise ZeroDivisionError
        return f

    def weil_pairing(self, P, Q, N: int, seed: int = 1):
        if self.mul(N, P) is not None or self.mul(N, Q) is not None:
            raise CurveError("points are not N-torsion")
        if P is None or Q is None or P == Q:
            return 1
        F = self.F
        rng = random.Random(seed)
        for _ in range(200):
            S = self.random_point(rng)
            try:
                num = F.div(self.miller(P, self.add(Q, S), N), self.miller(P, S, N))
                den = F.div(self.miller(Q, self.sub(P, S), N), self.miller(Q, self.neg(S), N))
            except (ZeroDivisionError, TypeError):
                continue
            return F.div(num, den)
        raise CurveError("no auxiliary point found for the Weil pairing")

    def torsion_basis(self, N: int):
        """(P, Q) generating E[N](k), or CurveError if E[N] is not rational."""
        pts = [P for P in self.torsion(N)]
        if len(pts) != N * N:
            raise CurveError(f"E[{N}] is not rational over F_{self.F.q}"
                             + self._extension_hint(N))
        exact = [P for P in pts if P is not None and self.point_order(P) == N]
        P = exact[0]
        for Q in exact:
            z = self.weil_pairing(P, Q, N)
            if _mult_order(self.F, z) == N:
                return P, Q
        raise CurveError("no torsion basis found")

    def _extension_hint(self, N):
        if not self.over_prime_field:
            return ""
        # supersingular with trace zero over F_p: pi^2 = -p
        for k in range(2, 64, 2):
            if (pow(-self.p, k // 2, N) - 1) % N == 0:
                return f"; the smallest extension F_{self.p}^{k} contains it"
        return ""


def _integral(c: Fraction) -> int:
    c = Fraction(c)
    if c.denominator != 1:
        raise CurveError(f"non-integral coefficient {c}: no rational-map realization")
    return int(c)


def _mult_order(F: FieldDesc, z: int) -> int:
    n, w = 1, z
    while w != 1:
        w = F.mul(w, z)
        n += 1
    return n


# --- E^g ----------------------------------------------------------------------

def eg_add(E: Curve, P, Q):
    return tuple(E.add(a, b) for a, b in zip(P, Q))


def eg_neg(E: Curve, P):
    return tuple(E.neg(a) for a in P)


def eg_sub(E: Curve, P, Q):
    return eg_add(E, P, eg_neg(E, Q))


def eg_mul(E: Curve, n: int, P):
    return tuple(E.mul(n, a) for a in P)


def eg_zero(g: int):
    return (None,) * g


def apply_endo_row(E: Curve, row, P):
    R = None
    for alpha, Pj in zip(row, P):
        R = E.add(R, E.endo(alpha, Pj))
    return R


def apply_endo_matrix(E: Curve, Phi, P):
    return tuple(apply_endo_row(E, row, P) for row in Phi)


def eg_weil_pairing(E: Curve, P, Q, N: int):
    F = E.F
    z = 1
    for a, b in zip(P, Q):
        z = F.mul(z, E.weil_pairing(a, b, N))
    return z


# --- completely decomposed divisors ---------------------------------------------

@dataclass(frozen=True)
class CDDivisor:
    """D = sum_c p^{n_c} * {Q : xi_c(Q) = T_c} with xi_c given by rows over the order."""

    rows: tuple
    exps: tuple
    shifts: tuple | None = None

    @classmethod
    def from_config(cls, rows, exps=None):
        rows = tuple(tuple(parse_oexpr(e) for e in r) for r in rows)
        exps = tuple(exps) if exps is not None else (0,) * len(rows)
        return cls(rows, exps, None)

    @property
    def g(self):
        return len(self.rows[0])

    def targets(self):
        return self.shifts if self.shifts is not None else (None,) * len(self.rows)

    def translate(self, E: Curve, P):
        """The divisor D + P (as a set of points)."""
        tg = tuple(E.add(T, apply_endo_row(E, row, P)) for T, row in zip(self.targets(), self.rows))
        return CDDivisor(self.rows, self.exps, tg)

    def multiplicity_at(self, E: Curve, x) -> int:
        return sum(E.p ** n for row, n, T in zip(self.rows, self.exps, self.targets())
                   if apply_endo_row(E, row, x) == T)

    def polarization(self, p: int):
        """Matrix sum_c p^{n_c} xi_c^dagger xi_c over the order."""
        g = self.g
        out = [[OElem() for _ in range(g)] for _ in range(g)]
        for row, n in zip(self.rows, self.exps):
            for j in range(g):
                for k in range(g):
                    out[j][k] = out[j][k] + canonical_involution(row[j]) * row[k] * (p ** n)
        return out

    def induces(self, H, p: int, relations) -> bool:
        P = self.polarization(p)
        return all(oelem_equal(P[j][k], H[j][k], relations)
                   for j in range(self.g) for k in range(self.g))


def divisor_multiplicity_at(E: Curve, D: CDDivisor, x) -> int:
    return D.multiplicity_at(E, x)


def e_star(E: Curve, D: CDDivisor, x) -> int:
    """(-1)^{m(x) - m(0)} as +1/-1."""
    m0 = D.multiplicity_at(E, eg_zero(D.g))
    return -1 if (D.multiplicity_at(E, x) - m0) % 2 else 1


def two_torsion_points(E: Curve, g: int):
    T = E.two_torsion()
    return [tuple(c) for c in itertools.product(T, repeat=g)]


# --- torsion frames ---------------------------------------------------------------

@dataclass
class TorsionFrame:
    N: int
    zeta: int
    xs: list
    ys: list
    xhalf: list
    yhalf: list
    coords_x: list
    coords_y: list

    @property
    def g(self):
        return len(self.xs)

    def two_torsion_basis(self, E: Curve):
        h = self.N // 2
        return [eg_mul(E, h, x) for x in self.xs] + [eg_mul(E, h, y) for y in self.ys]

    def two_torsion_point(self, E: Curve, a, b):
        basis = self.two_torsion_basis(E)
        P = eg_zero(self.g)
        for c, B in zip(list(a) + list(b), basis):
            if c % 2:
                P = eg_add(E, P, B)
        return P


def _dlog(F: FieldDesc, zeta: int, N: int, z: int) -> int:
    w = 1
    for k in range(N):
        if w == z:
            return k
        w = F.mul(w, zeta)
    raise CurveError("pairing value is not a power of the fixed root of unity")


def commutator_matrix(E: Curve, H, basis, N: int, zeta: int):
    """B[j][k] = log_zeta e_N(basis_j, gamma(H) basis_k)."""
    F = E.F
    img = [apply_endo_matrix(E, H, v) for v in basis]
    return [[_dlog(F, zeta, N, eg_weil_pairing(E, u, w, N)) for w in img] for u in basis]


def _symplectic_reduce(B, N):
    n = len(B)
    W = [[1 if i == j else 0 for i in range(n)] for j in range(n)]

    def pair(u, v):
        return sum(u[i] * B[i][j] * v[j] for i in range(n) for j in range(n)) % N

    xs, ys = [], []
    while W:
        found = None
        for a, u in enumerate(W):
            for b, v in enumerate(W):
                if a != b and pair(u, v) % 2:
                    found = (a, b)
                    break
            if found:
                break
        if not found:
            raise CurveError("commutator pairing is degenerate on E^g[N]")
        a, b = found
        u, v = W[a], W[b]
        inv = pow(pair(u, v), -1, N)
        v = [(c * inv) % N for c in v]
        xs.append(u)
        ys.append(v)
        rest = []
        for c, w in enumerate(W):
            if c in (a, b):
                continue
            buv, bwu = pair(w, v), pair(w, u)
            rest.append([(w[i] - buv * u[i] + bwu * v[i]) % N for i in range(n)])
        W = rest
    return xs, ys


def torsion_frame(E: Curve, H, N: int = 4) -> TorsionFrame:
    """Symplectic frame of E^g[N] for [x, y] = e_N(x, gamma(H) y), with halving points in E^g[2N]."""
    H = [[parse_oexpr(e) for e in row] for row in H]
    g = len(H)
    P2, Q2 = E.torsion_basis(2 * N)
    P, Q = E.mul(2, P2), E.mul(2, Q2)
    zeta = E.weil_pairing(P, Q, N)

    def unit(j, pt):
        return tuple(pt if k == j else None for k in range(g))

    basis = [unit(j, pt) for j in range(g) for pt in (P, Q)]
    basis2 = [unit(j, pt) for j in range(g) for pt in (P2, Q2)]
    B = commutator_matrix(E, H, basis, N, zeta)
    xs_c, ys_c = _symplectic_reduce(B, N)

    def combo(coeffs, bs):
        out = eg_zero(g)
        for c, v in zip(coeffs, bs):
            out = eg_add(E, out, eg_mul(E, c, v))
        return out

    return TorsionFrame(
        N=N, zeta=zeta,
        xs=[combo(c, basis) for c in xs_c], ys=[combo(c, basis) for c in ys_c],
        xhalf=[combo(c, basis2) for c in xs_c], yhalf=[combo(c, basis2) for c in ys_c],
        coords_x=xs_c, coords_y=ys_c,
    )


def frame_commutator(E: Curve, H, frame: TorsionFrame):
    H = [[parse_oexpr(e) for e in row] for row in H]
    return commutator_matrix(E, H, frame.xs + frame.ys, frame.N, frame.zeta)


def quadratic_form_matrix(E: Curve, D: CDDivisor, frame: TorsionFrame):
    """Upper triangular F_2 matrix X with e_*(v) = (-1)^{v^t X v} in the frame's 2-torsion basis."""
    g = D.g
    basis = frame.two_torsion_basis(E)
    n = 2 * g

    def q(vec):
        P = eg_zero(g)
        for c, Bv in zip(vec, basis):
            if c:
                P = eg_add(E, P, Bv)
        return 0 if e_star(E, D, P) == 1 else 1

    X = [[0] * n for _ in range(n)]
    unit = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    for i in range(n):
        X[i][i] = q(unit[i])
        for j in range(i + 1, n):
            v = [a + b for a, b in zip(unit[i], unit[j])]
            X[i][j] = (q(v) - q(unit[i]) - q(unit[j])) % 2
    return X


def normal_form_matrix(g: int):
    n = 2 * g
    return [[1 if (j == i + g and i < g) else 0 for j in range(n)] for i in range(n)]


def normalizing_point(E: Curve, D: CDDivisor, frame: TorsionFrame):
    """The unique P in E^g[2] with e_* of t_P^{-1}(D) in normal form."""
    target = normal_form_matrix(D.g)
    good = [P for P in two_torsion_points(E, D.g)
            if quadratic_form_matrix(E, D.translate(E, eg_neg(E, P)), frame) == target]
    if len(good) != 1:
        raise CurveError(f"expected a unique normalizing point, found {len(good)}")
    return good[0]


def rational_equiv_translate(E: Curve, D1: CDDivisor, D2: CDDivisor, H, oracle):
    """A 2-torsion P with t_P(D1) ~ D2, certified by oracle(D1 + P, D2) returning a witness."""
    rels = E.relations()
    if not (D1.induces(H, E.p, rels) and D2.induces(H, E.p, rels)):
        raise CurveError("divisors do not induce the same polarization")
    for P in two_torsion_points(E, D1.g):
        witness = oracle(D1.translate(E, P), D2)
        if witness is not None:
            return P, witness
    raise CurveError("no 2-torsion translate is rationally equivalent")
