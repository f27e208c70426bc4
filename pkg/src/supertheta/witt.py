"""Truncated p-typical Witt vectors, Artin-Hasse exponential, duality pairing.

Coordinates may live in any commutative ring whose elements support ``+``,
``*`` and multiplication by Python ints (FieldElement, NilElement).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import ZZ
from sympy.polys.rings import ring

from .ffield import FieldElement, FieldError, NilElement, NilRing, frac_mod


class WittError(ValueError):
    pass


@dataclass(frozen=True)
class WittPolyTable:
    """Integer Witt sum or product polynomials for fixed (p, n).

    Each polynomial is stored as a tuple of (coefficient mod p, exponent tuple)
    over the variables X_0..X_{n-1}, Y_0..Y_{n-1}.
    """

    p: int
    n: int
    kind: str
    polys: tuple


def _ghost(p, Z, i):
    return sum(p ** j * Z[j] ** (p ** (i - j)) for j in range(i + 1))


@lru_cache(maxsize=None)
def witt_poly_table(p: int, n: int, kind: str = "add") -> WittPolyTable:
    """Ghost-solve the Witt polynomials over the integers, then reduce mod p."""
    names = [f"X{i}" for i in range(n)] + [f"Y{i}" for i in range(n)]
    R, *gens = ring(names, ZZ)
    X, Y = gens[:n], gens[n:]
    out = []
    for i in range(n):
        if kind == "add":
            w = _ghost(p, X, i) + _ghost(p, Y, i)
        else:
            w = _ghost(p, X, i) * _ghost(p, Y, i)
        for j in range(i):
            w -= p ** j * out[j] ** (p ** (i - j))
        out.append(w.exquo(R(p ** i)))

    def freeze(poly):
        return tuple((int(c) % p, tuple(e)) for e, c in poly.terms() if int(c) % p)

    return WittPolyTable(p, n, kind, tuple(freeze(q) for q in out))


def _eval_poly(terms, values, one):
    """Evaluate sum c * prod values^e with small integer c."""
    powcache = {}
    total = None
    for c, exps in terms:
        mon = None
        for idx, e in enumerate(exps):
            if not e:
                continue
            key = (idx, e)
            pw = powcache.get(key)
            if pw is None:
                pw = values[idx] ** e
                powcache[key] = pw
            mon = pw if mon is None else mon * pw
        if mon is None:
            mon = one
        term = mon * c
        total = term if total is None else total + term
    return one * 0 if total is None else total


def _eval_poly_field(terms, values, field):
    """Fast path for coordinates in a FieldDesc (raw int encodings)."""
    add, mul, fpow = field.add, field.mul, field.pow
    powcache = {}
    total = 0
    for c, exps in terms:
        mon = field.from_int(c)
        for idx, e in enumerate(exps):
            if e:
                key = (idx, e)
                pw = powcache.get(key)
                if pw is None:
                    pw = fpow(values[idx], e)
                    powcache[key] = pw
                mon = mul(mon, pw)
                if not mon:
                    break
        if mon:
            total = add(total, mon)
    return total


class WittVector:
    """Element of W_n(A) for a commutative coefficient ring A."""

    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords):
        self.p = p
        self.coords = tuple(coords)

    @property
    def length(self):
        return len(self.coords)

    def _ring_of(self):
        c = self.coords[0]
        return c.field if isinstance(c, FieldElement) else c.ring

    def _check(self, other):
        if not isinstance(other, WittVector):
            raise WittError("expected a WittVector")
        if other.p != self.p or other.length != self.length:
            raise WittError("length/prime mismatch between Witt vectors")
        if self.length and self._ring_of() != other._ring_of():
            raise WittError("coefficient ring mismatch between Witt vectors")

    def _combine(self, other, which):
        self._check(other)
        n = self.length
        if n == 0:
            return self
        polys = witt_poly_table(self.p, n, which).polys
        values = self.coords + other.coords
        if isinstance(values[0], FieldElement):
            f = values[0].field
            raw = [v.v for v in values]
            return WittVector(self.p, [FieldElement(f, _eval_poly_field(t, raw, f)) for t in polys])
        one = values[0] * 0 + 1
        return WittVector(self.p, [_eval_poly(t, values, one) for t in polys])

    def __add__(self, other):
        return self._combine(other, "add")

    def __mul__(self, other):
        return self._combine(other, "mul")

    def __neg__(self):
        # for odd p, -(a_0, a_1, ...) = (-a_0, -a_1, ...)
        return WittVector(self.p, [-c for c in self.coords])

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, WittVector) and self.p == other.p and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __repr__(self):
        return "W(" + ", ".join(repr(c) for c in self.coords) + ")"


def witt_zero(p, n, like):
    return WittVector(p, [like * 0] * n)


def witt_one(p, n, like):
    z = like * 0
    return WittVector(p, [z + 1] + [z] * (n - 1))


def witt_from_int(p, n, k: int, like):
    """The image of the integer k in W_n(A)."""
    one = witt_one(p, n, like)
    acc = witt_zero(p, n, like)
    if k < 0:
        return -witt_from_int(p, n, -k, like)
    base = one
    while k:
        if k & 1:
            acc = acc + base
        base = base + base
        k >>= 1
    return acc


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    return a + b


def witt_mul(a: WittVector, b: WittVector) -> WittVector:
    return a * b


def frobenius(a: WittVector) -> WittVector:
    return WittVector(a.p, [c ** a.p for c in a.coords])


def shift_t(a: WittVector) -> WittVector:
    """Verschiebung on W_n: (x_0, ..., x_{n-1}) -> (0, x_0, ..., x_{n-2})."""
    if a.length == 0:
        return a
    zero = a.coords[0] * 0
    return WittVector(a.p, (zero,) + a.coords[:-1])


def teichmuller(p, n, c):
    return WittVector(p, [c] + [c * 0] * (n - 1))


# --- Artin-Hasse ------------------------------------------------------------

@dataclass(frozen=True)
class AHSeries:
    p: int
    N: int
    rational: tuple  # exact Fractions with p-free denominators
    coeffs: tuple    # reductions mod p, as ints in [0, p)


@lru_cache(maxsize=None)
def ah_series(p: int, N: int) -> AHSeries:
    """Coefficients of exp(-sum_i t^{p^i}/p^i) up to degree N."""
    if N < 1:
        raise WittError("truncation degree must be >= 1")
    # log part L(t) = -sum t^{p^i}/p^i; exp via c'(t) = L'(t) c(t)
    dL = [Fraction(0)] * (N + 1)  # coefficients of L'(t)
    e = 1
    while e <= N:
        dL[e - 1] = Fraction(-1)  # d/dt (t^e / e) = t^{e-1}
        e *= p
    c = [Fraction(0)] * (N + 1)
    c[0] = Fraction(1)
    for k in range(1, N + 1):
        s = sum(dL[j] * c[k - 1 - j] for j in range(k))
        c[k] = s / k
    red = []
    for r in c:
        if r.denominator % p == 0:
            raise WittError("Artin-Hasse coefficient with p in denominator")
        red.append(r.numerator * pow(r.denominator, -1, p) % p)
    return AHSeries(p, N, tuple(c), tuple(red))


def _nil_bound(z: NilElement) -> int:
    """An e with z^e = 0 (z without constant term)."""
    return z.ring.nil_index


def nil_order(z: NilElement) -> int:
    """Smallest p-power q with z^q = 0.

    In characteristic p, (sum c_i m_i)^q = sum c_i^q m_i^q for q a power of p, and
    distinct monomials stay distinct, so it suffices to look at each monomial.
    """
    p = z.ring.base.p
    exps = z.ring.exponents
    q = 1
    for mon in z.terms:
        if not any(mon):
            raise WittError("element is not nilpotent")
        while all(a * q < e for a, e in zip(mon, exps) if a) :
            q *= p
    return q


def ah_exp(z: NilElement, p: int) -> NilElement:
    """exp_AH(z) for nilpotent z in a NilRing (finite sum)."""
    if z.constant() != 0:
        raise WittError("Artin-Hasse exponential needs nilpotent input")
    ring = z.ring
    if z.is_zero():
        return ring.one()
    N = _nil_bound(z)
    series = ah_series(p, max(N, 1))
    acc = ring.one()
    power = ring.one()
    for k in range(1, N + 1):
        power = power * z
        if power.is_zero():
            break
        ck = series.coeffs[k]
        if ck:
            acc = acc + power * ck
    return acc


def ah_exp_eval(a: WittVector) -> NilElement:
    """E_AH(a_0, a_1, ...) = prod_i exp_AH(a_i)."""
    if a.length == 0:
        raise WittError("empty Witt vector")
    ring = a.coords[0].ring
    acc = ring.one()
    for c in a.coords:
        if not isinstance(c, NilElement) or c.constant() != 0:
            raise WittError("E_AH requires nilpotent coordinates")
        acc = acc * ah_exp(c, a.p)
    return acc


def sigma_pad(a: WittVector, length: int) -> WittVector:
    """sigma_n: W_n -> W, realised as zero padding to a finite length."""
    if length < a.length:
        raise WittError("cannot pad to a shorter length")
    zero = a.coords[0] * 0
    return WittVector(a.p, a.coords + (zero,) * (length - a.length))


def _weight_bound(v: WittVector) -> int:
    """Upper bound on the weighted degree of monomials in the coordinates of v."""
    total = 0
    for j, c in enumerate(v.coords):
        if c.is_zero():
            continue
        total += (nil_order(c) - 1) * v.p ** j
    return total


def pairing_length(x: WittVector, y: WittVector) -> int:
    """Witt length after which all product coordinates of the padded vectors vanish."""
    p = x.p
    bound = min(_weight_bound(x), _weight_bound(y))
    L = max(x.length, y.length)
    while p ** L <= bound:
        L += 1
    return L


def _check_killed(v: WittVector, power: int, label: str):
    for c in v.coords:
        if not isinstance(c, NilElement):
            raise WittError(f"{label}: coordinates must lie in a NilRing")
        if c.constant() != 0 or not (c ** power).is_zero():
            raise WittError(f"{label}: coordinate not killed by the p^m-th power")


def ah_pairing(x: WittVector, y: WittVector, m: int, n: int) -> NilElement:
    """<x, y> = E_AH(sigma_n(x) *_W sigma_m(y)) for x in W_{m,n}(R), y in W_{n,m}(R)."""
    p = x.p
    if x.length != n or y.length != m:
        raise WittError("x must have length n and y length m")
    _check_killed(x, p ** m, "x")
    _check_killed(y, p ** n, "y")
    L = pairing_length(x, y)
    prod = sigma_pad(x, L) * sigma_pad(y, L)
    return ah_exp_eval(prod)


def universal_points(p: int, m: int, n: int, base, names=("x", "y")):
    """The universal pair over the Hopf ring of W_{m,n} x W_{n,m}.

    Returns (ring, x, y) with x in W_{m,n}(ring) and y in W_{n,m}(ring).
    """
    xs = [f"{names[0]}{i}" for i in range(n)]
    ys = [f"{names[1]}{i}" for i in range(m)]
    R = NilRing(base, xs + ys, [p ** m] * n + [p ** n] * m)
    gens = R.gens()
    return R, WittVector(p, gens[:n]), WittVector(p, gens[n:])


def first_order_matrix(p: int, m: int, n: int, base):
    """Coefficients of x_i y_j in <x, y> on universal points; an n x m matrix."""
    R, x, y = universal_points(p, m, n, base)
    val = ah_pairing(x, y, m, n)
    mat = []
    for i in range(n):
        row = []
        for j in range(m):
            e = [0] * (n + m)
            e[i] += 1
            e[n + j] += 1
            row.append(val.coefficient(e))
        mat.append(row)
    return mat


__all__ = [
    "WittError", "WittPolyTable", "witt_poly_table", "WittVector", "witt_add", "witt_mul",
    "witt_zero", "witt_one", "witt_from_int", "frobenius", "shift_t", "teichmuller",
    "AHSeries", "ah_series", "ah_exp", "ah_exp_eval", "ah_pairing", "sigma_pad",
    "universal_points", "first_order_matrix", "frac_mod", "FieldError",
]
