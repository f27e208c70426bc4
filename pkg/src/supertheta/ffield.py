"""Finite fields F_{p^k} and truncated nilpotent rings k[x_j]/(x_j^{e_j}).

Field elements are encoded internally as integers v = sum c_i p^i (little-endian
coordinates in the power basis).  Multiplication and addition go through
log / Zech tables built once per field, which keeps the hot loops in the
function-field code cheap.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime


class FieldError(ValueError):
    pass


# --- polynomials over F_p as little-endian int lists -----------------------

def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a, b, m, p):
    """(a*b) mod m over F_p; m monic."""
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _pmod(res, m, p)


def _pmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _ptrim([x % p for x in a[:dm]])


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        inv = pow(b[-1], p - 2, p)
        bm = [(x * inv) % p for x in b]
        a, b = b, _pmod(a, bm, p)
    return a


def _ppowmod(base, e, m, p):
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return result


def is_irreducible(modulus, p):
    """Rabin's test for a monic polynomial over F_p (little-endian coefficients)."""
    m = [c % p for c in modulus]
    k = len(m) - 1
    if k < 1 or m[-1] != 1:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, p ** k, m, p) != _pmod(x, m, p):
        return False
    for r in factorint(k):
        h = _ppowmod(x, p ** (k // r), m, p)
        diff = _ptrim([((h[i] if i < len(h) else 0) - (x[i] if i < len(x) else 0)) % p
                       for i in range(max(len(h), 2))])
        if len(_pgcd(m, diff, p)) > 1:
            return False
    return True


def _is_primitive_poly(modulus, p):
    k = len(modulus) - 1
    order = p ** k - 1
    x = [0, 1]
    for r in factorint(order):
        if _ppowmod(x, order // r, modulus, p) == [1]:
            return False
    return True


def default_modulus(p, k):
    """First primitive irreducible monic polynomial in a fixed enumeration order."""
    if k == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=k):
        m = list(tail) + [1]
        if m[0] == 0:
            continue
        if is_irreducible(m, p) and _is_primitive_poly(m, p):
            return tuple(m)
    raise FieldError("no primitive polynomial found")  # unreachable


class FieldDesc:
    """The field F_p[x]/(modulus) with precomputed log/Zech tables."""

    def __init__(self, p: int, k: int = 1, modulus=None, root_name: str = "beta"):
        if p == 2:
            raise FieldError("characteristic 2 is not supported")
        if not isprime(p):
            raise FieldError(f"{p} is not prime")
        if modulus is None:
            modulus = default_modulus(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree k")
        if not is_irreducible(list(modulus), p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p, self.k, self.modulus = p, k, modulus
        self.q = p ** k
        self.root_name = root_name
        self._build_tables()

    # table construction -------------------------------------------------
    def _mul_by_x(self, v):
        p, k = self.p, self.k
        c = self._coords(v)
        top = c[-1]
        shifted = [0] + c[:-1]
        return self._encode([(shifted[i] - top * self.modulus[i]) % p for i in range(k)])

    def _coords(self, v):
        p = self.p
        out = []
        for _ in range(self.k):
            v, r = divmod(v, p)
            out.append(r)
        return out

    def _encode(self, coords):
        v = 0
        for c in reversed(coords):
            v = v * self.p + c
        return v

    def _slow_mul(self, a, b):
        # shift-and-add in the power basis
        acc = [0] * self.k
        bc = self._coords(b)
        cur = a
        for i in range(self.k):
            if bc[i]:
                cc = self._coords(cur)
                acc = [(acc[j] + bc[i] * cc[j]) % self.p for j in range(self.k)]
            cur = self._mul_by_x(cur)
        return self._encode(acc)

    def _build_tables(self):
        q, p = self.q, self.p
        order = q - 1
        primes = list(factorint(order)) if order > 1 else []
        gen = None
        for cand in range(1, q):
            if order == 1:
                gen = cand
                break
            ok = True
            for r in primes:
                if self._slow_pow(cand, order // r) == 1:
                    ok = False
                    break
            if ok:
                gen = cand
                break
        self.gen = gen
        exp = [0] * order
        log = [-1] * q
        cur = 1
        for i in range(order):
            exp[i] = cur
            log[cur] = i
            cur = self._slow_mul(cur, gen)
        self.exp, self.log = exp, log
        # negation and "plus one" via digit arithmetic
        neg = [0] * q
        plus1 = [0] * q
        for v in range(q):
            c = self._coords(v)
            neg[v] = self._encode([(-x) % p for x in c])
            c[0] = (c[0] + 1) % p
            plus1[v] = self._encode(c)
        self.neg_table = neg
        zech = [-1] * order
        for i in range(order):
            s = plus1[exp[i]]
            zech[i] = log[s]
        self.zech = zech
        self.one = 1
        self.zero = 0
        self.minus_one = neg[1]

    def _slow_pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            e >>= 1
        return r

    # raw integer-encoded arithmetic ------------------------------------
    def add(self, a, b):
        if a == 0:
            return b
        if b == 0:
            return a
        log = self.log
        la = log[a]
        order = self.q - 1
        z = self.zech[(log[b] - la) % order]
        if z < 0:
            return 0
        return self.exp[(la + z) % order]

    def sub(self, a, b):
        return self.add(a, self.neg_table[b])

    def neg(self, a):
        return self.neg_table[a]

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        return self.exp[(-self.log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        return self.exp[(self.log[a] * e) % (self.q - 1)]

    def from_int(self, n):
        n %= self.p
        return n  # prime-field elements are encoded by themselves

    def frob(self, a, times=1):
        return self.pow(a, self.p ** times)

    def is_square(self, a):
        return a == 0 or self.log[a] % 2 == 0

    def sqrt(self, a):
        """Square root with the lexicographically smaller coordinate tuple."""
        if a == 0:
            return 0
        la = self.log[a]
        if la % 2:
            raise FieldError("no square root: element is a non-residue")
        r = self.exp[la // 2]
        s = self.neg_table[r]
        return min(r, s, key=lambda v: tuple(self._coords(v)))

    def elements(self):
        return range(self.q)

    def elem(self, v) -> "FieldElement":
        if isinstance(v, FieldElement):
            return v
        if isinstance(v, (list, tuple)):
            v = self._encode([int(c) % self.p for c in v] + [0] * (self.k - len(v)))
            return FieldElement(self, v)
        return FieldElement(self, self.from_int(int(v)))

    def root(self) -> "FieldElement":
        """The class of x in F_p[x]/(modulus) (the named generator, e.g. beta)."""
        return FieldElement(self, 0 if self.k == 1 else self.p)

    def coords(self, v):
        return tuple(self._coords(v))

    def format(self, v):
        if self.k == 1:
            return str(v)
        return "[" + ",".join(str(c) for c in self._coords(v)) + "]"

    def to_json(self):
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def __eq__(self, other):
        return isinstance(other, FieldDesc) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FieldDesc(p={self.p}, k={self.k}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def make_field(p: int, k: int = 1, modulus=None) -> FieldDesc:
    """Cached field constructor; ``modulus`` is a little-endian coefficient tuple."""
    return FieldDesc(p, k, None if modulus is None else tuple(modulus))


def embed_map(small: FieldDesc, big: FieldDesc):
    """Return a table mapping encodings of ``small`` into ``big``.

    The image of the generator x is the root of the small modulus in ``big``
    with the smallest encoding, so the choice is deterministic.
    """
    if small.p != big.p or big.k % small.k:
        raise FieldError("no embedding between these fields")
    m = small.modulus
    roots = []
    for v in big.elements():
        acc = 0
        for c in reversed(m):
            acc = big.add(big.mul(acc, v), c % small.p)
        if acc == 0:
            roots.append(v)
    r = min(roots)
    table = []
    for v in small.elements():
        coords = small.coords(v)
        acc = 0
        for c in reversed(coords):
            acc = big.add(big.mul(acc, r), c)
        table.append(acc)
    return table


class FieldElement:
    """Immutable element of a FieldDesc with operator overloading."""

    __slots__ = ("field", "v")

    def __init__(self, field: FieldDesc, v: int):
        self.field = field
        self.v = v

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            return other.v
        if isinstance(other, int):
            return self.field.from_int(other)
        if isinstance(other, Fraction):
            return self.field.div(self.field.from_int(other.numerator),
                                  self.field.from_int(other.denominator))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.add(self.v, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(self.v, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.sub(o, self.v))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.v))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.mul(self.v, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field.div(self.v, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, self.field.div(o, self.v))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.v, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.v == other.v
        if isinstance(other, int):
            return self.v == self.field.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def is_zero(self):
        return self.v == 0

    def is_unit(self):
        return self.v != 0

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.v))

    def frobenius(self):
        return FieldElement(self.field, self.field.frob(self.v))

    @property
    def coords(self):
        return self.field.coords(self.v)

    def __repr__(self):
        return self.field.format(self.v)


def sqrt_in_field(a: FieldElement) -> FieldElement:
    return FieldElement(a.field, a.field.sqrt(a.v))


# --- nilpotent quotient rings ---------------------------------------------

@lru_cache(maxsize=None)
def _half_binomials(p, count):
    """binom(1/2, j) reduced mod p for j < count (p-integral rationals)."""
    out = []
    c = Fraction(1)
    for j in range(count):
        out.append(c)
        c = c * (Fraction(1, 2) - j) / (j + 1)
    return out


def frac_mod(field: FieldDesc, r: Fraction) -> int:
    if r.denominator % field.p == 0:
        raise FieldError(f"denominator of {r} divisible by p={field.p}")
    return field.div(field.from_int(r.numerator), field.from_int(r.denominator))


class NilRing:
    """k[x_1..x_r]/(x_j^{e_j}) with sparse monomial -> coefficient storage."""

    def __init__(self, base: FieldDesc, names, exponents):
        names = tuple(names)
        exponents = tuple(int(e) for e in exponents)
        if len(names) != len(exponents):
            raise ValueError("one nilpotency exponent per generator")
        if any(e < 1 for e in exponents):
            raise ValueError("nilpotency exponents must be >= 1")
        self.base, self.names, self.exponents = base, names, exponents
        self.nvars = len(names)
        # bound on the nilpotency index of the maximal ideal
        self.nil_index = sum(e - 1 for e in exponents) + 1
        self._zero_exp = (0,) * self.nvars

    def __eq__(self, other):
        return isinstance(other, NilRing) and (self.base, self.names, self.exponents) == (
            other.base, other.names, other.exponents)

    def __hash__(self):
        return hash((self.base, self.names, self.exponents))

    def __repr__(self):
        rel = ", ".join(f"{n}^{e}" for n, e in zip(self.names, self.exponents))
        return f"NilRing(F_{self.base.q}[{', '.join(self.names)}]/({rel}))"

    def make(self, terms) -> "NilElement":
        return NilElement(self, {e: c for e, c in terms.items() if c})

    def zero(self):
        return NilElement(self, {})

    def one(self):
        return NilElement(self, {self._zero_exp: 1})

    def scalar(self, c):
        if isinstance(c, FieldElement):
            c = c.v
        elif isinstance(c, int):
            c = self.base.from_int(c)
        return NilElement(self, {self._zero_exp: c} if c else {})

    def gen(self, j) -> "NilElement":
        if isinstance(j, str):
            j = self.names.index(j)
        e = [0] * self.nvars
        e[j] = 1
        if self.exponents[j] == 1:
            return self.zero()
        return NilElement(self, {tuple(e): 1})

    def gens(self):
        return [self.gen(j) for j in range(self.nvars)]

    def monomials(self):
        return list(itertools.product(*[range(e) for e in self.exponents]))


class NilElement:
    """Element of a NilRing; immutable, canonical (no zero coefficients)."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: NilRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def _lift(self, other):
        if isinstance(other, NilElement):
            return other
        if isinstance(other, (int, FieldElement)):
            return self.ring.scalar(other)
        if isinstance(other, Fraction):
            return self.ring.scalar(frac_mod(self.ring.base, other))
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.ring.base
        out = dict(self.terms)
        for e, c in o.terms.items():
            s = f.add(out.get(e, 0), c)
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return NilElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.base
        return NilElement(self.ring, {e: f.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        f = self.ring.base
        ex = self.ring.exponents
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if any(a >= m for a, m in zip(e, ex)):
                    continue
                s = f.add(out.get(e, 0), f.mul(c1, c2))
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return NilElement(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        o = self._lift(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def constant(self) -> int:
        return self.terms.get(self.ring._zero_exp, 0)

    def is_unit(self):
        return self.constant() != 0

    def is_nilpotent(self):
        return self.constant() == 0

    def inverse(self):
        c = self.constant()
        if not c:
            raise ZeroDivisionError("element with zero constant term is not a unit")
        f = self.ring.base
        cinv = f.inv(c)
        nu = self * FieldElement(f, cinv) - 1  # nilpotent
        acc = self.ring.one()
        term = self.ring.one()
        for _ in range(self.ring.nil_index):
            term = term * (-nu)
            if term.is_zero():
                break
            acc = acc + term
        return acc * FieldElement(f, cinv)

    def coefficient(self, exps) -> FieldElement:
        return FieldElement(self.ring.base, self.terms.get(tuple(exps), 0))

    def truncate_nilpotent(self):
        return self.constant()

    def __repr__(self):
        if not self.terms:
            return "0"
        f = self.ring.base
        parts = []
        for e in sorted(self.terms):
            mon = "*".join(f"{n}^{a}" if a > 1 else n
                           for n, a in zip(self.ring.names, e) if a)
            c = f.format(self.terms[e])
            parts.append(c if not mon else f"{c}*{mon}")
        return " + ".join(parts)


def nilring_unit_sqrt(u: NilElement) -> NilElement:
    """Square root of c(1+nu) whose constant term is sqrt_in_field(c)."""
    ring = u.ring
    f = ring.base
    c = u.constant()
    if c == 0:
        raise FieldError("constant term is zero: not a unit")
    r0 = f.sqrt(c)  # raises on non-residues
    nu = u * FieldElement(f, f.inv(c)) - 1
    coeffs = _half_binomials(f.p, ring.nil_index + 1)
    acc = ring.one()
    power = ring.one()
    for j in range(1, ring.nil_index + 1):
        power = power * nu
        if power.is_zero():
            break
        acc = acc + power * frac_mod(f, coeffs[j])
    return acc * FieldElement(f, r0)
