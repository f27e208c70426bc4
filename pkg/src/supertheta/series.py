"""Truncated Laurent series over a finite field and formal-group expansions.

Laurent series keep an absolute precision: a value is known modulo s^prec.
``prec=None`` marks an exact Laurent polynomial.
"""
from __future__ import annotations

from functools import lru_cache

from .ffield import FieldDesc, FieldElement, NilElement, NilRing


class PrecisionError(ArithmeticError):
    pass


DEFAULT_REL_PREC = 24


class Laurent:
    __slots__ = ("F", "val", "coeffs", "prec")

    def __init__(self, F: FieldDesc, val: int, coeffs, prec=None):
        coeffs = list(coeffs)
        if prec is not None:
            coeffs = coeffs[: max(0, prec - val)]
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        coeffs = coeffs[k:]
        val += k
        if prec is None:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        self.F, self.coeffs, self.prec = F, coeffs, prec
        self.val = val if coeffs else (prec if prec is not None else 0)

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, F, c):
        return cls(F, 0, [c])

    @classmethod
    def monomial(cls, F, c, e):
        return cls(F, e, [c])

    def is_zero(self):
        return not self.coeffs

    def is_exact(self):
        return self.prec is None

    def coeff(self, e):
        if self.prec is not None and e >= self.prec:
            raise PrecisionError(f"coefficient s^{e} not known (precision {self.prec})")
        i = e - self.val
        if i < 0 or i >= len(self.coeffs):
            return 0
        return self.coeffs[i]

    def _lift(self, other):
        if isinstance(other, Laurent):
            return other
        if isinstance(other, int):
            return Laurent.const(self.F, self.F.from_int(other))
        if isinstance(other, FieldElement):
            return Laurent.const(self.F, other.v)
        raise TypeError(f"cannot combine Laurent series with {type(other)}")

    def __add__(self, other):
        o = self._lift(other)
        F = self.F
        precs = [p for p in (self.prec, o.prec) if p is not None]
        prec = min(precs) if precs else None
        if self.is_zero() and o.is_zero():
            return Laurent(F, 0, [], prec)
        lo = min(x.val for x in (self, o) if not x.is_zero())
        hi = max(x.val + len(x.coeffs) for x in (self, o) if not x.is_zero())
        if prec is not None:
            hi = min(hi, prec)
        out = []
        for e in range(lo, hi):
            a = self.coeffs[e - self.val] if 0 <= e - self.val < len(self.coeffs) else 0
            b = o.coeffs[e - o.val] if 0 <= e - o.val < len(o.coeffs) else 0
            out.append(F.add(a, b))
        return Laurent(F, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.F, self.val, [self.F.neg(c) for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c):
        F = self.F
        if c == 0:
            return Laurent(F, 0, [], None if self.prec is None else self.prec)
        return Laurent(F, self.val, [F.mul(c, x) for x in self.coeffs], self.prec)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(self.F.from_int(other))
        if isinstance(other, FieldElement):
            return self.scale(other.v)
        o = self._lift(other)
        F = self.F
        if self.is_zero() or o.is_zero():
            cand = []
            if self.is_zero() and self.prec is not None:
                cand.append(self.prec + (o.val if not o.is_zero() else (o.prec or 0)))
            if o.is_zero() and o.prec is not None:
                cand.append(o.prec + (self.val if not self.is_zero() else (self.prec or 0)))
            return Laurent(F, 0, [], min(cand) if cand else None)
        v = self.val + o.val
        rels = []
        if self.prec is not None:
            rels.append(self.prec - self.val)
        if o.prec is not None:
            rels.append(o.prec - o.val)
        rel = min(rels) if rels else None
        n = len(self.coeffs) + len(o.coeffs) - 1
        if rel is not None:
            n = min(n, rel)
        out = [0] * n
        a, b = self.coeffs, o.coeffs
        mul, add = F.mul, F.add
        for i, ai in enumerate(a):
            if not ai or i >= n:
                continue
            for j in range(min(len(b), n - i)):
                bj = b[j]
                if bj:
                    out[i + j] = add(out[i + j], mul(ai, bj))
        return Laurent(F, v, out, None if rel is None else v + rel)

    __rmul__ = __mul__

    def inverse(self, rel_prec=None):
        if self.is_zero():
            raise PrecisionError("inverse of a series that vanishes to known precision")
        F = self.F
        rel = self.prec - self.val if self.prec is not None else (rel_prec or DEFAULT_REL_PREC)
        if self.prec is None and len(self.coeffs) == 1:
            return Laurent(F, -self.val, [F.inv(self.coeffs[0])])
        a = self.coeffs
        inv0 = F.inv(a[0])
        out = [inv0]
        for k in range(1, rel):
            s = 0
            for j in range(1, min(k, len(a) - 1) + 1):
                if a[j]:
                    s = F.add(s, F.mul(a[j], out[k - j]))
            out.append(F.neg(F.mul(s, inv0)))
        return Laurent(F, -self.val, out, -self.val + rel)

    def __truediv__(self, other):
        o = self._lift(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = Laurent.const(self.F, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def truncate(self, prec):
        p = prec if self.prec is None else min(prec, self.prec)
        return Laurent(self.F, self.val, self.coeffs, p)

    def pth_root(self):
        """The unique series r with r^p = self (coefficients outside p-multiples must vanish)."""
        F, p = self.F, self.F.p
        if self.is_zero():
            return Laurent(F, 0, [], None if self.prec is None else -(-self.prec // p))
        if self.val % p:
            raise ValueError("not a p-th power (valuation)")
        out = []
        lim = self.val + len(self.coeffs)
        for e in range(self.val, lim):
            c = self.coeffs[e - self.val]
            if e % p:
                if c:
                    raise ValueError("not a p-th power")
                continue
            out.append(F.frob(c, F.k - 1) if F.k > 1 else c)
        prec = None if self.prec is None else -(-self.prec // p)
        return Laurent(F, self.val // p, out, prec)

    def __repr__(self):
        terms = [f"{self.F.format(c)}*s^{self.val + i}" for i, c in enumerate(self.coeffs) if c]
        tail = f" + O(s^{self.prec})" if self.prec is not None else ""
        return (" + ".join(terms) or "0") + tail


# --- formal group of y^2 = x^3 + a x + b --------------------------------------

@lru_cache(maxsize=None)
def w_series(F: FieldDesc, a: int, b: int, deg: int):
    """Coefficients of w(t) = t^3 + a t w^2 + b w^3 up to t^{deg}."""
    w = [0] * (deg + 1)
    if deg >= 3:
        w[3] = 1

    def mul(u, v):
        out = [0] * (deg + 1)
        for i, ui in enumerate(u):
            if ui:
                for j in range(0, deg + 1 - i):
                    if v[j]:
                        out[i + j] = F.add(out[i + j], F.mul(ui, v[j]))
        return out

    for _ in range(deg):
        w2 = mul(w, w)
        w3 = mul(w2, w)
        new = [0] * (deg + 1)
        if deg >= 3:
            new[3] = 1
        for k in range(deg):
            new[k + 1] = F.add(new[k + 1], F.mul(a, w2[k]))
        for k in range(deg + 1):
            new[k] = F.add(new[k], F.mul(b, w3[k]))
        if new == w:
            break
        w = new
    return tuple(w)


def formal_xy(F: FieldDesc, a: int, b: int, nu: Laurent, rel=DEFAULT_REL_PREC):
    """(x, y) of the formal point with parameter nu (nu of positive valuation)."""
    deg = rel + 4 * max(1, nu.val) + 4
    w = w_series(F, a, b, deg)
    W = Laurent(F, 0, [], None)
    nu_pow = Laurent.const(F, 1)
    for k in range(deg + 1):
        if k:
            nu_pow = nu_pow * nu
        if w[k]:
            W = W + nu_pow.scale(w[k])
    err = (deg + 1) * nu.val
    W = W.truncate(err)
    Winv = W.inverse()
    return nu * Winv, -Winv


@lru_cache(maxsize=None)
def formal_group_law(F: FieldDesc, a: int, b: int, deg: int):
    """F(t1, t2) as {(i, j): c} truncated to t1^deg, t2^deg."""
    R = NilRing(F, ("t1", "t2"), (deg, deg))
    t1, t2 = R.gens()
    w = w_series(F, a, b, 2 * deg + 3)
    # lambda = (w(t2) - w(t1)) / (t2 - t1) as a divided difference
    lam = R.zero()
    for n, c in enumerate(w):
        if not c or n == 0:
            continue
        s = R.zero()
        for k in range(n):
            s = s + t1 ** k * t2 ** (n - 1 - k)
        lam = lam + s * FieldElement(F, c)
    wt1 = R.zero()
    for n, c in enumerate(w):
        if c:
            wt1 = wt1 + t1 ** n * FieldElement(F, c)
    nu = wt1 - lam * t1
    A, B = FieldElement(F, a), FieldElement(F, b)
    num = lam * nu * A * 2 + lam * lam * nu * B * 3
    den = 1 + lam * lam * A + lam * lam * lam * B
    res = t1 + t2 + num * den.inverse()
    return {e: c for e, c in res.terms.items()}


def fgl_eval(curve_ab, F: FieldDesc, u, v):
    """F(u, v) for u, v nilpotent NilElements or positive-valuation Laurent series."""
    a, b = curve_ab
    if isinstance(u, NilElement):
        deg = max(u.ring.nil_index, 2)
        law = formal_group_law(F, a, b, deg)
        upow = [u.ring.one()]
        vpow = [u.ring.one()]
        for _ in range(deg):
            upow.append(upow[-1] * u)
            vpow.append(vpow[-1] * v)
        out = u.ring.zero()
        for (i, j), c in law.items():
            term = upow[i] * vpow[j]
            if not term.is_zero():
                out = out + term * FieldElement(F, c)
        return out
    # Laurent case: truncation error O(s^(deg * min valuation))
    vmin = min(u.val if not u.is_zero() else 10 ** 6, v.val if not v.is_zero() else 10 ** 6)
    if u.is_zero():
        return v
    if v.is_zero():
        return u
    target = min(x for x in (u.prec, v.prec) if x is not None) if (u.prec or v.prec) else DEFAULT_REL_PREC
    deg = max(2, -(-target // max(vmin, 1)) + 1)
    law = formal_group_law(F, a, b, deg)
    out = Laurent(F, 0, [], None)
    upow = [Laurent.const(F, 1)]
    vpow = [Laurent.const(F, 1)]
    for _ in range(deg):
        upow.append(upow[-1] * u)
        vpow.append(vpow[-1] * v)
    for (i, j), c in law.items():
        out = out + (upow[i] * vpow[j]).scale(c)
    return out.truncate(deg * vmin)
