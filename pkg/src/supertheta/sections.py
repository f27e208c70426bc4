"""Functions on E^g evaluated lazily at exact, nilpotent and formal points.

A point of E^g over a test ring is a tuple of FPoints.  An FPoint is an exact
point of E(k) together with a formal offset: None, a nilpotent NilElement, or a
Laurent series of positive valuation.  It stands for base + T(offset), where
T(t) is the point with formal parameter t.  Functions are trees of elementary
pieces; evaluation happens in one of three contexts (field, nil, laurent).
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .ffield import FieldDesc, FieldElement, NilElement, NilRing
from .ecurve import Curve, CDDivisor, apply_endo_row, eg_add, eg_neg
from .order import parse_oexpr
from .series import Laurent, PrecisionError, fgl_eval, formal_xy


class PoleError(ArithmeticError):
    pass


class SectionError(ValueError):
    pass


# --- evaluation contexts ------------------------------------------------------------

class Ctx:
    """Where values live: 'field' (FieldElement), 'nil' (NilElement) or 'laurent'."""

    def __init__(self, kind: str, E: Curve, ring: NilRing | None = None, prec: int = 40):
        self.kind, self.E, self.F, self.ring, self.prec = kind, E, E.F, ring, prec
        self.memo = {}

    def const(self, c):
        if isinstance(c, FieldElement):
            c = c.v
        if self.kind == "field":
            return FieldElement(self.F, c)
        if self.kind == "nil":
            return self.ring.scalar(FieldElement(self.F, c))
        return Laurent.const(self.F, c)

    def one(self):
        return self.const(1)


def field_ctx(E: Curve):
    return Ctx("field", E)


def nil_ctx(E: Curve, ring: NilRing):
    return Ctx("nil", E, ring=ring)


def laurent_ctx(E: Curve, prec: int = 40):
    return Ctx("laurent", E, prec=prec)


def nil_restrict(x: NilElement, ring: NilRing) -> NilElement:
    """Image of x under the truncation onto a ring with smaller exponents."""
    if x.ring == ring:
        return x
    ex = ring.exponents
    return NilElement(ring, {e: c for e, c in x.terms.items() if all(a < m for a, m in zip(e, ex))})


def _common(u, v):
    """Bring two NilElements into the same (smallest) ring."""
    if not (isinstance(u, NilElement) and isinstance(v, NilElement)) or u.ring == v.ring:
        return u, v
    r1, r2 = u.ring, v.ring
    ring = NilRing(r1.base, r1.names, tuple(min(a, b) for a, b in zip(r1.exponents, r2.exponents)))
    return nil_restrict(u, ring), nil_restrict(v, ring)


def vmul(u, v):
    u, v = _common(u, v)
    return u * v


def vdiv(u, v):
    u, v = _common(u, v)
    if isinstance(v, NilElement) and v.constant() == 0:
        raise PoleError("division by a non-unit")
    if isinstance(v, FieldElement) and v.is_zero():
        raise PoleError("division by zero")
    return u / v


def vadd(u, v):
    u, v = _common(u, v)
    return u + v


def vpow(u, e: int):
    if e < 0:
        if isinstance(u, NilElement) and u.constant() == 0:
            raise PoleError("negative power of a non-unit")
        if isinstance(u, FieldElement) and u.is_zero():
            raise PoleError("negative power of zero")
    return u ** e


# --- points with formal offsets ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FPoint:
    base: tuple | None
    off: object = None


def _ab(E: Curve):
    return (E.a, E.b)


def off_add(E: Curve, u, v):
    if u is None:
        return v
    if v is None:
        return u
    u, v = _common(u, v)
    return fgl_eval(_ab(E), E.F, u, v)


def off_neg(E: Curve, u):
    # [-1] on the formal parameter t = -x/y is t -> -t exactly
    return None if u is None else -u


def off_is_zero(u):
    return u is None or u.is_zero()


def fp_add(E: Curve, P: FPoint, Q: FPoint) -> FPoint:
    return FPoint(E.add(P.base, Q.base), off_add(E, P.off, Q.off))


def fp_neg(E: Curve, P: FPoint) -> FPoint:
    return FPoint(E.neg(P.base), off_neg(E, P.off))


def fp_mul(E: Curve, n: int, P: FPoint) -> FPoint:
    if n < 0:
        return fp_mul(E, -n, fp_neg(E, P))
    R = FPoint(None, None)
    Q = P
    while n:
        if n & 1:
            R = fp_add(E, R, Q)
        Q = fp_add(E, Q, Q)
        n >>= 1
    return R


def _off_gen(E: Curve, g: str, u):
    if u is None:
        return None
    c = E.gen_formal_scale(g)
    if c is None:
        return u ** E.p
    return u * FieldElement(E.F, c)


def fp_gen(E: Curve, g: str, P: FPoint) -> FPoint:
    return FPoint(E.apply_gen(g, P.base), _off_gen(E, g, P.off))


def fp_endo(E: Curve, alpha, P: FPoint) -> FPoint:
    alpha = parse_oexpr(alpha)
    R = FPoint(None, None)
    for word, c in alpha.terms.items():
        if Fraction(c).denominator != 1:
            raise SectionError(f"non-integral coefficient {c} has no rational-map realization")
        Q = P
        for g in reversed(word):
            Q = fp_gen(E, g, Q)
        R = fp_add(E, R, fp_mul(E, int(c), Q))
    return R


def fp_row(E: Curve, row, pt) -> FPoint:
    R = FPoint(None, None)
    for alpha, Pj in zip(row, pt):
        R = fp_add(E, R, fp_endo(E, alpha, Pj))
    return R


def exact(P) -> tuple:
    return tuple(FPoint(c, None) for c in P)


def pt_shift(E: Curve, pt, Q) -> tuple:
    """pt + Q for an exact point Q of E^g."""
    return tuple(FPoint(E.add(a.base, q), a.off) for a, q in zip(pt, Q))


def pt_offset(E: Curve, pt, offs) -> tuple:
    return tuple(FPoint(a.base, off_add(E, a.off, o)) for a, o in zip(pt, offs))


# --- coordinates ---------------------------------------------------------------------

@lru_cache(maxsize=4096)
def coord_expansion(E: Curve, Q0, K: int):
    """Laurent series X(t), Y(t) of Q0 + T(t), correct modulo t^K."""
    F = E.F
    t = Laurent.monomial(F, 1, 1)
    rel = K + 8
    while True:
        xT, yT = formal_xy(F, E.a, E.b, t, rel=rel)
        if Q0 is None:
            X, Y = xT, yT
        else:
            x0, y0 = Q0
            lam = (yT - Laurent.const(F, y0)) / (xT - Laurent.const(F, x0))
            X = lam * lam - Laurent.const(F, x0) - xT
            Y = lam * (Laurent.const(F, x0) - X) - Laurent.const(F, y0)
        if X.prec >= K and Y.prec >= K:
            return X.truncate(K), Y.truncate(K)
        rel += K


def _subst(S: Laurent, nu, ctx: Ctx):
    """S(nu) for a series S in t."""
    if isinstance(nu, NilElement):
        if S.val < 0:
            raise PoleError("pole at a nilpotent point")
        ring = nu.ring
        out = ring.zero()
        pw = ring.one()
        for k in range(0, ring.nil_index + 1):
            c = S.coeff(k)
            if c:
                out = out + pw * FieldElement(ctx.F, c)
            pw = pw * nu
            if pw.is_zero():
                break
        return out
    # Laurent offset
    v = nu.val
    out = Laurent(ctx.F, 0, [], None)
    top = S.val + len(S.coeffs)
    inv = nu.inverse() if S.val < 0 else None
    for k in range(S.val, top):
        c = S.coeff(k)
        if not c:
            continue
        term = nu ** k if k >= 0 else inv ** (-k)
        out = out + term.scale(c)
    if S.prec is not None:
        out = out.truncate(S.prec * v)
    return out


def coords(E: Curve, P: FPoint, ctx: Ctx):
    """(x, y) of P as context values; raises PoleError at O."""
    if off_is_zero(P.off) or ctx.kind == "field":
        if P.off is not None and ctx.kind == "field":
            raise SectionError("formal offsets need a nil or laurent context")
        if P.base is None:
            raise PoleError("x, y have a pole at O")
        x, y = P.base
        return ctx.const(x), ctx.const(y)
    if isinstance(P.off, NilElement):
        K = P.off.ring.nil_index + 1
    else:
        K = ctx.prec
    X, Y = coord_expansion(E, P.base, K)
    return _subst(X, P.off, ctx), _subst(Y, P.off, ctx)


def param_at(E: Curve, P: FPoint, ctx: Ctx):
    """The uniformizer t = -x/y of P near O (exact formal parameter if P.base = O)."""
    if P.base is None:
        if P.off is None:
            return ctx.const(0)
        return P.off
    x, y = coords(E, P, ctx)
    return vdiv(-x, y)


# --- functions on E ------------------------------------------------------------------

class EFunc:
    """A rational function on E, evaluated at FPoints."""

    def at(self, E: Curve, P: FPoint, ctx: Ctx):
        raise NotImplementedError


@dataclass(frozen=True)
class Monomial(EFunc):
    """x(P - T)^i y(P - T)^j; constant 1 when i = j = 0."""

    T: tuple | None
    i: int
    j: int

    def at(self, E, P, ctx):
        if self.i == 0 and self.j == 0:
            return ctx.one()
        R = fp_add(E, P, FPoint(E.neg(self.T), None))
        x, y = coords(E, R, ctx)
        return vmul(x ** self.i, y ** self.j)


@dataclass(frozen=True)
class XDiff(EFunc):
    """x(P - T) - x(b): divisor (T + b) + (T - b) - 2(T)."""

    T: tuple | None
    b: tuple

    def at(self, E, P, ctx):
        R = fp_add(E, P, FPoint(E.neg(self.T), None))
        x, _ = coords(E, R, ctx)
        return x - ctx.const(self.b[0])


@dataclass(frozen=True)
class Param(EFunc):
    """Uniformizer t(P - T)."""

    T: tuple | None

    def at(self, E, P, ctx):
        return param_at(E, fp_add(E, P, FPoint(E.neg(self.T), None)), ctx)


@dataclass(frozen=True)
class Rho2E(EFunc):
    """A function with divisor [2]^{-1}(T) - 4(T) for T in E[2].

    halves holds one S from each pair +-S with 2S = T.
    """

    T: tuple | None
    halves: tuple = ()

    def at(self, E, P, ctx):
        if self.T is None:
            return coords(E, P, ctx)[1]
        x, _ = coords(E, P, ctx)
        num = ctx.one()
        for S in self.halves:
            num = vmul(num, x - ctx.const(S[0]))
        den = vpow(x - ctx.const(self.T[0]), 2)
        return vdiv(num, den)


@dataclass(frozen=True)
class Miller(EFunc):
    """Product of line/vertical factors; factors are ('L', A, B, e) or ('V', A, e)."""

    factors: tuple

    def at(self, E, P, ctx):
        F = E.F
        x, y = coords(E, P, ctx)
        out = ctx.one()
        for fac in self.factors:
            if fac[0] == "V":
                _, A, e = fac
                val = x - ctx.const(A[0])
            else:
                _, A, B, e = fac
                val = _line_value(E, A, B, x, y, ctx)
            out = vmul(out, vpow(val, e))
        return out


def _line_value(E: Curve, A, B, x, y, ctx):
    """l_{A,B} / v_{A+B} at (x, y)."""
    F = E.F
    if A is None or B is None:
        return ctx.one()
    if E.add(A, B) is None:
        return x - ctx.const(A[0])
    if A == B:
        lam = F.div(F.add(F.mul(F.from_int(3), F.mul(A[0], A[0])), E.a), F.mul(F.from_int(2), A[1]))
    else:
        lam = F.div(F.sub(B[1], A[1]), F.sub(B[0], A[0]))
    C = E.add(A, B)
    line = y - ctx.const(A[1]) - (x - ctx.const(A[0])) * FieldElement(F, lam)
    return vdiv(line, x - ctx.const(C[0]))


def elliptic_function_with_divisor(E: Curve, spec) -> Miller:
    """A function with principal divisor sum n_P (P); spec is a list of (P, n)."""
    if sum(n for _, n in spec) != 0:
        raise SectionError("spec not principal: degree is nonzero")
    S = None
    for P, n in spec:
        S = E.add(S, E.mul(n, P))
    if S is not None:
        raise SectionError("spec not principal: points do not sum to O")
    factors = []
    S = None
    for P, n in spec:
        if P is None or n == 0:
            continue
        if n < 0:
            factors.append(("V", P, n))
            P, n = E.neg(P), -n
        for _ in range(n):
            if S is not None:
                factors.append(("L", S, P, 1))
            S = E.add(S, P)
    return Miller(tuple(factors))


# --- functions on E^g -----------------------------------------------------------------

class Func:
    """A rational function on E^g.  ``ev`` memoizes per point within a context."""

    def ev(self, pt, ctx: Ctx):
        key = (id(self), id(pt))
        hit = ctx.memo.get(key)
        if hit is not None:
            return hit[2]
        val = self._ev(pt, ctx)
        ctx.memo[key] = (pt, self, val)
        return val

    def _ev(self, pt, ctx):
        raise NotImplementedError

    def __call__(self, P, ctx: Ctx | None = None):
        """Value at an exact point of E^g (field context by default)."""
        return self.ev(exact(P), ctx)

    def __mul__(self, other):
        return Prod(((self, 1), (other, 1)))

    def __truediv__(self, other):
        return Prod(((self, 1), (other, -1)))

    def __pow__(self, e: int):
        return Prod(((self, e),))


class Const(Func):
    def __init__(self, c: int):
        self.c = c

    def _ev(self, pt, ctx):
        return ctx.const(self.c)


class Pull(Func):
    """f o xi for an elliptic function f and a row xi over the order."""

    def __init__(self, ef: EFunc, row, power: int = 1):
        self.ef, self.row, self.power = ef, tuple(parse_oexpr(a) for a in row), power

    def _ev(self, pt, ctx):
        key = ("row", self.row, id(pt))
        hit = ctx.memo.get(key)
        if hit is None:
            hit = (pt, fp_row(ctx.E, self.row, pt))
            ctx.memo[key] = hit
        v = self.ef.at(ctx.E, hit[1], ctx)
        return v if self.power == 1 else vpow(v, self.power)


class Prod(Func):
    def __init__(self, factors):
        self.factors = tuple((f, e) for f, e in factors if e)

    def _ev(self, pt, ctx):
        out = ctx.one()
        for f, e in self.factors:
            v = f.ev(pt, ctx)
            if e < 0:
                out = vdiv(out, vpow(v, -e))
            else:
                out = vmul(out, vpow(v, e))
        return out


class Lin(Func):
    """sum c_l f_l with raw field coefficients."""

    def __init__(self, terms):
        self.terms = tuple((c, f) for c, f in terms if c)

    def _ev(self, pt, ctx):
        out = ctx.const(0)
        for c, f in self.terms:
            out = vadd(out, vmul(f.ev(pt, ctx), ctx.const(c)))
        return out


class Shift(Func):
    """t_Q^* f: P -> f(P + Q) for an exact point Q."""

    def __init__(self, f: Func, Q):
        self.f, self.Q = f, tuple(Q)

    def _ev(self, pt, ctx):
        return self.f.ev(pt_shift(ctx.E, pt, self.Q), ctx)


class Offset(Func):
    """P -> f(P + h) for a point h with formal coordinates (one offset per factor)."""

    def __init__(self, f: Func, offs):
        self.f, self.offs = f, tuple(offs)

    def _ev(self, pt, ctx):
        return self.f.ev(pt_offset(ctx.E, pt, self.offs), ctx)


class Doubled(Func):
    """[2]^* f."""

    def __init__(self, f: Func):
        self.f = f

    def _ev(self, pt, ctx):
        E = ctx.E
        return self.f.ev(tuple(fp_add(E, a, a) for a in pt), ctx)


class Negated(Func):
    """[-1]^* f."""

    def __init__(self, f: Func):
        self.f = f

    def _ev(self, pt, ctx):
        return self.f.ev(tuple(fp_neg(ctx.E, a) for a in pt), ctx)


def _nil_root(x: NilElement, q: int) -> NilElement:
    ring, F = x.ring, x.ring.base
    small = NilRing(F, ring.names, tuple(-(-e // q) for e in ring.exponents))
    k = F.k
    times = (-_log(q, F.p)) % k
    out = {}
    for e, c in x.terms.items():
        if any(a % q for a in e):
            raise SectionError("value is not a p-power: function is not in the section space")
        out[tuple(a // q for a in e)] = F.frob(c, times)
    return NilElement(small, out)


def _log(q: int, p: int) -> int:
    m = 0
    while q > 1:
        q //= p
        m += 1
    return m


class Root(Func):
    """The p^m-th root of g (g must be a p^m-th power in the function field)."""

    def __init__(self, g: Func, m: int):
        self.g, self.m = g, m

    def _ev(self, pt, ctx):
        v = self.g.ev(pt, ctx)
        if self.m == 0:
            return v
        F = ctx.F
        if ctx.kind == "field":
            return FieldElement(F, F.frob(v.v, (-self.m) % F.k))
        if ctx.kind == "nil":
            return _nil_root(v, F.p ** self.m)
        for _ in range(self.m):
            v = v.pth_root()
        return v


def pullback(ef: EFunc, row, power: int = 1) -> Func:
    return Pull(ef, row, power)


def translate(f: Func, Q) -> Func:
    """t_Q^* f for Q exact, or for Q a tuple of formal offsets."""
    if any(isinstance(q, (NilElement, Laurent)) for q in Q):
        return Offset(f, Q)
    return Shift(f, Q)


# --- divisors on E^g --------------------------------------------------------------------

def components(D: CDDivisor):
    return list(zip(D.rows, D.exps, D.targets()))


def on_divisor(E: Curve, D: CDDivisor, P) -> bool:
    return D.multiplicity_at(E, P) > 0


def random_point(E: Curve, g: int, rng: random.Random, avoid=()):
    """A random exact point of E^g off the given divisors."""
    for _ in range(1000):
        P = tuple(E.random_point(rng) for _ in range(g))
        if not any(on_divisor(E, D, P) for D in avoid):
            return P
    raise SectionError("no point off the divisors found")


# --- the section space H^0(E^g, O(N D)) ---------------------------------------------------

def _ebasis(M: int):
    """Monomials x^i y^j spanning L(M (O)) on E."""
    out = [(0, 0)]
    for d in range(2, M + 1):
        out.append((d // 2, 0) if d % 2 == 0 else ((d - 3) // 2, 1))
    return out


@dataclass
class SectionSpace:
    """Basis of H^0(E^g, O(N D)); basis[l] = (sum_k vecs[l][k] prods[k])^{1/p^m}."""

    E: Curve
    D: CDDivisor
    N: int
    m: int
    prods: list
    vecs: list
    basis: list = field(init=False)

    def __post_init__(self):
        self.basis = [self.combine_g(v) for v in self.vecs]

    @property
    def dim(self):
        return len(self.vecs)

    def combine_g(self, gvec) -> Func:
        return Root(Lin(list(zip(gvec, self.prods))), self.m)

    def element(self, coeffs) -> Func:
        """sum_l coeffs[l] basis[l] (raw field coefficients)."""
        F, q = self.E.F, self.E.p ** self.m
        acc = [0] * len(self.prods)
        for c, v in zip(coeffs, self.vecs):
            cq = F.pow(c, q)
            acc = [F.add(a, F.mul(cq, b)) for a, b in zip(acc, v)]
        return self.combine_g(acc)

    def eval_rows(self, points):
        """Matrix [basis_l(P)] with one row per exact point."""
        rows = []
        for P in points:
            ctx = field_ctx(self.E)
            pt = exact(P)
            rows.append([f.ev(pt, ctx).v for f in self.basis])
        return rows


def build_section_space(E: Curve, D: CDDivisor, N: int, m: int, target: int,
                        rng: random.Random | None = None, rounds: int = 12) -> SectionSpace:
    """H^0(O(N D)) as p^m-th roots inside the pullback of a product space.

    For D = sum p^{n_c} xi_c^*(T_c), f is in L(N D) iff f^{p^m} lies in
    Xi^* of the product of the L_E(N p^{m+n_c} (T_c)); the p^m-th powers there
    are cut out by the vanishing of all formal derivatives of order < p^m.
    """
    from .linalg import nullspace

    rng = rng or random.Random(1)
    F, p, g = E.F, E.p, D.g
    q = p ** m
    comp_bases = []
    for row, n, T in components(D):
        M = N * p ** (m + n)
        comp_bases.append([Pull(Monomial(T, i, j), row) for i, j in _ebasis(M)])
    prods = [Prod([(f, 1) for f in combo]) for combo in itertools.product(*comp_bases)]
    if q == 1:
        vecs = [[1 if k == l else 0 for k in range(len(prods))] for l in range(len(prods))]
        return _check_dim(SectionSpace(E, D, N, m, prods, vecs), target)
    tau = NilRing(F, tuple(f"tau{j}" for j in range(g)), (q,) * g)
    gens = tau.gens()
    monos = [e for e in tau.monomials() if any(e)]
    rows, last = [], None
    for r in range(rounds):
        P = random_point(E, g, rng, avoid=[D])
        pt = tuple(FPoint(c, t) for c, t in zip(P, gens))
        ctx = nil_ctx(E, tau)
        try:
            vals = [f.ev(pt, ctx) for f in prods]
        except PoleError:
            continue
        for e in monos:
            rows.append([v.terms.get(e, 0) for v in vals])
        ns = nullspace(F, rows, len(prods))
        if len(ns) == target and last == target:
            return _check_dim(SectionSpace(E, D, N, m, prods, ns), target)
        last = len(ns)
    raise SectionError(f"basis construction failed: dimension {last}, expected {target}")


def _check_dim(S: SectionSpace, target: int) -> SectionSpace:
    if S.dim != target:
        raise SectionError(f"basis construction failed: dimension {S.dim}, expected {target}")
    return S


# --- level structure ----------------------------------------------------------------------

def level_rho_j(E: Curve, D: CDDivisor, a) -> Func:
    """Symmetric function with divisor t_{-a}^*(D) + t_a^*(D) - 2D."""
    factors = []
    for row, n, T in components(D):
        b = apply_endo_row(E, row, a)
        if b is None:
            continue
        factors.append((Pull(XDiff(T, b), row), p_pow(E, n)))
    return Prod(factors)


def p_pow(E: Curve, n: int) -> int:
    return E.p ** n


@dataclass
class LevelElement:
    """Data of U_v for a frame generator v; rho = prod_j rho_{v,j} has t_v-invariant polar part."""

    name: str
    v: tuple
    rho_js: list
    rho: Func


def level_functions(E: Curve, frame, D: CDDivisor):
    """LevelElements for x_1..x_g, y_1..y_g of the frame (D in normal form)."""
    out = []
    h = frame.N // 2
    gens = [(f"x{i + 1}", v, vh) for i, (v, vh) in enumerate(zip(frame.xs, frame.xhalf))]
    gens += [(f"y{i + 1}", v, vh) for i, (v, vh) in enumerate(zip(frame.ys, frame.yhalf))]
    for name, v, vh in gens:
        rjs = []
        # vh + j v for j = 0..N/2-1 and their negatives run once through vh + Z v
        for j in range(h):
            a = eg_add(E, vh, tuple(E.mul(j, c) for c in v))
            rjs.append(level_rho_j(E, D, a))
        rho = Prod([(r, 1) for r in rjs])
        out.append(LevelElement(name, v, rjs, rho))
    return out


def level_action(lev: LevelElement, f: Func) -> Func:
    """U_v(f) = rho t_v^*(rho^{-1} f), so that U_v^N = 1 exactly."""
    return Prod([(lev.rho, 1), (Shift(f, lev.v), 1), (Shift(lev.rho, lev.v), -1)])


def level_word(levs, word, f: Func) -> Func:
    """Apply U for each generator name in word, rightmost first."""
    by = {l.name: l for l in levs}
    for name in reversed(list(word)):
        f = level_action(by[name], f)
    return f


# --- points on divisor components and relating functions ------------------------------------

def _integer_of(E: Curve, x) -> int:
    from .order import reduce_oelem
    r = reduce_oelem(x, E.relations())
    if any(w for w in r.terms):
        raise SectionError(f"{x} does not reduce to an integer")
    return int(r.terms.get((), 0))


def component_points(E: Curve, row, T, rng: random.Random, count: int):
    """Random exact points Q of E^g with xi(Q) = T (row = xi)."""
    from .order import canonical_involution
    from .ecurve import two_torsion_points
    g = len(row)
    base = None
    for Q in two_torsion_points(E, g):
        if apply_endo_row(E, row, Q) == T:
            base = Q
            break
    if base is None:
        raise SectionError("component target is not the image of a 2-torsion point")
    j = next(k for k, a in enumerate(row) if not a.is_zero())
    nj = _integer_of(E, canonical_involution(row[j]) * row[j])
    cj = canonical_involution(row[j])
    out = []
    for _ in range(count):
        K = [None] * g
        for l in range(g):
            if l == j:
                continue
            R = E.random_point(rng)
            K[l] = E.mul(nj, R)
            K[j] = E.add(K[j], E.neg(E.endo(cj * row[l], R)))
        Q = eg_add(E, base, tuple(K))
        if apply_endo_row(E, row, Q) != T:
            raise SectionError("kernel parametrization failed")
        out.append(Q)
    return out


def _shared(E: Curve, row, T, D: CDDivisor, rng) -> bool:
    pts = component_points(E, row, T, rng, 6)
    return any(all(apply_endo_row(E, r2, Q) == T2 for Q in pts)
               for r2, _, T2 in components(D))


def relating_function(E: Curve, S: SectionSpace, Dp: CDDivisor, rng: random.Random | None = None):
    """f in H^0(O(D)) with (f) = Dp - D, or None when Dp is not equivalent to D.

    Components of Dp that are also components of D impose nothing; the others
    must be reduced, and f is required to vanish at random points on them.
    """
    from .linalg import nullspace
    rng = rng or random.Random(7)
    D, F = S.D, S.E.F
    if S.N != 1:
        raise SectionError("relating functions are searched in H^0(O(D))")
    rows = []
    for row, n, T in components(Dp):
        if _shared(E, row, T, D, rng):
            continue
        if n:
            raise SectionError("non-reduced unshared component: vanishing order not supported")
        pts = [Q for Q in component_points(E, row, T, rng, 3 * S.dim + 4) if not on_divisor(E, D, Q)]
        rows += S.eval_rows(pts)
    if not rows:
        return Const(1)
    ns = nullspace(F, rows, S.dim)
    if not ns:
        return None
    if len(ns) > 1:
        raise SectionError("relating function not unique: too few vanishing conditions")
    return S.element(ns[0])


# --- comodule structure on H^0(O(D)) ---------------------------------------------------------

def check_alpha_p_param(E: Curve):
    """The formal parameter restricted to E[F] is additive (needed for points of alpha_p)."""
    from .series import formal_group_law
    p = E.p
    law = formal_group_law(E.F, E.a, E.b, p)
    bad = [e for e, c in law.items() if c and e not in ((1, 0), (0, 1))]
    if bad:
        raise SectionError("formal parameter is not additive on E[F]; a Lubin-Tate coordinate is needed")


@dataclass
class SubgroupPart:
    """One factor H_i of a spanning tuple: relating function r_i and the point h_i.

    coeffs[j][l]: coefficient of delta_l in the j-th cover coordinate; the point
    is x -> (sum_j iota(coeffs[j][l] x_j))_l.
    """

    r: Func
    coeffs: list

    def offsets(self, E: Curve, xs):
        g = len(self.coeffs[0])
        out = []
        for l in range(g):
            o = None
            for j, x in enumerate(xs):
                c = self.coeffs[j][l]
                if c:
                    o = off_add(E, o, x * FieldElement(E.F, c))
            out.append(o)
        return tuple(out)


def _neg_offs(E, offs):
    return tuple(off_neg(E, o) for o in offs)


def u_sub(E: Curve, part_r: Func, offs, f: Func) -> Func:
    """Action of the point with offsets offs on O(D), transported from O(D_i'): r t_{-h}^*(f/r)."""
    m = _neg_offs(E, offs)
    return Prod([(part_r, 1), (Offset(f, m), 1), (Offset(part_r, m), -1)])


def _ordered(E, parts, offs, f, order):
    for i in reversed(order):
        f = u_sub(E, parts[i].r, offs[i], f)
    return f


@dataclass
class ComoduleData:
    comodules: list
    matrices: dict
    shuffle: object
    ring: NilRing


def comodule_on_sections(E: Curve, S: SectionSpace, parts, avoid=(), rng: random.Random | None = None,
                         extra_points: int = 4) -> ComoduleData:
    """The coaction c_W(rho) = sh(s(h), s(h)/2) U_{h_1} ... U_{h_r}(rho) on the basis of S (n = 1)."""
    from .linalg import solve
    from .ffield import nilring_unit_sqrt
    from .comod import WittComodule
    check_alpha_p_param(E)
    rng = rng or random.Random(11)
    F, p = E.F, E.p
    a = len(parts[0].coeffs)
    names = tuple(f"x{j}" for j in range(a))
    A = NilRing(F, names, (p,) * a)
    B = NilRing(F, names, (p ** S.m * (p - 1) + 1,) * a)
    xs = B.gens()
    offs = [pt.offsets(E, xs) for pt in parts]
    r = len(parts)
    fwd = list(range(r))
    terms = [_ordered(E, parts, offs, f, fwd) for f in S.basis]
    rev0 = _ordered(E, parts, offs, S.basis[0], fwd[::-1])
    pts, vals, quot = [], [], None
    tries = 0
    while len(pts) < S.dim + extra_points:
        tries += 1
        if tries > 50 * (S.dim + extra_points):
            raise SectionError("could not find evaluation points off all divisors")
        P = random_point(E, S.D.g, rng, avoid=[S.D, *avoid])
        ctx = nil_ctx(E, B)
        pt = exact(P)
        try:
            row = [nil_restrict(t.ev(pt, ctx), A) for t in terms]
            if r > 1:
                q = vdiv(nil_restrict(rev0.ev(pt, ctx), A), row[0])
            else:
                q = A.one()
        except (PoleError, ZeroDivisionError):
            continue
        if quot is None:
            quot = q
        elif q != quot:
            raise SectionError("shuffle quotient is not constant: upstream inconsistency")
        pts.append(P)
        vals.append(row)
    if quot.constant() != 1:
        raise SectionError("shuffle quotient does not reduce to 1")
    sh = nilring_unit_sqrt(quot)
    if sh * sh != quot:
        raise SectionError("square root of the shuffle quotient failed")
    vals = [[sh * v for v in row] for row in vals]
    Amat = S.eval_rows(pts)
    mats = {}
    for e in A.monomials():
        M = [[0] * S.dim for _ in range(S.dim)]
        for k in range(S.dim):
            rhs = [row[k].terms.get(e, 0) for row in vals]
            x = solve(F, Amat, rhs)
            if x is None:
                raise SectionError("coaction leaves the section space: basis too small")
            for l in range(S.dim):
                M[l][k] = x[l]
        mats[e] = M
    zero = (0,) * a
    ident = [[1 if i == j else 0 for j in range(S.dim)] for i in range(S.dim)]
    if mats[zero] != ident:
        raise SectionError("counit fails: constant term of the coaction is not the identity")
    # the universal coaction starts with c1 * xi * x; rescale to get the operator
    from .comod import universal_coaction
    c1inv = F.inv(F.from_int(universal_coaction(p, 1, 1)[((1,), (1,))]))
    comods = []
    for j in range(a):
        ej = tuple(1 if k == j else 0 for k in range(a))
        X = [[F.mul(c1inv, x) for x in row] for row in mats[ej]]
        comods.append(WittComodule(F, 1, 1, [X]))
    _check_product_coaction(F, comods, mats, a, S.dim)
    return ComoduleData(comods, mats, sh, A)


def _check_product_coaction(F, comods, mats, a, dim):
    """The computed coaction equals prod_j E_AH(X_j x_j) (the normal form)."""
    for k in range(dim):
        v = [1 if i == k else 0 for i in range(dim)]
        acc = {(0,) * a: v}
        for j, C in enumerate(comods):
            new = {}
            for e, w in acc.items():
                for (alpha,), u in C.coaction(w).items():
                    e2 = tuple(x + (alpha if i == j else 0) for i, x in enumerate(e))
                    cur = new.get(e2, [0] * dim)
                    new[e2] = [F.add(s, t) for s, t in zip(cur, u)]
            acc = new
        for e, M in mats.items():
            col = [M[l][k] for l in range(dim)]
            if acc.get(e, [0] * dim) != col:
                raise SectionError("coaction is not of operator-tuple normal form")


def invariant_section(S: SectionSpace, data: ComoduleData, start=None):
    """(coefficient vector, function) of the invariant section rho_H."""
    from .comod import invariant_vector_full
    from .linalg import intersect_kernels
    F = S.E.F
    space = intersect_kernels(F, [C.X[0] for C in data.comodules], S.dim)
    if len(space) != 1:
        raise SectionError(f"invariant space has dimension {len(space)}, expected 1")
    if len(data.comodules) == 1:
        v = invariant_vector_full(data.comodules[0], start)
    else:
        v = space[0]
    return v, S.element(v)


# --- rho_2, local equations and evaluation ------------------------------------------------------

def _halves(E: Curve, T):
    """One S from each pair +-S with 2S = T."""
    out = []
    for S in E.torsion(4):
        if S is not None and E.add(S, S) == T and E.neg(S) not in out:
            out.append(S)
    return tuple(out)


def rho2(E: Curve, D: CDDivisor) -> Func:
    """A function with divisor [2]^{-1} D - 4 D."""
    factors = []
    for row, n, T in components(D):
        ef = Rho2E(T, () if T is None else _halves(E, T))
        factors.append((Pull(ef, row), E.p ** n))
    return Prod(factors)


def local_equation(E: Curve, D: CDDivisor, Q=None) -> Func:
    """u with (u) = D near Q (Q = 0 by default); 1 if Q avoids D."""
    Q = Q if Q is not None else (None,) * D.g
    factors = []
    for row, n, T in components(D):
        if apply_endo_row(E, row, Q) == T:
            factors.append((Pull(Param(T), row), E.p ** n))
    return Prod(factors)


def evaluate_at(E: Curve, f: Func, D: CDDivisor, N: int, Q=None, rng: random.Random | None = None,
                prec: int = 48, max_prec: int = 1600) -> int:
    """(f u_Q^N)(Q) for f in H^0(O(N D)), computed along a random formal line through Q."""
    rng = rng or random.Random(3)
    F = E.F
    Q = Q if Q is not None else (None,) * D.g
    u = local_equation(E, D, Q)
    g = Prod([(f, 1), (u, N)])
    dirs = [rng.randrange(1, F.q) for _ in range(D.g)]
    while prec <= max_prec:
        ctx = laurent_ctx(E, prec)
        pt = tuple(FPoint(q, Laurent.monomial(F, c, 1)) for q, c in zip(Q, dirs))
        try:
            val = g.ev(pt, ctx)
            if not val.is_zero() and val.val < 0:
                raise SectionError("section has a pole at the evaluation point: not in H^0(O(N D))")
            return val.coeff(0)
        except PrecisionError:
            prec *= 2
    raise SectionError("evaluation did not converge within the precision limit")


def rho2_and_eval(E: Curve, D: CDDivisor, Q=None):
    """(rho_2, evaluator) where evaluator(f, N) = (f u^N)(Q)."""
    r2 = rho2(E, D)

    def ev(f: Func, N: int, rng=None):
        return evaluate_at(E, f, D, N, Q, rng)

    return r2, ev
