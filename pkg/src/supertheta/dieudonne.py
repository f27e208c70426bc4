"""Dieudonne-module linear algebra over the chain ring W_n(k).

The ambient module M(E^g[F^n]) has W_n(k)-coordinates (delta_1, F delta_1, ...,
delta_g, F delta_g); delta is killed by p^ceil(n/2) and F delta by p^floor(n/2).
Endomorphisms act W(k)-linearly through the block matrices Psi.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .ffield import FieldDesc
from .order import OElem, parse_oexpr
from .witt import _eval_poly_field, witt_poly_table


class DieudonneError(ValueError):
    pass


class WnK:
    """The Witt ring W_n(k) of a finite field; elements are tuples of raw ints."""

    def __init__(self, field: FieldDesc, n: int):
        if n < 1:
            raise DieudonneError("Witt length must be >= 1")
        self.F, self.n, self.p = field, n, field.p
        self._add = witt_poly_table(self.p, n, "add").polys
        self._mul = witt_poly_table(self.p, n, "mul").polys
        self.zero = (0,) * n
        self.one = (1,) + (0,) * (n - 1)

    def __eq__(self, other):
        return isinstance(other, WnK) and (self.F, self.n) == (other.F, other.n)

    def __hash__(self):
        return hash((self.F, self.n))

    def add(self, a, b):
        if not any(a):
            return b
        if not any(b):
            return a
        if self.n == 1:
            return (self.F.add(a[0], b[0]),)
        vals = list(a) + list(b)
        return tuple(_eval_poly_field(t, vals, self.F) for t in self._add)

    def neg(self, a):
        return tuple(self.F.neg(c) for c in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not any(a) or not any(b):
            return self.zero
        if self.n == 1:
            return (self.F.mul(a[0], b[0]),)
        vals = list(a) + list(b)
        return tuple(_eval_poly_field(t, vals, self.F) for t in self._mul)

    def from_int(self, k: int):
        if k < 0:
            return self.neg(self.from_int(-k))
        acc, base = self.zero, self.one
        while k:
            if k & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            k >>= 1
        return acc

    def from_fraction(self, r: Fraction):
        num, den = self.from_int(r.numerator), self.from_int(r.denominator)
        if self.val(den) > 0:
            raise DieudonneError(f"denominator of {r} not a unit in W(k)")
        return self.mul(num, self.inv(den))

    def teich(self, c):
        return (c,) + (0,) * (self.n - 1)

    def sigma(self, a, times=1):
        return tuple(self.F.frob(c, times) for c in a)

    def sigma_inv(self, a):
        return self.sigma(a, self.F.k - 1) if self.F.k > 1 else a

    def val(self, a):
        """p-adic valuation; n for zero."""
        for i, c in enumerate(a):
            if c:
                return i
        return self.n

    def is_zero(self, a):
        return not any(a)

    def p_power(self, j):
        """The element p^j."""
        if j >= self.n:
            return self.zero
        return tuple(1 if i == j else 0 for i in range(self.n))

    def _unit_part(self, a):
        v = self.val(a)
        # a = V^v(c) = p^v * F^{-v}(c)
        c = a[v:] + (0,) * v
        for _ in range(v):
            c = self.sigma_inv(c)
        return v, c

    def inv(self, a):
        if not a[0]:
            raise DieudonneError("not a unit in W_n(k)")
        b = self.teich(self.F.inv(a[0]))
        two = self.from_int(2)
        prec = 1
        while prec < self.n:
            b = self.mul(b, self.sub(two, self.mul(a, b)))
            prec *= 2
        return b

    def div(self, a, b):
        """Some x with b*x = a; requires val(a) >= val(b)."""
        va, vb = self.val(a), self.val(b)
        if va < vb:
            raise DieudonneError("division not exact in W_n(k)")
        if va >= self.n:
            return self.zero
        _, ua = self._unit_part(a)
        _, ub = self._unit_part(b)
        q = self.mul(ua, self.inv(ub))
        return self.mul(q, self.p_power(va - vb))

    def format(self, a):
        return "(" + ",".join(self.F.format(c) for c in a) + ")"


# --- matrices over W_n(k) ---------------------------------------------------

def wmat_mul(W: WnK, A, B):
    out = []
    for row in A:
        r = []
        for j in range(len(B[0])):
            s = W.zero
            for k, a in enumerate(row):
                if any(a) and any(B[k][j]):
                    s = W.add(s, W.mul(a, B[k][j]))
            r.append(s)
        out.append(r)
    return out


def wmat_vec(W: WnK, A, v):
    return [row[0] for row in wmat_mul(W, A, [[x] for x in v])]


def wmat_identity(W: WnK, n):
    return [[W.one if i == j else W.zero for j in range(n)] for i in range(n)]


def smith_reduce(W: WnK, A):
    """Diagonalise A by unimodular row/column operations.

    Returns (valuations of the diagonal, U, V) with U A V diagonal; entries of
    the diagonal are p^v times units.
    """
    M = [list(r) for r in A]
    nr = len(M)
    nc = len(M[0]) if nr else 0
    U = wmat_identity(W, nr)
    V = wmat_identity(W, nc)
    vals = []
    for t in range(min(nr, nc)):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                v = W.val(M[i][j])
                if v < W.n and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        M[t], M[i] = M[i], M[t]
        U[t], U[i] = U[i], U[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        piv = M[t][t]
        for i in range(t + 1, nr):
            if any(M[i][t]):
                f = W.neg(W.div(M[i][t], piv))
                M[i] = [W.add(a, W.mul(f, b)) for a, b in zip(M[i], M[t])]
                U[i] = [W.add(a, W.mul(f, b)) for a, b in zip(U[i], U[t])]
        for j in range(t + 1, nc):
            if any(M[t][j]):
                f = W.neg(W.div(M[t][j], piv))
                for row in M:
                    row[j] = W.add(row[j], W.mul(f, row[t]))
                for row in V:
                    row[j] = W.add(row[j], W.mul(f, row[t]))
        vals.append(v)
    return vals, U, V, M


@dataclass(frozen=True)
class Ambient:
    """M(E^g[F^n]) coordinatised by (delta_i, F delta_i)."""

    W: WnK
    g: int

    @property
    def n(self):
        return self.W.n

    @property
    def exps(self):
        hi, lo = (self.n + 1) // 2, self.n // 2
        return tuple(e for _ in range(self.g) for e in (hi, lo))

    @property
    def rank(self):
        return 2 * self.g

    def truncate(self, c, e):
        # zero out Witt coordinates of index >= e (c mod p^e)
        return tuple(x if i < e else 0 for i, x in enumerate(c))

    def canon(self, v):
        return tuple(self.truncate(c, e) for c, e in zip(v, self.exps))

    def relation_matrix(self):
        W = self.W
        return [[W.p_power(e) if i == j else W.zero for j, e in enumerate(self.exps)]
                for i in range(self.rank)]

    def F_op(self, v):
        W = self.W
        out = []
        for i in range(self.g):
            a, b = v[2 * i], v[2 * i + 1]
            out += [W.neg(W.mul(W.p_power(1), W.sigma(b))), W.sigma(a)]
        return self.canon(out)

    def V_op(self, v):
        W = self.W
        out = []
        for i in range(self.g):
            a, b = v[2 * i], v[2 * i + 1]
            out += [W.mul(W.p_power(1), W.sigma_inv(b)), W.neg(W.sigma_inv(a))]
        return self.canon(out)

    def basis_vector(self, k):
        return tuple(self.W.one if i == k else self.W.zero for i in range(self.rank))

    def delta(self, i, coeff=None):
        v = [self.W.zero] * self.rank
        v[2 * i] = self.W.one if coeff is None else coeff
        return tuple(v)


def quotient_length(W: WnK, cols, nrows):
    """Length of W_n^{nrows} / (span of the given column vectors)."""
    if not cols:
        return nrows * W.n
    A = [[c[i] for c in cols] for i in range(nrows)]
    vals, *_ = smith_reduce(W, A)
    return nrows * W.n - sum(W.n - v for v in vals)


def submodule_length(amb: Ambient, gens):
    rel = [list(r) for r in zip(*amb.relation_matrix())]  # columns p^e_j e_j
    total = sum(amb.exps)
    return total - quotient_length(amb.W, [tuple(g) for g in gens] + [tuple(r) for r in rel], amb.rank)


class PsiMap:
    """Generator -> 2x2 matrix over W_n(k), with the Frobenius-compatible shape."""

    def __init__(self, W: WnK, table: dict, relations=()):
        self.W = W
        self.table = {k: [list(r) for r in v] for k, v in table.items()}
        self.relations = list(relations)
        self.validate()

    def validate(self):
        W = self.W
        for name, M in self.table.items():
            a, b = M[0][0], M[1][0]
            expect = [[a, W.neg(W.mul(W.p_power(1), W.sigma(b)))], [b, W.sigma(a)]]
            if M != expect:
                raise DieudonneError(f"Psi({name}) does not commute with the Dieudonne F")
        if "F" in self.table:
            sq = wmat_mul(W, self.table["F"], self.table["F"])
            mp = W.neg(W.p_power(1))
            if sq != [[mp, W.zero], [W.zero, mp]]:
                raise DieudonneError("Psi(F)^2 != -p")
        for lhs, rhs in self.relations:
            if self.of(parse_oexpr(lhs)) != self.of(parse_oexpr(rhs)):
                raise DieudonneError(f"relation {lhs} = {rhs} fails under Psi")

    def of(self, x: OElem):
        W = self.W
        out = [[W.zero, W.zero], [W.zero, W.zero]]
        for word, c in x.terms.items():
            M = wmat_identity(W, 2)
            for gname in word:
                if gname not in self.table:
                    raise DieudonneError(f"no Psi entry for generator {gname}")
                M = wmat_mul(W, M, self.table[gname])
            s = W.from_fraction(c)
            out = [[W.add(o, W.mul(s, m)) for o, m in zip(ro, rm)] for ro, rm in zip(out, M)]
        return out

    def tangent_action(self, name):
        return self.table[name][0][0][0]


def standard_psi(W: WnK, u_i=None, zeta=None, relations=()):
    """Psi table for the generators available on a given curve.

    u_i: tangent action of i (a square root of -1 in k); zeta: tangent action of zeta3.
    """
    t = {"F": [[W.zero, W.neg(W.p_power(1))], [W.one, W.zero]]}
    if u_i is not None:
        tu = W.teich(u_i)
        t["i"] = [[tu, W.zero], [W.zero, W.sigma(tu)]]
    if zeta is not None:
        tz = W.teich(zeta)
        t["zeta3"] = [[tz, W.zero], [W.zero, W.sigma(tz)]]
    return PsiMap(W, t, relations)


def psi_extend(psi: PsiMap, Phi):
    """Block matrix of Psi applied entrywise to an order matrix."""
    rows = []
    for row in Phi:
        blocks = [psi.of(parse_oexpr(e)) for e in row]
        for r in range(2):
            rows.append([blk[r][c] for blk in blocks for c in range(2)])
    return rows


@dataclass
class DieudonneModule:
    """W_n(k)-submodule of the ambient, closed under F and V."""

    amb: Ambient
    gens: list
    length: int = field(init=False)

    def __post_init__(self):
        self.gens = [self.amb.canon(g) for g in self.gens if any(any(c) for c in self.amb.canon(g))]
        self.length = submodule_length(self.amb, self.gens)

    def contains(self, v) -> bool:
        return submodule_length(self.amb, self.gens + [tuple(v)]) == self.length

    def is_stable(self) -> bool:
        return all(self.contains(self.amb.F_op(g)) and self.contains(self.amb.V_op(g))
                   for g in self.gens)

    def closure(self) -> "DieudonneModule":
        gens = list(self.gens)
        frontier = list(gens)
        cur = DieudonneModule(self.amb, gens)
        while frontier:
            nxt = []
            for g in frontier:
                for h in (self.amb.F_op(g), self.amb.V_op(g)):
                    if not cur.contains(h):
                        gens.append(h)
                        cur = DieudonneModule(self.amb, gens)
                        nxt.append(h)
            frontier = nxt
        return cur


def kernel_module(amb: Ambient, psiH) -> DieudonneModule:
    """ker of the W-linear map psiH on the ambient module."""
    W = amb.W
    N = amb.rank
    rel = amb.relation_matrix()
    B = [list(psiH[i]) + list(rel[i]) for i in range(N)]
    vals, U, V, _ = smith_reduce(W, B)
    ncols = 2 * N
    gens = []
    for k in range(ncols):
        if k < len(vals):
            s = vals[k]
            if s == 0:
                continue
            scale = W.p_power(W.n - s)
        else:
            scale = W.one
        col = [W.mul(V[r][k], scale) for r in range(ncols)]
        gens.append(tuple(col[:N]))
    mod = DieudonneModule(amb, gens)
    # sanity: psiH kills every generator modulo the relations
    for g in mod.gens:
        img = amb.canon(wmat_vec(W, psiH, g))
        if any(any(c) for c in img):
            raise DieudonneError("kernel computation failed")
    return mod


def kernel_for(W: WnK, g: int, psi_builder, H):
    """Kernel of M(H) on M(E^g[F^n]), checking that n is large enough.

    psi_builder(W') must return a PsiMap over W'.  The kernel is recomputed with
    Witt length n + 1; a change of length means ker(eta) is not killed by F^n.
    """
    amb = Ambient(W, g)
    ker = kernel_module(amb, psi_extend(psi_builder(W), H))
    W2 = WnK(W.F, W.n + 1)
    ker2 = kernel_module(Ambient(W2, g), psi_extend(psi_builder(W2), H))
    if ker2.length != ker.length:
        raise DieudonneError(f"n = {W.n} too small: ker(eta) is not killed by F^n")
    return amb, ker


def gram_matrix(amb: Ambient, psiH, c=None):
    """J * Psi(H) (times the unit c), whose entries represent values in p^{-n}W/W."""
    W = amb.W
    N = amb.rank
    JM = []
    for i in range(N):
        if i % 2 == 0:
            JM.append(list(psiH[i + 1]))
        else:
            JM.append([W.neg(x) for x in psiH[i - 1]])
    if c is not None:
        JM = [[W.mul(c, x) for x in row] for row in JM]
    return JM


def dieudonne_pairing(amb: Ambient, psiH, u, v, ker: DieudonneModule = None, c=None):
    """<u, v> as an element of W_n(k), standing for p^{-n} * value mod W."""
    W = amb.W
    if ker is not None and (not ker.contains(u) or not ker.contains(v)):
        raise DieudonneError("pairing arguments must lie in M(ker eta)")
    G = gram_matrix(amb, psiH, c)
    s = W.zero
    for i, ui in enumerate(u):
        if not any(ui):
            continue
        for j, vj in enumerate(v):
            if any(vj) and any(G[i][j]):
                s = W.add(s, W.mul(ui, W.mul(G[i][j], vj)))
    return s


def is_maximal_isotropic(S: DieudonneModule, ker: DieudonneModule, psiH, c=None) -> bool:
    amb = S.amb
    if not S.is_stable():
        raise DieudonneError("subspace is not stable under F and V")
    for g in S.gens:
        if not ker.contains(g):
            raise DieudonneError("subspace not contained in M(ker eta)")
    for a in S.gens:
        for b in S.gens:
            if any(dieudonne_pairing(amb, psiH, a, b, c=c)):
                return False
    return 2 * S.length == ker.length


def _solve_in_span(amb: Ambient, cols, target):
    """Coefficients x with sum x_j cols_j = target modulo the relations, or None."""
    W = amb.W
    N = amb.rank
    rel_cols = [tuple(r) for r in zip(*amb.relation_matrix())]
    allc = list(cols) + rel_cols
    A = [[c[i] for c in allc] for i in range(N)]
    vals, U, V, D = smith_reduce(W, A)
    y = wmat_vec(W, U, list(target))
    z = [W.zero] * len(allc)
    for k in range(N):
        if k < len(vals):
            if W.val(y[k]) < vals[k]:
                return None
            z[k] = W.div(y[k], D[k][k])
        elif any(y[k]):
            return None
    x = wmat_vec(W, V, z)
    return x[:len(cols)]


def splitting_sigma(subs, ker: DieudonneModule):
    """A section of the sum map (+) M(H_i) -> M(ker eta), as images of ker's generators.

    Returns a list over ker.gens of tuples (component in subs[0], ..., component in subs[r-1]).
    """
    amb = ker.amb
    W = amb.W
    allgens = [(i, g) for i, S in enumerate(subs) for g in S.gens]
    total = DieudonneModule(amb, [g for _, g in allgens])
    if total.length != ker.length or not all(ker.contains(g) for _, g in allgens):
        raise DieudonneError("not a spanning tuple: sum map is not surjective onto M(ker eta)")
    if sum(S.length for S in subs) != ker.length:
        raise DieudonneError("not a spanning tuple: sum map has a kernel, no canonical splitting")
    out = []
    for g in ker.gens:
        x = _solve_in_span(amb, [h for _, h in allgens], g)
        if x is None:
            raise DieudonneError("not a spanning tuple")
        parts = []
        for i, S in enumerate(subs):
            acc = [W.zero] * amb.rank
            for (j, h), coeff in zip(allgens, x):
                if j == i:
                    acc = [W.add(a, W.mul(coeff, b)) for a, b in zip(acc, h)]
            parts.append(amb.canon(acc))
        out.append(tuple(parts))
    # the sum map is an isomorphism, so its inverse commutes with F and V
    return out


def sigma_of(subs, m):
    """Components (m_1, ..., m_r) with m_i in subs[i] and sum m_i = m (unique for a splitting)."""
    amb = subs[0].amb
    W = amb.W
    allgens = [(i, g) for i, S in enumerate(subs) for g in S.gens]
    x = _solve_in_span(amb, [h for _, h in allgens], m)
    if x is None:
        raise DieudonneError("element is not in the span of the given submodules")
    parts = []
    for i in range(len(subs)):
        acc = [W.zero] * amb.rank
        for (j, h), coeff in zip(allgens, x):
            if j == i:
                acc = [W.add(a, W.mul(coeff, b)) for a, b in zip(acc, h)]
        parts.append(amb.canon(acc))
    return tuple(parts)


@dataclass(frozen=True)
class WittCover:
    """Surjection D_{n,n}^a -> M(S) and its lift to D_{n,n}^g.

    lift[i][j] = (a, b) means the D-element a + b F in row i, column j.
    """

    a: int
    lift: tuple


def witt_cover(S: DieudonneModule) -> WittCover:
    amb = S.amb
    g = amb.g
    lift = tuple(tuple((gen[2 * i], gen[2 * i + 1]) for gen in S.gens) for i in range(g))
    cover = WittCover(len(S.gens), lift)
    # diagram check: (a + bF) applied to delta_i recovers the generator coordinates
    for j, gen in enumerate(S.gens):
        rebuilt = []
        for i in range(g):
            a, b = lift[i][j]
            rebuilt += [a, b]
        if amb.canon(rebuilt) != gen:
            raise DieudonneError("lift infeasible")
    return cover
