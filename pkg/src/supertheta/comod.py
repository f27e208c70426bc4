"""Comodules of truncated Witt group schemes in operator-tuple normal form.

A comodule is given by commuting matrices X_0..X_{n-1} over a finite field with
X_nu^{p^m} = 0.  Points a = (a_0..a_{m-1}) with a_i^{p^n} = 0 act by
E_AH((X_0, ..., X_{n-1}, 0, ...) *_W a).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .ffield import FieldDesc, NilElement, NilRing, make_field
from .linalg import is_zero_matrix, matmul, matvec, nullspace
from .witt import WittVector, ah_pairing


class ComoduleError(ValueError):
    pass


@lru_cache(maxsize=None)
def universal_coaction(p: int, m: int, n: int):
    """E_AH(xi *_W x) over F_p[xi, x]; returns {(alpha, beta): coeff} with alpha on x, beta on xi."""
    base = make_field(p)
    names = [f"xi{i}" for i in range(n)] + [f"x{i}" for i in range(m)]
    R = NilRing(base, names, [p ** m] * n + [p ** n] * m)
    g = R.gens()
    val = ah_pairing(WittVector(p, g[:n]), WittVector(p, g[n:]), m, n)
    table = {}
    for mon, c in val.terms.items():
        table[(mon[n:], mon[:n])] = c
    return table


@dataclass
class WittComodule:
    """Representation with operator tuple X (n matrices, raw field ints)."""

    field: FieldDesc
    m: int
    n: int
    X: list
    dim: int = field(init=False)

    def __post_init__(self):
        if len(self.X) != self.n:
            raise ComoduleError("need exactly n operators")
        self.dim = len(self.X[0]) if self.X else 0
        F, p = self.field, self.field.p
        for A in self.X:
            if len(A) != self.dim or any(len(r) != self.dim for r in A):
                raise ComoduleError("operators must be square of equal size")
        for i, A in enumerate(self.X):
            for B in self.X[i + 1:]:
                if matmul(F, A, B) != matmul(F, B, A):
                    raise ComoduleError("operators do not commute")
            P = A
            for _ in range(p ** self.m - 1):
                P = matmul(F, P, A)
            if not is_zero_matrix(P):
                raise ComoduleError("operator not killed by the p^m-th power")
        self._powcache = {}

    @property
    def p(self):
        return self.field.p

    def apply_monomial(self, beta, v):
        """X^beta v for a field vector v."""
        key = (beta, tuple(v))
        hit = self._powcache.get(key)
        if hit is not None:
            return hit
        out = list(v)
        for A, e in zip(self.X, beta):
            for _ in range(e):
                out = matvec(self.field, A, out)
        self._powcache[key] = out
        return out

    def coaction(self, v):
        """c_M(v) as {alpha: vector}, alpha an exponent tuple on x_0..x_{m-1}."""
        F = self.field
        out = {}
        for (alpha, beta), c in universal_coaction(self.p, self.m, self.n).items():
            w = self.apply_monomial(beta, v)
            if not any(w):
                continue
            cur = out.get(alpha, [0] * self.dim)
            out[alpha] = [F.add(a, F.mul(c, b)) for a, b in zip(cur, w)]
        return {a: w for a, w in out.items() if any(w)}

    def is_invariant(self, v) -> bool:
        zero = (0,) * self.m
        c = self.coaction(v)
        return all(a == zero for a in c) and c.get(zero, [0] * self.dim) == list(v)


def comodule_apply(C: WittComodule, a: WittVector, v):
    """phi(a)(v) for a point a of the group over a NilRing R; v a vector over R or k."""
    if a.length != C.m:
        raise ComoduleError("point has the wrong Witt length")
    ring: NilRing = a.coords[0].ring
    if len(v) != C.dim:
        raise ComoduleError("dimension mismatch")
    vv = [x if isinstance(x, NilElement) else ring.scalar(x) for x in v]
    out = [ring.zero() for _ in range(C.dim)]
    # group the universal table by beta, evaluating coefficients at a
    by_beta = {}
    for (alpha, beta), c in universal_coaction(C.p, C.m, C.n).items():
        mon = ring.scalar(c)
        for coord, e in zip(a.coords, alpha):
            if e:
                mon = mon * coord ** e
        if mon.is_zero():
            continue
        by_beta[beta] = by_beta.get(beta, ring.zero()) + mon
    F = C.field
    for beta, coef in by_beta.items():
        if coef.is_zero():
            continue
        # X^beta applied to an R-vector, coefficientwise in R's monomials
        w = vv
        for A, e in zip(C.X, beta):
            for _ in range(e):
                w = [sum((x * A[i][j] for j, x in enumerate(w) if A[i][j]), ring.zero())
                     for i in range(C.dim)]
        out = [o + coef * x for o, x in zip(out, w)]
    return out


def _nonzero(v):
    return any(v)


def invariant_vector_V(C: WittComodule, v):
    """m = 1: the top nonzero coefficient of c_M(v) in x_0."""
    if C.m != 1:
        raise ComoduleError("invariant_vector_V needs m = 1")
    if not _nonzero(v):
        raise ComoduleError("start vector must be nonzero")
    c = C.coaction(v)
    j = max(c)
    return c[j]


def invariant_vector_F(C: WittComodule, v):
    """n = 1: top coefficient for the base-p ordering of exponent tuples."""
    if C.n != 1:
        raise ComoduleError("invariant_vector_F needs n = 1")
    if not _nonzero(v):
        raise ComoduleError("start vector must be nonzero")
    p = C.p
    c = C.coaction(v)
    key = max(c, key=lambda e: sum(i * p ** nu for nu, i in enumerate(e)))
    return c[key]


def invariant_vector_full(C: WittComodule, v=None):
    """Invariant vector via the filtration by images of powers of Verschiebung."""
    if v is None:
        v = [1] + [0] * (C.dim - 1)
    if not _nonzero(v):
        raise ComoduleError("start vector must be nonzero")
    cur = list(v)
    for i in range(1, C.m + 1):
        var = C.m - i
        c = C.coaction(cur)
        pure = {a[var]: w for a, w in c.items()
                if all(e == 0 for k, e in enumerate(a) if k != var)}
        cur = pure[max(pure)]
    return cur


def invariant_space(C: WittComodule):
    """Brute-force oracle: common kernel of all X_nu."""
    rows = [row for A in C.X for row in A]
    return nullspace(C.field, rows, C.dim) if rows else nullspace(C.field, [], C.dim)
