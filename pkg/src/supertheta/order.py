"""Elements of the endomorphism order as noncommutative polynomials.

An element is a map word -> Fraction where a word is a tuple of generator names
("F", "i", "zeta3", "sqrtm2").  Strings such as ``"-7/2*i + 2F + 1/2*iF"`` or
``"(1+i)F"`` are parsed with juxtaposition meaning multiplication.
"""
from __future__ import annotations

import re
from fractions import Fraction

GENERATORS = {
    "F": "F", "i": "i",
    "zeta3": "zeta3", "ζ3": "zeta3", "ζ₃": "zeta3", "z3": "zeta3",
    "sqrtm2": "sqrtm2", "√-2": "sqrtm2", "√−2": "sqrtm2", "s2": "sqrtm2",
}


class OrderParseError(ValueError):
    pass


class OElem:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {w: Fraction(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c):
        return cls({(): Fraction(c)})

    @classmethod
    def gen(cls, name):
        return cls({(name,): Fraction(1)})

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return OElem(out)

    __radd__ = __add__

    def __neg__(self):
        return OElem({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return OElem(out)

    def __rmul__(self, other):
        return _lift(other) * self

    def __eq__(self, other):
        return isinstance(other, OElem) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def denominators(self):
        return {c.denominator for c in self.terms.values()}

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0])):
            word = "".join(w)
            if not w:
                parts.append(str(c))
            elif c == 1:
                parts.append(word)
            elif c == -1:
                parts.append("-" + word)
            else:
                parts.append(f"{c}*{word}")
        return " + ".join(parts)


def _lift(x):
    if isinstance(x, OElem):
        return x
    return OElem.const(Fraction(x))


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(zeta3|ζ₃|ζ3|z3|sqrtm2|√-2|√−2|s2|F|i)|([()+\-−*·/]))")


def _tokenize(s):
    pos, toks = 0, []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise OrderParseError(f"cannot parse {s[pos:]!r}")
        num, gen, op = m.groups()
        if num is not None:
            toks.append(("num", Fraction(num)))
        elif gen is not None:
            toks.append(("gen", GENERATORS[gen]))
        else:
            toks.append(("op", {"−": "-", "·": "*"}.get(op, op)))
        pos = m.end()
    return toks


def parse_oexpr(s) -> OElem:
    """Parse an order expression; ints pass through as constants."""
    if isinstance(s, OElem):
        return s
    if isinstance(s, (int, Fraction)):
        return OElem.const(s)
    toks = _tokenize(str(s))
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def expr():
        nonlocal pos
        sign = 1
        if peek() == ("op", "-"):
            pos += 1
            sign = -1
        elif peek() == ("op", "+"):
            pos += 1
        acc = term() * sign
        while peek()[0] == "op" and peek()[1] in "+-":
            op = toks[pos][1]
            pos += 1
            t = term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term():
        nonlocal pos
        acc = factor()
        while True:
            kind, val = peek()
            if kind == "op" and val == "*":
                pos += 1
                acc = acc * factor()
            elif kind == "op" and val == "/":
                pos += 1
                k, d = peek()
                if k != "num":
                    raise OrderParseError("can only divide by integers")
                pos += 1
                acc = acc * OElem.const(Fraction(1) / d)
            elif kind in ("num", "gen") or (kind == "op" and val == "("):
                acc = acc * factor()
            else:
                return acc

    def factor():
        nonlocal pos
        kind, val = peek()
        if kind == "num":
            pos += 1
            return OElem.const(val)
        if kind == "gen":
            pos += 1
            return OElem.gen(val)
        if kind == "op" and val == "(":
            pos += 1
            inner = expr()
            if peek() != ("op", ")"):
                raise OrderParseError("unbalanced parentheses")
            pos += 1
            return inner
        if kind == "op" and val == "-":
            pos += 1
            return -factor()
        raise OrderParseError(f"unexpected token {val!r}")

    out = expr()
    if pos != len(toks):
        raise OrderParseError(f"trailing input in {s!r}")
    return out


def parse_omatrix(rows):
    return [[parse_oexpr(e) for e in row] for row in rows]


def omat_mul(A, B):
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), OElem())
             for j in range(len(B[0]))] for i in range(len(A))]


def omat_conj_transpose(A, involution):
    return [[involution(A[j][i]) for j in range(len(A))] for i in range(len(A[0]))]


def canonical_involution(x: OElem) -> OElem:
    """Rosati involution: reverses words and sends each generator to its dual.

    F -> -F (F^2 = -p so F + F^dual = 0), i -> -i, sqrtm2 -> -sqrtm2,
    zeta3 -> zeta3^2 = -1 - zeta3.
    """
    out = OElem()
    for w, c in x.terms.items():
        acc = OElem.const(c)
        for g in reversed(w):
            if g == "zeta3":
                acc = acc * (OElem.const(-1) - OElem.gen("zeta3"))
            else:
                acc = acc * (-OElem.gen(g))
        out = out + acc
    return out


def standard_relations(p: int, gens):
    """Defining relations of the order generated by Frobenius and a CM unit.

    Given as (lhs, rhs) pairs whose left sides are two-letter words; they form a
    terminating rewriting system (words sort towards the CM unit first).
    """
    rels = [("FF", f"-{p}")]
    if "i" in gens:
        rels += [("ii", "-1"), ("Fi", "-iF")]
    if "zeta3" in gens:
        rels += [("zeta3 zeta3", "-1 - zeta3"), ("F zeta3", "-F - zeta3 F")]
    return rels


def _rules(relations):
    rules = {}
    for lhs, rhs in relations:
        L = parse_oexpr(lhs)
        if len(L.terms) != 1:
            raise OrderParseError(f"relation left side {lhs!r} must be a single word")
        (word, c), = L.terms.items()
        if len(word) != 2 or c != 1:
            raise OrderParseError(f"relation left side {lhs!r} must be a two-letter word")
        rules[word] = parse_oexpr(rhs)
    return rules


def reduce_oelem(x, relations) -> OElem:
    """Normal form of x modulo the given relations."""
    rules = _rules(relations)
    x = parse_oexpr(x)
    for _ in range(10_000):
        out, changed = OElem(), False
        for w, c in x.terms.items():
            for k in range(len(w) - 1):
                rhs = rules.get(w[k:k + 2])
                if rhs is not None:
                    out = out + OElem({w[:k]: 1}) * rhs * OElem({w[k + 2:]: c})
                    changed = True
                    break
            else:
                out = out + OElem({w: c})
        x = out
        if not changed:
            return x
    raise OrderParseError("rewriting did not terminate")


def oelem_equal(x, y, relations) -> bool:
    return reduce_oelem(parse_oexpr(x) - parse_oexpr(y), relations).is_zero()
