"""End-to-end computation of theta nullvalues from a problem description."""
from __future__ import annotations

import itertools
import json
import logging
import random
import time
from dataclasses import dataclass, field

from .dieudonne import (DieudonneError, DieudonneModule, WnK, is_maximal_isotropic, kernel_for,
                        kernel_module, psi_extend, sigma_of, standard_psi)
from .ecurve import (CDDivisor, Curve, CurveError, eg_neg, normalizing_point, rational_equiv_translate,
                     torsion_frame, TorsionFrame)
from .ffield import FieldDesc, FieldError, embed_map, make_field
from .linalg import proportional
from .order import OrderParseError, parse_omatrix, parse_oexpr
from .sections import (Doubled, Prod, SectionError, SubgroupPart, build_section_space,
                       comodule_on_sections, invariant_section, level_functions, level_word,
                       relating_function, rho2_and_eval)
from .thetanull import (ThetaConstants, ThetaError, ThetaNullpoint, fourier_theta, labels, odd_labels,
                        rosenhain_g2, squares_from_level2, vanishing_profile)

log = logging.getLogger(__name__)


class ValidationError(ValueError):
    """The configuration is rejected before any function-field work."""


class PipelineError(RuntimeError):
    """A stage failed; ``partial`` holds whatever intermediate data was computed."""

    def __init__(self, msg: str, partial: dict | None = None):
        super().__init__(msg)
        self.partial = partial or {}


# --- configuration ---------------------------------------------------------------------------

@dataclass
class ProblemConfig:
    p: int
    k: int
    modulus: list | None
    curve: tuple
    H: list
    n: int
    divisors: list
    MH: list
    reference: int = -1
    mode: str = "full"
    seed: int = 1
    qtable: bool = True
    threads: int = 1
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemConfig":
        try:
            fd = d["field"]
            opts = d.get("options", {})
            return cls(
                p=int(fd["p"]), k=int(fd.get("k", 1)), modulus=fd.get("modulus"),
                curve=(d["curve"]["a"], d["curve"]["b"]), H=d["H"], n=int(d.get("n", 1)),
                divisors=d["divisors"], MH=d["M_H"], reference=int(d.get("reference", -1)),
                mode=opts.get("mode", "full"), seed=int(opts.get("seed", 1)),
                qtable=bool(opts.get("qtable", True)), threads=int(opts.get("threads", 1)), raw=d,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ProblemConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class Problem:
    """Validated data derived from a config."""

    F: FieldDesc
    E: Curve
    H: list
    W: WnK
    amb: object
    ker: DieudonneModule
    psi: object
    psiH: list
    MH: DieudonneModule
    divisors: list
    subs: list


def _felem(F: FieldDesc, v) -> int:
    return F.elem(v).v


def validate(cfg: ProblemConfig) -> Problem:
    """Run every upstream validation; raise ValidationError on the first failure."""
    try:
        F = make_field(cfg.p, cfg.k, tuple(cfg.modulus) if cfg.modulus else None)
        E = Curve(F, _felem(F, cfg.curve[0]), _felem(F, cfg.curve[1]))
        if "F" in E.generators() and not E.frobenius_check(samples=20):
            raise ValidationError("curve is not supersingular with F^2 = -p")
        rels = E.relations()
        H = parse_omatrix(cfg.H)
        if cfg.n != 1:
            raise ValidationError("only n = 1 is supported (points of alpha_p via the formal parameter)")
        W = WnK(F, cfg.n)
        u_i = E.sqrt_minus_one if "i" in E.generators() else None
        zeta = E.cube_root_of_unity if "zeta3" in E.generators() else None

        def builder(W_):
            return standard_psi(W_, u_i=u_i, zeta=zeta, relations=rels)

        psi = builder(W)
        amb, ker = kernel_for(W, len(H), builder, H)
        psiH = psi_extend(psi, H)
        gens = [amb.canon(tuple(tuple(_felem(F, c) for c in wv) for wv in gen)) for gen in cfg.MH]
        MH = DieudonneModule(amb, gens)
        if not is_maximal_isotropic(MH, ker, psiH):
            raise ValidationError("M(H) is not maximal isotropic")
        divisors = [CDDivisor.from_config(d["rows"], d.get("exps")) for d in cfg.divisors]
        for D in divisors:
            if not D.induces(H, E.p, rels):
                raise ValidationError("a divisor does not induce the polarization H")
        subs = []
        for D in divisors:
            rows = [[_fpow(n) * e for e in row] for row, n in zip(D.rows, D.exps)]
            subs.append(kernel_module(amb, psi_extend(psi, rows)))
        for g in MH.gens:
            sigma_of(subs, g)
    except (FieldError, CurveError, DieudonneError, OrderParseError) as exc:
        raise ValidationError(str(exc)) from exc
    return Problem(F, E, H, W, amb, ker, psi, psiH, MH, divisors, subs)


def _fpow(n: int):
    x = parse_oexpr("1")
    for _ in range(n):
        x = x * parse_oexpr("F")
    return x


# --- the computation --------------------------------------------------------------------------

@dataclass
class RunResult:
    F: FieldDesc
    g: int
    theta: ThetaConstants
    q: ThetaNullpoint | None
    profile: set
    rosenhain: tuple | None
    supersingular: bool | None
    timings: dict
    diagnostics: dict

    def to_json(self, cfg: ProblemConfig | None = None, timings: bool = False) -> dict:
        """Serializable result; wall-clock timings are opt-in so identical runs give identical JSON."""
        F = self.F

        def enc(v):
            return list(F.coords(v))

        out = {
            "config": cfg.raw if cfg else None,
            "field": F.to_json(),
            "theta": {_lab(a, b): enc(v) for (a, b), v in sorted(self.theta.table.items())},
            "theta_squares_only": self.theta.squares,
            "q": None if self.q is None else
            {",".join(map(str, x)): enc(v) for x, v in sorted(self.q.values.items())},
            "q_level": None if self.q is None else self.q.N,
            "vanishing_profile": sorted(_lab(a, b) for a, b in self.profile),
            "rosenhain": None if self.rosenhain is None else [enc(v) for v in self.rosenhain],
            "supersingular": self.supersingular,
            "diagnostics": self.diagnostics,
        }
        if timings:
            out["timings"] = self.timings
        return out


def _enc_point(F: FieldDesc, T):
    if T is None:
        return "O"
    return [list(F.coords(c)) for c in T]


def _lab(a, b):
    return "".join(map(str, a)) + "|" + "".join(map(str, b))


@dataclass
class Stage:
    """Intermediate data shared by both routes."""

    prob: Problem
    frame: TorsionFrame
    D: CDDivisor
    S: object
    rhoH: object
    rhoH_vec: list
    comod: object


def prepare(prob: Problem, cfg: ProblemConfig, timings: dict) -> Stage:
    E, F, H = prob.E, prob.F, prob.H
    rng = random.Random(cfg.seed)
    t = time.perf_counter()
    frame = torsion_frame(E, H, 4)
    Dref = prob.divisors[cfg.reference]
    P = normalizing_point(E, Dref, frame)
    D = Dref.translate(E, eg_neg(E, P))
    timings["frame"] = time.perf_counter() - t

    t = time.perf_counter()
    target = E.p ** (prob.ker.length // 2)
    S = build_section_space(E, D, 1, cfg.n, target, rng)
    timings["sections"] = time.perf_counter() - t

    t = time.perf_counter()
    oracle = lambda Dp, _D: relating_function(E, S, Dp, rng)
    parts, avoid = [], []
    sig = [sigma_of(prob.subs, m) for m in prob.MH.gens]
    for i, Di in enumerate(prob.divisors):
        Pi, ri = rational_equiv_translate(E, Di, D, H, oracle)
        avoid.append(Di.translate(E, Pi))
        coeffs = [[sig[j][i][2 * l][0] for l in range(D.g)] for j in range(len(sig))]
        parts.append(SubgroupPart(ri, coeffs))
    comod = comodule_on_sections(E, S, parts, avoid, rng)
    vec, rhoH = invariant_section(S, comod)
    for start in _starts(S.dim, rng):
        other, _ = invariant_section(S, comod, start)
        if not proportional(F, vec, other):
            raise PipelineError("invariant section depends on the starting vector")
    timings["invariant_section"] = time.perf_counter() - t
    return Stage(prob, frame, D, S, rhoH, vec, comod)


def _starts(dim, rng, count=3):
    out = []
    while len(out) < count:
        v = [rng.randrange(0, 3) for _ in range(dim)]
        if any(v):
            out.append(v)
    return out


def theta_full(st: Stage, cfg: ProblemConfig, timings: dict):
    """theta_{a,b} = ev_0(U_{v_b} U_{v_a}(rho_2 [2]^* rho_H)), and optionally q_{L^4}."""
    E, F, D = st.prob.E, st.prob.F, st.D
    g = D.g
    t = time.perf_counter()
    levs = level_functions(E, st.frame, D)
    r2, ev = rho2_and_eval(E, D)
    base = Prod([(r2, 1), (Doubled(st.rhoH), 1)])

    def value(a, b):
        word = [f"y{i + 1}" for i in range(g) for _ in range(b[i] % 4)]
        word += [f"x{i + 1}" for i in range(g) for _ in range(a[i] % 4)]
        return ev(level_word(levs, word, base), 4, random.Random(cfg.seed))

    labs = labels(g)
    table = dict(zip(labs, _map(cfg.threads, lambda ab: value(*ab), labs)))
    timings["theta"] = time.perf_counter() - t
    theta = ThetaConstants(F, g, table)
    q = None
    if cfg.qtable:
        t = time.perf_counter()
        q = level4_nullpoint(F, g, st.frame.zeta, value)
        timings["q"] = time.perf_counter() - t
    return theta, q


def _map(threads: int, fn, items):
    """map in input order, on a thread pool when threads > 1."""
    if threads <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def level4_nullpoint(F: FieldDesc, g: int, zeta: int, value) -> ThetaNullpoint:
    """Invert T(a, b) = sum_{c = a mod 2} zeta^{c.b} q(c) over b in Z_4^g."""
    bits = list(itertools.product((0, 1), repeat=g))
    Z4 = list(itertools.product(range(4), repeat=g))
    inv4g = F.inv(F.from_int(4 ** g))
    vals = {}
    for a in bits:
        T = {b: value(a, b) for b in Z4}
        for c in Z4:
            if any((x - y) % 2 for x, y in zip(c, a)):
                continue
            s = 0
            for b in Z4:
                e = (-sum(x * y for x, y in zip(c, b))) % 4
                s = F.add(s, F.mul(F.pow(zeta, e), T[b]))
            vals[c] = F.mul(inv4g, s)
    return ThetaNullpoint(F, 4, g, vals)


def level2_frame(E: Curve, fr: TorsionFrame) -> TorsionFrame:
    """The level 2 frame (2x_i, 2y_i) with halving points x_i, y_i."""
    dbl = lambda P: tuple(E.mul(2, c) for c in P)
    return TorsionFrame(2, E.F.neg(1), [dbl(x) for x in fr.xs], [dbl(y) for y in fr.ys],
                        list(fr.xs), list(fr.ys), fr.coords_x, fr.coords_y)


def theta_squares(st: Stage, cfg: ProblemConfig, timings: dict):
    """Squares via the level 2 nullpoint of rho_H^2."""
    E, F, D = st.prob.E, st.prob.F, st.D
    g = D.g
    t = time.perf_counter()
    fr2 = level2_frame(E, st.frame)
    levs = level_functions(E, fr2, D)
    _, ev = rho2_and_eval(E, D)
    sq = Prod([(st.rhoH, 2)])
    bits = list(itertools.product((0, 1), repeat=g))
    ys = [[f"y{i + 1}" for i in range(g) if b[i]] for b in bits]
    from .sections import Lin
    s0 = Lin([(1, level_word(levs, w, sq)) for w in ys])
    vals = {}
    for x in bits:
        w = [f"x{i + 1}" for i in range(g) if x[i]]
        vals[x] = ev(level_word(levs, w, s0), 2, random.Random(cfg.seed))
    q2 = ThetaNullpoint(F, 2, g, vals)
    timings["squares"] = time.perf_counter() - t
    return squares_from_level2(q2), q2


def run_pipeline(cfg: ProblemConfig, prob: Problem | None = None) -> RunResult:
    timings, diag = {}, {}
    t0 = time.perf_counter()
    prob = prob or validate(cfg)
    timings["validate"] = time.perf_counter() - t0
    try:
        st = prepare(prob, cfg, timings)
        F, g = prob.F, st.D.g
        diag["divisor_targets"] = [_enc_point(F, T) for T in st.D.targets()]
        diag["section_dim"] = st.S.dim
        diag["shuffle_factor"] = repr(st.comod.shuffle)
        diag["rho_H"] = [list(F.coords(c)) for c in st.rhoH_vec]
        if cfg.mode == "squares":
            theta, q = theta_squares(st, cfg, timings)
        elif cfg.mode == "full":
            theta, q = theta_full(st, cfg, timings)
            if q is not None:
                check = fourier_theta(q, prob.E.sqrt_minus_one)
                diag["fourier_matches_direct"] = _projective_equal(F, check.table, theta.table)
        else:
            raise ValidationError(f"unknown mode {cfg.mode!r}")
    except (SectionError, ThetaError, CurveError, DieudonneError) as exc:
        raise PipelineError(f"{type(exc).__module__.split('.')[-1]}: {exc}",
                            {"diagnostics": diag, "timings": timings}) from exc
    odd = odd_labels(g)
    if any(theta.table[lab] for lab in odd):
        raise PipelineError("thetanull: parity vanishing fails", {"diagnostics": diag})
    profile = vanishing_profile(theta) | odd
    theta = theta.normalized()
    lams = ss = None
    if g == 2 and not (profile - odd):
        lams = rosenhain_g2(theta if theta.squares else theta.squared())
        ss = verify_supersingular(F, hyperelliptic_from_rosenhain(F, lams))
    timings["total"] = time.perf_counter() - t0
    return RunResult(F, g, theta, q, profile, lams, ss, timings, diag)


def _projective_equal(F, t1: dict, t2: dict) -> bool:
    keys = sorted(t1)
    ref = next((k for k in keys if t1[k]), None)
    if ref is None or not t2[ref]:
        return False
    s = F.div(t2[ref], t1[ref])
    return all(F.mul(s, t1[k]) == t2[k] for k in keys)


# --- supersingularity oracle --------------------------------------------------------------------

def hyperelliptic_from_rosenhain(F: FieldDesc, lams):
    """Coefficients (low to high) of x (x - 1)(x - l1)(x - l2)(x - l3)."""
    poly = [0, 1]
    for r in (1, *lams):
        nr = F.neg(r)
        new = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            new[i + 1] = F.add(new[i + 1], c)
            new[i] = F.add(new[i], F.mul(nr, c))
        poly = new
    return poly


def _peval(F, poly, x):
    acc = 0
    for c in reversed(poly):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _count(F: FieldDesc, poly) -> int:
    """Points of y^2 = f(x) on the smooth model (deg f odd: one point at infinity)."""
    n = 0
    for x in F.elements():
        v = _peval(F, poly, x)
        n += 1 if v == 0 else (2 if F.is_square(v) else 0)
    return n + (1 if len(poly) % 2 == 0 else (2 if F.is_square(poly[-1]) else 0))


def _vp(n: int, p: int) -> float:
    if n == 0:
        return float("inf")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def lpolynomial_g2(F: FieldDesc, poly):
    """(a1, a2) of L(T) = 1 + a1 T + a2 T^2 + q a1 T^3 + q^2 T^4 by point counting over F_q, F_{q^2}."""
    q = F.q
    if len(poly) - 1 not in (5, 6):
        raise ValueError("need a genus 2 model of degree 5 or 6")
    _check_squarefree(F, poly)
    F2 = make_field(F.p, 2 * F.k)
    emb = embed_map(F, F2)
    poly2 = [emb[c] for c in poly]
    N1, N2 = _count(F, poly), _count(F2, poly2)
    a1 = N1 - q - 1
    a2 = (N2 - q * q - 1 + a1 * a1) // 2
    return a1, a2


def _check_squarefree(F: FieldDesc, poly):
    if _poly_gcd_degree(F, poly, _deriv(F, poly)) > 0:
        raise ValueError("singular model: f has a repeated root")


def _deriv(F, poly):
    return [F.mul(F.from_int(i), c) for i, c in enumerate(poly)][1:]


def _poly_gcd_degree(F, a, b):
    def trim(u):
        u = list(u)
        while u and u[-1] == 0:
            u.pop()
        return u
    a, b = trim(a), trim(b)
    while b:
        inv = F.inv(b[-1])
        while len(a) >= len(b) and a:
            c = F.mul(a[-1], inv)
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[i + shift] = F.sub(a[i + shift], F.mul(c, bc))
            a = trim(a)
        a, b = b, a
    return len(a) - 1


def verify_supersingular(F: FieldDesc, poly) -> bool:
    """All Frobenius slopes equal 1/2 (Newton polygon of the L-polynomial)."""
    a1, a2 = lpolynomial_g2(F, poly)
    vq = F.k
    p = F.p
    return 2 * _vp(a1, p) >= vq and _vp(a2, p) >= vq
