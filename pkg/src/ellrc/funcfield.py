"""Functions on an elliptic curve and their local behaviour.

A function is kept in the canonical form f = (u(x) + v(x)*y) / d(x) with
u, v, d univariate polynomials, gcd(gcd(u, v), d) = 1 and d monic, which makes
equality a coefficient comparison.  Valuations and evaluations at ramified or
infinite places go through truncated power series with adaptive precision.
The Riemann-Roch solver produces echelonized bases of L(D) for effective
divisors supported on rational places, which is all the code constructions
need (genus 1, so l(D) = deg D once deg D >= 1).
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import linalg
from .curve import Curve, Pt
from .errors import (
    DegenerateDivisor,
    DivisionByZero,
    NotAnEndomorphism,
    NotInSpace,
    PoleError,
    PrecisionExhausted,
    RankMismatch,
    StructureInconsistent,
    ZeroDenominator,
)
from .ffield import Felt, FieldCtx, solve_quadratic
from .poly import (
    Series,
    padd,
    pdeg,
    pdivmod,
    pgcd,
    pmonic,
    pmul,
    pneg,
    ppow,
    pscale,
    psub,
    ptrim,
    peval,
    from_roots,
)

_VAL_START = 8


def _coeff_list(ctx: FieldCtx, poly) -> List[int]:
    """Accept a list of Felt/int coefficients and return packed values."""
    out = []
    for c in poly:
        if isinstance(c, Felt):
            out.append(c.v)
        else:
            out.append(int(c) % ctx.p)
    return ptrim(out)


def _curve_polys(C: Curve) -> Tuple[List[int], List[int]]:
    """(R, S) with y^2 = R(x) + S(x)*y on the curve."""
    ctx = C.ctx
    R = ptrim([C.a6.v, C.a4.v, C.a2.v, ctx.one().v])
    S = ptrim([ctx.neg_raw(C.a3.v), ctx.neg_raw(C.a1.v)])
    return R, S


class Func:
    """f = (u(x) + v(x)*y) / d(x) in canonical form."""

    __slots__ = ("C", "u", "v", "d")

    def __init__(self, C: Curve, u: List[int], v: List[int], d: List[int]):
        self.C = C
        self.u = u
        self.v = v
        self.d = d

    @property
    def ctx(self) -> FieldCtx:
        return self.C.ctx

    def is_zero(self) -> bool:
        return not self.u and not self.v

    def __eq__(self, other):
        return (
            isinstance(other, Func)
            and self.u == other.u
            and self.v == other.v
            and self.d == other.d
        )

    def __hash__(self):
        return hash((tuple(self.u), tuple(self.v), tuple(self.d)))

    def __add__(self, other: "Func") -> "Func":
        ctx = self.ctx
        u = padd(ctx, pmul(ctx, self.u, other.d), pmul(ctx, other.u, self.d))
        v = padd(ctx, pmul(ctx, self.v, other.d), pmul(ctx, other.v, self.d))
        return _normalize(self.C, u, v, pmul(ctx, self.d, other.d))

    def __sub__(self, other: "Func") -> "Func":
        ctx = self.ctx
        u = psub(ctx, pmul(ctx, self.u, other.d), pmul(ctx, other.u, self.d))
        v = psub(ctx, pmul(ctx, self.v, other.d), pmul(ctx, other.v, self.d))
        return _normalize(self.C, u, v, pmul(ctx, self.d, other.d))

    def __neg__(self) -> "Func":
        ctx = self.ctx
        return Func(self.C, pneg(ctx, self.u), pneg(ctx, self.v), list(self.d))

    def __mul__(self, other: "Func") -> "Func":
        ctx = self.ctx
        R, S = _curve_polys(self.C)
        vv = pmul(ctx, self.v, other.v)
        u = padd(ctx, pmul(ctx, self.u, other.u), pmul(ctx, vv, R))
        v = padd(
            ctx,
            padd(ctx, pmul(ctx, self.u, other.v), pmul(ctx, other.u, self.v)),
            pmul(ctx, vv, S),
        )
        return _normalize(self.C, u, v, pmul(ctx, self.d, other.d))

    def inverse(self) -> "Func":
        if self.is_zero():
            raise DivisionByZero("inverse of the zero function")
        ctx = self.ctx
        R, S = _curve_polys(self.C)
        # conjugate of y is S(x) - y; the norm (u+vy)(u+vS-vy) lies in F_q[x]
        uc = padd(ctx, self.u, pmul(ctx, self.v, S))
        norm = psub(ctx, pmul(ctx, self.u, uc), pmul(ctx, pmul(ctx, self.v, self.v), R))
        return _normalize(
            self.C,
            pmul(ctx, self.d, uc),
            pneg(ctx, pmul(ctx, self.d, self.v)),
            norm,
        )

    def __truediv__(self, other: "Func") -> "Func":
        return self * other.inverse()

    def scale(self, s: Felt) -> "Func":
        return _normalize(
            self.C, pscale(self.ctx, self.u, s.v), pscale(self.ctx, self.v, s.v), list(self.d)
        )

    def pole_degree_bound(self) -> int:
        """Upper bound on -min_P v_P over all places (degree of pole divisor)."""
        du = pdeg(self.u)
        dv = pdeg(self.v)
        num = max(2 * du if du >= 0 else 0, 2 * dv + 3 if dv >= 0 else 0)
        return num + 2 * max(pdeg(self.d), 0)

    def __repr__(self):
        return render_func(self)


def render_func(f: Func) -> str:
    def plist(p):
        return "[" + ",".join(str(c) for c in p) + "]"

    return f"({plist(f.u)})/({plist(f.d)}) + ({plist(f.v)})/({plist(f.d)})*y"


def _normalize(C: Curve, u: List[int], v: List[int], d: List[int]) -> Func:
    ctx = C.ctx
    u, v, d = ptrim(list(u)), ptrim(list(v)), ptrim(list(d))
    if not d:
        raise ZeroDenominator("zero denominator")
    if not u and not v:
        return Func(C, [], [], [1])
    g = pgcd(ctx, pgcd(ctx, u, v), d)
    if pdeg(g) > 0:
        u = pdivmod(ctx, u, g)[0]
        v = pdivmod(ctx, v, g)[0]
        d = pdivmod(ctx, d, g)[0]
    if d[-1] != 1:
        inv = ctx.inv_raw(d[-1])
        u = pscale(ctx, u, inv)
        v = pscale(ctx, v, inv)
        d = pscale(ctx, d, inv)
    return Func(C, u, v, d)


def func_from(C: Curve, u, v, d) -> Func:
    ctx = C.ctx
    return _normalize(C, _coeff_list(ctx, u), _coeff_list(ctx, v), _coeff_list(ctx, d))


def x_func(C: Curve) -> Func:
    return Func(C, [0, 1], [], [1])


def y_func(C: Curve) -> Func:
    return Func(C, [], [1], [1])


def const_func(C: Curve, c) -> Func:
    cv = c.v if isinstance(c, Felt) else int(c) % C.ctx.p
    return Func(C, [cv] if cv else [], [], [1])


def func_eval_poly(C: Curve, coeffs: Sequence[int], g: Func) -> Func:
    """Polynomial (packed coefficients) evaluated at a function, by Horner."""
    acc = const_func(C, 0)
    for c in reversed(coeffs):
        acc = acc * g + const_func(C, C.ctx.from_packed(c))
    return acc


# --------------------------------------------------------------------------
# local expansions


def is_ramified(C: Curve, P: Pt) -> bool:
    """True when the place sits over its x-coordinate with ramification
    (the y-partial 2y + a1*x + a3 vanishes); the infinite place counts too."""
    if P.inf:
        return True
    return (2 * P.y + C.a1 * P.x + C.a3).is_zero()


class LocalExpansion:
    __slots__ = ("place", "tag", "series")

    def __init__(self, place: Pt, tag: str, series: Series):
        self.place = place
        self.tag = tag
        self.series = series

    @property
    def leading_exponent(self):
        return self.series.valuation()


def _newton(ctx: FieldCtx, coeffs: List[Series], start: int, prec: int) -> Series:
    """Solve sum_i coeffs[i] * U^i = 0 for the series U with U(0) = start,
    assuming the derivative is a unit at t = 0."""
    U = Series(ctx, 0, [start] + [0] * (prec - 1))
    deriv = [coeffs[i].scale(i % ctx.p) for i in range(1, len(coeffs))]
    steps = max(1, prec.bit_length() + 1)
    for _ in range(steps):
        F = Series.constant(ctx, 0, prec)
        for c in reversed(coeffs):
            F = F * U + c
        Fp = Series.constant(ctx, 0, prec)
        for c in reversed(deriv):
            Fp = Fp * U + c
        U = U - F * Fp.inverse()
        U = Series(ctx, 0, (U.c + [0] * prec)[:prec])
    return U


def base_series(C: Curve, P: Pt, prec: int) -> Tuple[Series, Series]:
    """Series for (x, y) in the fixed uniformizer at P, to >= prec terms."""
    cache: Dict = C.__dict__.setdefault("_series_cache", {})
    got = cache.get(P)
    if got is not None and got[0] >= prec:
        _, xs, ys = got
        return xs, ys
    ctx = C.ctx
    a1, a2, a3, a4, a6 = (c.v for c in C.coeff_list())
    if P.inf:
        # t = x/y; x = t^-2 * U, y = t^-3 * U with U a unit series, from
        # U^3 + (a2 t^2 - a1 t - 1) U^2 + (a4 t^4 - a3 t^3) U + a6 t^6 = 0
        def tpoly(pairs):
            n = max(k for k, _ in pairs) + 1 if pairs else 1
            c = [0] * max(n, 1)
            for k, val in pairs:
                c[k] = val
            return Series(ctx, 0, (c + [0] * prec)[:prec] if len(c) < prec else c[:prec])

        c2 = tpoly([(0, ctx.neg_raw(1)), (1, ctx.neg_raw(a1)), (2, a2)])
        c1 = tpoly([(3, ctx.neg_raw(a3)), (4, a4)])
        c0 = tpoly([(6, a6)])
        c3 = Series.constant(ctx, 1, prec)
        U = _newton(ctx, [c0, c1, c2, c3], 1, prec)
        xs = U.shifted(-2)
        ys = U.shifted(-3)
    elif not is_ramified(C, P):
        # t = x - alpha; lift y as a series from y^2 + b(t) y - r(t) = 0
        al, be = P.x.v, P.y.v
        xs = Series(ctx, 0, ([al, 1] + [0] * prec)[:prec])
        b = Series(ctx, 0, ([ctx.add_raw(ctx.mul_raw(a1, al), a3), a1] + [0] * prec)[:prec])
        rpoly = [a6, a4, a2, 1]
        r = Series.constant(ctx, 0, prec)
        for c in reversed(rpoly):
            r = r * xs + Series.constant(ctx, c, prec)
        ys = _newton(ctx, [-r, b, Series.constant(ctx, 1, prec)], be, prec)
    else:
        # ramified: t = y - beta; lift x from the cubic in x
        al, be = P.x.v, P.y.v
        ys = Series(ctx, 0, ([be, 1] + [0] * prec)[:prec])
        one = Series.constant(ctx, 1, prec)
        ysq = ys * ys
        c1 = Series.constant(ctx, a4, prec) - ys.scale(a1)
        c0 = Series.constant(ctx, a6, prec) - ysq - ys.scale(a3)
        xs = _newton(ctx, [c0, c1, Series.constant(ctx, a2, prec), one], al, prec)
    cache[P] = (prec, xs, ys)
    return xs, ys


def _poly_at(ctx: FieldCtx, coeffs: Sequence[int], s: Series, prec: int) -> Series:
    acc = Series.constant(ctx, 0, prec)
    for c in reversed(coeffs):
        acc = acc * s + Series.constant(ctx, c, prec)
    return acc


def _expand_parts(f: Func, P: Pt, prec: int) -> Tuple[Series, Series]:
    """Series of the numerator u + v*y and the denominator d at P."""
    ctx = f.ctx
    # at the infinite place every multiplication by x loses two exponents of
    # window, so over-provision the working precision
    pad = 2 * (max(pdeg(f.u), 0) + max(pdeg(f.v), 0) + max(pdeg(f.d), 0)) + 8
    work = prec + (pad if P.inf else 2)
    xs, ys = base_series(f.C, P, work)
    num = _poly_at(ctx, f.u, xs, work)
    if f.v:
        num = num + _poly_at(ctx, f.v, xs, work) * ys
    den = _poly_at(ctx, f.d, xs, work)
    return num, den


def local_expansion(f: Func, P: Pt, prec: int) -> LocalExpansion:
    if f.is_zero():
        return LocalExpansion(P, _tag(f.C, P), Series(f.ctx, 0, [0] * prec))
    num, den = _expand_parts(f, P, prec)
    if den.valuation() is None or num.valuation() is None:
        raise PrecisionExhausted(
            f"function vanishes to precision {prec} at {P}; retry with more terms"
        )
    ser = num * den.inverse()
    v = ser.valuation()
    keep = (v if v is not None else ser.shift) + prec
    return LocalExpansion(P, _tag(f.C, P), ser.truncate(keep))


def _tag(C: Curve, P: Pt) -> str:
    if P.inf:
        return "x/y"
    return "y-beta" if is_ramified(C, P) else "x-alpha"


def valuation(f: Func, P: Pt) -> int:
    if f.is_zero():
        raise DivisionByZero("valuation of the zero function")
    if P.inf:
        du, dv, dd = pdeg(f.u), pdeg(f.v), pdeg(f.d)
        vnum = min(
            -2 * du if du >= 0 else 10 ** 9,
            -2 * dv - 3 if dv >= 0 else 10 ** 9,
        )
        return vnum + 2 * dd
    bound = 4 * (max(pdeg(f.u), 0) + max(pdeg(f.v), 0) + max(pdeg(f.d), 0) + 6) + 64
    prec = _VAL_START
    while prec <= bound:
        num, den = _expand_parts(f, P, prec)
        vn, vd = num.valuation(), den.valuation()
        if vn is not None and vd is not None:
            return vn - vd
        prec *= 2
    raise PrecisionExhausted(f"valuation at {P} did not stabilize below precision {bound}")


def evaluate(f: Func, P: Pt) -> Felt:
    ctx = f.ctx
    if f.is_zero():
        return ctx.zero()
    if P.inf:
        v = valuation(f, P)
        if v < 0:
            raise PoleError("pole at the infinite place")
        if v > 0:
            return ctx.zero()
        du, dd = pdeg(f.u), pdeg(f.d)
        # valuation 0 forces the even (x-power) term to dominate
        if du >= 0 and du == dd:
            return ctx.from_packed(ctx.mul_raw(f.u[-1], ctx.inv_raw(f.d[-1])))
        ser = local_expansion(f, P, 2).series
        return ctx.from_packed(ser.coeff(0))
    dv = peval(ctx, f.d, P.x.v)
    if dv != 0:
        nv = ctx.add_raw(peval(ctx, f.u, P.x.v), ctx.mul_raw(peval(ctx, f.v, P.x.v), P.y.v))
        return ctx.from_packed(ctx.mul_raw(nv, ctx.inv_raw(dv)))
    # 0/0 or a genuine pole: decide by series
    prec = _VAL_START
    bound = 4 * (max(pdeg(f.u), 0) + max(pdeg(f.v), 0) + max(pdeg(f.d), 0) + 6) + 64
    while prec <= bound:
        num, den = _expand_parts(f, P, prec)
        vn, vd = num.valuation(), den.valuation()
        if vd is not None and (vn is not None or num.prec_end > vd):
            if vn is None or vn > vd:
                return ctx.zero()
            if vn < vd:
                raise PoleError(f"pole at {P}")
            return ctx.from_packed(ctx.mul_raw(num.coeff(vn), ctx.inv_raw(den.coeff(vd))))
        prec *= 2
    raise PrecisionExhausted(f"evaluation at {P} did not stabilize")


def evaluate_many(f: Func, pts: Sequence[Pt]) -> List[Felt]:
    """f at many points; vectorized over the ordinary affine ones."""
    ctx = f.ctx
    out: List = [None] * len(pts)
    xs, ys, idx = [], [], []
    for i, P in enumerate(pts):
        if P.inf or peval(ctx, f.d, P.x.v) == 0:
            out[i] = evaluate(f, P)
        else:
            xs.append(P.x.v)
            ys.append(P.y.v)
            idx.append(i)
    if idx:
        X = np.asarray(xs, dtype=np.int64)
        Y = np.asarray(ys, dtype=np.int64)
        num = linalg.poly_eval_many(ctx, f.u, X)
        if f.v:
            num = linalg.arr_add(ctx, num, linalg.arr_mul(ctx, linalg.poly_eval_many(ctx, f.v, X), Y))
        den = linalg.poly_eval_many(ctx, f.d, X)
        vals = linalg.arr_mul(ctx, num, linalg.arr_inv(ctx, den))
        for j, i in enumerate(idx):
            out[i] = ctx.from_packed(int(vals[j]))
    return out


def substitute(f: Func, xmap: Func, ymap: Func) -> Func:
    """f(xmap, ymap); the pair must satisfy the curve equation identically."""
    C = f.C
    a1, a2, a3, a4, a6 = C.coeff_list()
    lhs = ymap * ymap + (const_func(C, a1) * xmap + const_func(C, a3)) * ymap
    rhs = ((xmap + const_func(C, a2)) * xmap + const_func(C, a4)) * xmap + const_func(C, a6)
    if not (lhs - rhs).is_zero():
        raise NotAnEndomorphism("substitution maps do not satisfy the curve equation")
    num = func_eval_poly(C, f.u, xmap)
    if f.v:
        num = num + func_eval_poly(C, f.v, xmap) * ymap
    return num / func_eval_poly(C, f.d, xmap)


# --------------------------------------------------------------------------
# Riemann-Roch spaces


def divisor_deg(D: Sequence[Tuple[Pt, int]]) -> int:
    return sum(n for _, n in D)


def riemann_roch_basis(C: Curve, D: Sequence[Tuple[Pt, int]]) -> List[Func]:
    """Echelonized basis of L(D) for an effective divisor on rational places."""
    ctx = C.ctx
    if not D:
        raise DegenerateDivisor("empty divisor")
    seen = set()
    for P, n in D:
        if n <= 0:
            raise DegenerateDivisor("divisor must be effective with nonzero multiplicities")
        if P in seen:
            raise DegenerateDivisor("repeated place in divisor")
        seen.add(P)
        if not P.inf and not C.on_curve(P):
            raise DegenerateDivisor("place not on the curve")
    deg = divisor_deg(D)
    if deg < 1:
        raise DegenerateDivisor("degree must be at least 1")

    n_inf = sum(n for P, n in D if P.inf)
    finite = {P: n for P, n in D if not P.inf}
    # group demanded pole orders by x-coordinate
    by_alpha: Dict[int, Dict[Pt, int]] = {}
    for P, n in finite.items():
        by_alpha.setdefault(P.x.v, {})[P] = n
    alphas = sorted(by_alpha, key=lambda a: ctx.serial_key(ctx.from_packed(a)))

    one = ctx.one()
    dpoly: List[int] = [1]
    plan = []  # (alpha, m, [(place, e, n_P)])
    for a in alphas:
        entries = []
        m = 0
        al = ctx.from_packed(a)
        B = C.a1 * al + C.a3
        rhs = al * al * al + C.a2 * al * al + C.a4 * al + C.a6
        places = sorted(solve_quadratic(ctx, one, B, -rhs), key=ctx.serial_key)
        for yv in places:
            P = Pt.affine(al, yv)
            e = 2 if is_ramified(C, P) else 1
            nP = by_alpha[a].get(P, 0)
            need_m = nP if e == 1 else (nP + 1) // 2
            m = max(m, need_m)
            entries.append((P, e, nP))
        plan.append((a, m, entries))
        dpoly = pmul(ctx, dpoly, ppow(ctx, [ctx.neg_raw(a), 1], m))
    M = sum(m for _, m, _ in plan)

    du = (2 * M + n_inf) // 2
    dv = (2 * M + n_inf - 3) // 2
    nu = du + 1
    nv = dv + 1 if dv >= 0 else 0
    ncols = nu + nv

    rows: List[np.ndarray] = []
    for a, m, entries in plan:
        for P, e, nP in entries:
            need = m * e - nP
            if need <= 0:
                continue
            xs, ys = base_series(C, P, need + 2)
            xs = xs.truncate(need)
            ys = ys.truncate(need)
            cur = Series(ctx, 0, [1] + [0] * (need - 1))
            xpows = [cur]
            for _ in range(max(du, dv)):
                cur = cur * xs
                xpows.append(cur)
            ypows = [s * ys for s in xpows[: nv]] if nv else []
            for k in range(need):
                row = np.zeros(ncols, dtype=np.int64)
                for i in range(nu):
                    row[i] = xpows[i].coeff(k)
                for i in range(nv):
                    row[nu + i] = ypows[i].coeff(k)
                rows.append(row)

    if rows:
        A = np.stack(rows)
        basis_vecs = linalg.nullspace(ctx, A)
    else:
        basis_vecs = np.eye(ncols, dtype=np.int64)
    funcs = []
    for vec in basis_vecs:
        u = ptrim([int(c) for c in vec[:nu]])
        v = ptrim([int(c) for c in vec[nu:]])
        funcs.append(_normalize(C, u, v, dpoly))
    if len(funcs) != deg:
        raise RankMismatch(f"solver found dimension {len(funcs)}, expected {deg}")
    return funcs


def coordinates_in_space(f: Func, basis: Sequence[Func]) -> List[Felt]:
    """Coefficients of f in span(basis), via evaluations at sample places."""
    ctx = f.ctx
    C = f.C
    k = len(basis)
    samples: List[Pt] = []
    fvals: List[int] = []
    bvals: List[List[int]] = []
    for P in C.points():
        try:
            fv = evaluate(f, P)
            row = [evaluate(g, P) for g in basis]
        except PoleError:
            continue
        samples.append(P)
        fvals.append(fv.v)
        bvals.append([g.v for g in row])
        if len(samples) >= k + 4:
            break
    if len(samples) < k:
        raise StructureInconsistent("not enough pole-free places for coordinates")
    A = np.asarray(bvals, dtype=np.int64)
    b = np.asarray(fvals, dtype=np.int64)
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, pivots = linalg.rref(ctx, aug)
    if any(p == k for p in pivots):
        raise NotInSpace("inconsistent evaluation system")
    coeffs = [ctx.zero()] * k
    for r, p in enumerate(pivots):
        coeffs[p] = ctx.from_packed(int(R[r, k]))
    # cross-check by exact recombination
    acc = const_func(C, 0)
    for c, g in zip(coeffs, basis):
        acc = acc + g.scale(c)
    if acc != f:
        raise NotInSpace("recombination does not reproduce the function")
    return coeffs
