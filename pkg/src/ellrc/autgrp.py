"""Automorphisms fixing the infinite point, translation maps, the combined
group T_H * A, the generator z of its fixed field, and completely split fibers.

An automorphism is stored as the affine pair x -> c1*x + c2, y -> c3*y + c4*x
+ c5.  The catalog covers the families the constructions use: order 6 for
y^2 = x^3 + b in odd characteristic, order 4 for y^2 = x^3 + a*x, the full
24-element group of y^2 + y = x^3 in characteristic 2, and plain negation for
everything else.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import linalg
from .curve import Curve, Pt, add_points, torsion_subgroup
from .errors import (
    InvariantSpaceDimension,
    NoSuchRoot,
    NotASubgroup,
    NotAnEndomorphism,
    UnsupportedFamily,
)
from .ffield import Felt, FieldCtx, find_root_of_unity, solve_quadratic
from .funcfield import (
    Func,
    const_func,
    evaluate,
    evaluate_many,
    riemann_roch_basis,
    valuation,
    x_func,
    y_func,
)


class AutoMap:
    """x -> c1*x + c2, y -> c3*y + c4*x + c5, fixing the infinite point."""

    __slots__ = ("c1", "c2", "c3", "c4", "c5")

    def __init__(self, c1: Felt, c2: Felt, c3: Felt, c4: Felt, c5: Felt):
        if c1.is_zero() or c3.is_zero():
            raise NotAnEndomorphism("automorphism must be invertible")
        self.c1, self.c2, self.c3, self.c4, self.c5 = c1, c2, c3, c4, c5

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "AutoMap":
        one, zero = ctx.one(), ctx.zero()
        return cls(one, zero, one, zero, zero)

    def is_identity(self) -> bool:
        return (
            self.c1 == self.c1.ctx.one()
            and self.c3 == self.c1.ctx.one()
            and self.c2.is_zero()
            and self.c4.is_zero()
            and self.c5.is_zero()
        )

    def apply(self, P: Pt) -> Pt:
        if P.inf:
            return P
        return Pt.affine(self.c1 * P.x + self.c2, self.c3 * P.y + self.c4 * P.x + self.c5)

    def compose(self, other: "AutoMap") -> "AutoMap":
        """self after other: (self o other)(P) = self(other(P))."""
        # x -> c1(c1' x + c2') + c2 ; y -> c3(c3' y + c4' x + c5') + c4(c1' x + c2') + c5
        return AutoMap(
            self.c1 * other.c1,
            self.c1 * other.c2 + self.c2,
            self.c3 * other.c3,
            self.c3 * other.c4 + self.c4 * other.c1,
            self.c3 * other.c5 + self.c4 * other.c2 + self.c5,
        )

    def inverse(self) -> "AutoMap":
        i1 = self.c1.inverse()
        i3 = self.c3.inverse()
        c4 = -(i3 * self.c4 * i1)
        return AutoMap(i1, -(i1 * self.c2), i3, c4, i3 * self.c4 * i1 * self.c2 - i3 * self.c5)

    def key(self) -> Tuple:
        ctx = self.c1.ctx
        return tuple(ctx.serial_key(c) for c in (self.c1, self.c2, self.c3, self.c4, self.c5))

    def __eq__(self, other):
        return isinstance(other, AutoMap) and all(
            getattr(self, s) == getattr(other, s) for s in ("c1", "c2", "c3", "c4", "c5")
        )

    def __hash__(self):
        return hash((self.c1.v, self.c2.v, self.c3.v, self.c4.v, self.c5.v))

    def maps(self, C: Curve) -> Tuple[Func, Func]:
        """(xmap, ymap) as functions on the curve."""
        x, y = x_func(C), y_func(C)
        xm = x.scale(self.c1) + const_func(C, self.c2)
        ym = y.scale(self.c3) + x.scale(self.c4) + const_func(C, self.c5)
        return xm, ym

    def validate(self, C: Curve) -> None:
        xm, ym = self.maps(C)
        a1, a2, a3, a4, a6 = C.coeff_list()
        lhs = ym * ym + (xm.scale(a1) + const_func(C, a3)) * ym
        rhs = ((xm + const_func(C, a2)) * xm + const_func(C, a4)) * xm + const_func(C, a6)
        if not (lhs - rhs).is_zero():
            raise NotAnEndomorphism("map does not preserve the curve equation")

    def __repr__(self):
        r = self.c1.ctx.render
        return f"AutoMap(x->{r(self.c1)}*x+{r(self.c2)}, y->{r(self.c3)}*y+{r(self.c4)}*x+{r(self.c5)})"


def negation_map(C: Curve) -> AutoMap:
    ctx = C.ctx
    return AutoMap(ctx.one(), ctx.zero(), -ctx.one(), -C.a1, -C.a3)


def aut_catalog(C: Curve) -> List[AutoMap]:
    """The full automorphism group fixing the infinite point, for the
    supported families; always contains at least {id, negation}."""
    ctx = C.ctx
    a1, a2, a3, a4, a6 = C.coeff_list()
    zero, one = ctx.zero(), ctx.one()
    out: List[AutoMap] = []
    if ctx.p == 2 and a1.is_zero() and a2.is_zero() and a3 == one and a4.is_zero() and a6.is_zero():
        # y^2 + y = x^3: x -> a*x + a*d^2, y -> y + d*x + e with a^3 = 1,
        # d^4 = d, e^2 + e = d^3
        cubics = sorted((u for u in ctx.elements() if not u.is_zero() and u ** 3 == one), key=ctx.serial_key)
        quarts = sorted((d for d in ctx.elements() if d ** 4 == d), key=ctx.serial_key)
        for a in cubics:
            for d in quarts:
                for e in sorted(solve_quadratic(ctx, one, one, -(d ** 3)), key=ctx.serial_key):
                    out.append(AutoMap(a, a * d * d, one, d, e))
        if len(out) != 24:
            raise UnsupportedFamily("characteristic-2 catalog has unexpected size")
        return out
    order = 2
    if ctx.p not in (2, 3):
        if a1.is_zero() and a2.is_zero() and a3.is_zero():
            if a4.is_zero() and not a6.is_zero() and (ctx.q - 1) % 6 == 0:
                order = 6
            elif a6.is_zero() and not a4.is_zero() and (ctx.q - 1) % 4 == 0:
                order = 4
    if order > 2:
        try:
            u = find_root_of_unity(ctx, order)
        except NoSuchRoot:
            order = 2
            u = None
        if order > 2:
            for k in range(order):
                uk = u ** k
                out.append(AutoMap(uk * uk, zero, uk * uk * uk, zero, zero))
            return out
    return [AutoMap.identity(ctx), negation_map(C)]


def close_under_composition(maps: Sequence[AutoMap], ctx: FieldCtx) -> List[AutoMap]:
    """Subgroup generated by the given maps, in deterministic key order."""
    group = {AutoMap.identity(ctx)}
    frontier = list(maps)
    while frontier:
        g = frontier.pop()
        if g in group:
            continue
        group.add(g)
        for h in list(group):
            for comp in (g.compose(h), h.compose(g)):
                if comp not in group:
                    frontier.append(comp)
    return sorted(group, key=AutoMap.key)


def translation_maps(C: Curve, Q: Pt) -> Tuple[Func, Func]:
    """Coordinates of P + Q as rational functions of P = (x, y)."""
    x, y = x_func(C), y_func(C)
    if Q.inf:
        return x, y
    a1, a2, a3, a4, a6 = C.coeff_list()
    x0, y0 = const_func(C, Q.x), const_func(C, Q.y)
    lam = (y - y0) / (x - x0)
    nu = y - lam * x
    xm = lam * lam + lam.scale(a1) - const_func(C, a2) - x - x0
    ym = -(lam + const_func(C, a1)) * xm - nu - const_func(C, a3)
    return xm, ym


class GroupSpec:
    """The group generated by translations by H and the automorphisms A,
    acting as P -> sigma(P) + Q for each element (Q, sigma)."""

    def __init__(self, C: Curve, H: List[Pt], A: List[AutoMap]):
        self.C = C
        self.H = H
        self.A = A
        self.elements: List[Tuple[Pt, AutoMap]] = [(Q, s) for Q in H for s in A]

    @property
    def order(self) -> int:
        return len(self.elements)

    def apply(self, elem: Tuple[Pt, AutoMap], P: Pt) -> Pt:
        Q, s = elem
        return add_points(self.C, s.apply(P), Q)

    def orbit(self, P: Pt) -> List[Pt]:
        seen = []
        have = set()
        for elem in self.elements:
            R = self.apply(elem, P)
            if R not in have:
                have.add(R)
                seen.append(R)
        return sorted(seen, key=Pt.key)


def make_group(C: Curve, H: List[Pt], A: Sequence[AutoMap]) -> GroupSpec:
    ctx = C.ctx
    Hset = set(H)
    if Pt.infinity() not in Hset:
        raise NotASubgroup("H must contain the infinite point")
    for P in Hset:
        for Q in Hset:
            if add_points(C, P, Q) not in Hset:
                raise NotASubgroup("H is not closed under addition")
    A = list(A)
    ident = AutoMap.identity(ctx)
    if ident not in A:
        raise NotASubgroup("A must contain the identity map")
    Aset = set(A)
    for s in A:
        s.validate(C)
        for t in A:
            if s.compose(t) not in Aset:
                raise NotASubgroup("A is not closed under composition")
    for s in A:
        for Q in Hset:
            if s.apply(Q) not in Hset:
                raise NotASubgroup("automorphisms must stabilize H (closure condition)")
    # H ordered with infinity last, A in deterministic key order with id first
    Hord = sorted((P for P in Hset if not P.inf), key=Pt.key) + [Pt.infinity()]
    Aord = [ident] + [s for s in sorted(Aset, key=AutoMap.key) if not s.is_identity()]
    return GroupSpec(C, Hord, Aord)


def _sample_places(C: Curve, G: GroupSpec, count: int) -> List[Pt]:
    """Rational places whose full G-orbit avoids H (so every basis function
    and every composed copy is finite there)."""
    Hset = set(G.H)
    out = []
    for P in C.points():
        if P in Hset:
            continue
        orbit = {G.apply(e, P) for e in G.elements}
        if orbit & Hset:
            continue
        out.append(P)
        if len(out) >= count:
            break
    return out


def fixed_field_generator(C: Curve, G: GroupSpec) -> Func:
    """The degree-|G| generator z of the fixed field, with pole divisor
    |A| * sum of H; found as the invariant subspace of L(|A| sum H)."""
    ctx = C.ctx
    nA = len(G.A)
    W = riemann_roch_basis(C, [(P, nA) for P in G.H])
    dim = len(W)
    S = _sample_places(C, G, dim + 4)
    if len(S) < dim + 1:
        raise InvariantSpaceDimension("not enough sample places clear of the pole set")
    B = np.asarray([[evaluate(g, P).v for g in W] for P in S], dtype=np.int64)
    stacked = []
    for elem in G.elements:
        if elem[0].inf and elem[1].is_identity():
            continue
        imgs = [G.apply(elem, P) for P in S]
        Bg = np.asarray([[evaluate(g, P).v for g in W] for P in imgs], dtype=np.int64)
        M = linalg.solve(ctx, B, Bg)  # columns: coordinates of basis_j o elem
        MI = linalg.arr_sub(ctx, M, np.eye(dim, dtype=np.int64))
        stacked.append(MI)
    if not stacked:
        raise InvariantSpaceDimension("group is trivial")
    K = linalg.nullspace(ctx, np.concatenate(stacked, axis=0))
    if K.shape[0] != 2:
        raise InvariantSpaceDimension(f"invariant subspace has dimension {K.shape[0]}, expected 2")
    one_coords = _coords_of_one(ctx, W, B, S)
    z_vec = None
    for row in K:
        if not _proportional(ctx, row, one_coords):
            z_vec = row
            break
    if z_vec is None:
        raise InvariantSpaceDimension("invariant subspace contains no nonconstant element")
    z = const_func(C, 0)
    for c, g in zip(z_vec, W):
        if c:
            z = z + g.scale(ctx.from_packed(int(c)))
    for P in G.H:
        if valuation(z, P) != -nA:
            raise InvariantSpaceDimension("generator does not have the required pole divisor")
    return z


def _coords_of_one(ctx, W, B, S) -> np.ndarray:
    ones = np.ones(len(S), dtype=np.int64)
    return linalg.solve(ctx, B, ones)


def _proportional(ctx, a: np.ndarray, b: np.ndarray) -> bool:
    nz = np.nonzero(b)[0]
    za = np.nonzero(a)[0]
    if len(nz) != len(za) or (nz != za).any():
        return False
    i = int(nz[0])
    s = ctx.mul_raw(int(a[i]), ctx.inv_raw(int(b[i])))
    return bool((linalg.arr_mul(ctx, b, s) == a).all())


class Fiber:
    __slots__ = ("alpha", "places")

    def __init__(self, alpha: Felt, places: List[Pt]):
        self.alpha = alpha
        self.places = places

    def __repr__(self):
        return f"Fiber(alpha={self.alpha.ctx.render(self.alpha)}, {len(self.places)} places)"


def split_fibers(C: Curve, G: GroupSpec, z: Func, exclude_torsion: bool = False) -> List[Fiber]:
    """Completely split fibers of z: the level sets of full size |G|, ordered
    by the serialization of the level value."""
    ctx = C.ctx
    Hset = set(G.H)
    pts = [P for P in C.points() if P not in Hset]
    vals = evaluate_many(z, pts)
    buckets: Dict[int, List[Pt]] = {}
    for P, a in zip(pts, vals):
        buckets.setdefault(a.v, []).append(P)
    full = [(ctx.from_packed(av), sorted(ps, key=Pt.key)) for av, ps in buckets.items() if len(ps) == G.order]
    if exclude_torsion:
        tor = set(torsion_subgroup(C, len(G.H)))
        full = [(a, ps) for a, ps in full if not (set(ps) & tor)]
    full.sort(key=lambda t: ctx.serial_key(t[0]))
    return [Fiber(a, ps) for a, ps in full]
