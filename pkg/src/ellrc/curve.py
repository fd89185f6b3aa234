"""Weierstrass elliptic curves over finite fields.

Long Weierstrass form y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6, with the
chord-tangent group law written so it is valid in characteristic 2 and 3 as
well.  Point enumeration, group structure, torsion subgroups and the special
curve/prime searches used by the code constructions all live here.
"""

from __future__ import annotations

from math import gcd, lcm
from typing import List, Optional, Tuple

from .errors import (
    FieldTooLarge,
    NoCurveFound,
    NoSuchSubgroup,
    NotASubgroup,
    SingularCurve,
    StructureInconsistent,
)
from .ffield import (
    Felt,
    FieldCtx,
    factorize,
    is_prime,
    make_extension,
    make_prime_field,
    solve_quadratic,
)

ENUM_LIMIT = 1 << 22


class Pt:
    """A rational point: either affine (x, y) or the point at infinity."""

    __slots__ = ("x", "y", "inf")

    def __init__(self, x: Optional[Felt], y: Optional[Felt], inf: bool = False):
        self.x = x
        self.y = y
        self.inf = inf

    @classmethod
    def infinity(cls) -> "Pt":
        return cls(None, None, True)

    @classmethod
    def affine(cls, x: Felt, y: Felt) -> "Pt":
        return cls(x, y, False)

    def __eq__(self, other):
        if not isinstance(other, Pt):
            return NotImplemented
        if self.inf or other.inf:
            return self.inf and other.inf
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        if self.inf:
            return hash(("pt", "inf"))
        return hash(("pt", self.x.v, self.y.v))

    def key(self):
        """Global ordering key: infinity first, then lexicographic serialization."""
        if self.inf:
            return (0,)
        return (1,) + self.x.ctx.serial_key(self.x) + self.y.ctx.serial_key(self.y)

    def __repr__(self):
        if self.inf:
            return "O"
        return f"({self.x.ctx.render(self.x)}; {self.y.ctx.render(self.y)})"


class Curve:
    def __init__(self, ctx: FieldCtx, a1: Felt, a2: Felt, a3: Felt, a4: Felt, a6: Felt):
        self.ctx = ctx
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        self._points: Optional[List[Pt]] = None
        self._structure: Optional[Tuple[int, int, Pt, Pt]] = None

    def coeff_list(self) -> List[Felt]:
        return [self.a1, self.a2, self.a3, self.a4, self.a6]

    def discriminant(self) -> Felt:
        a1, a2, a3, a4, a6 = self.coeff_list()
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return -(b2 * b2 * b8) - 8 * (b4 * b4 * b4) - 27 * (b6 * b6) + 9 * (b2 * b4 * b6)

    def on_curve(self, P: Pt) -> bool:
        if P.inf:
            return True
        x, y = P.x, P.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return lhs == rhs

    @property
    def N(self) -> int:
        return len(self.points())

    def points(self) -> List[Pt]:
        if self._points is None:
            self._points = enumerate_points(self)
        return self._points

    def __repr__(self):
        cs = ", ".join(self.ctx.render(c) for c in self.coeff_list())
        return f"Curve(q={self.ctx.q}; a1,a2,a3,a4,a6 = {cs})"


def make_curve(ctx: FieldCtx, a1, a2, a3, a4, a6) -> Curve:
    coeffs = [c if isinstance(c, Felt) else ctx.from_packed(0) + c for c in (a1, a2, a3, a4, a6)]
    C = Curve(ctx, *coeffs)
    if C.discriminant() == ctx.zero():
        raise SingularCurve("zero discriminant")
    return C


def neg_point(C: Curve, P: Pt) -> Pt:
    if P.inf:
        return P
    return Pt.affine(P.x, -P.y - C.a1 * P.x - C.a3)


def add_points(C: Curve, P: Pt, Q: Pt) -> Pt:
    if P.inf:
        return Q
    if Q.inf:
        return P
    a1, a2, a3, a4, a6 = C.coeff_list()
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if x1 == x2 and y2 == -y1 - a1 * x1 - a3:
        return Pt.infinity()
    if x1 == x2 and y1 == y2:
        den = 2 * y1 + a1 * x1 + a3
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        nu = (-(x1 * x1 * x1) + a4 * x1 + 2 * a6 - a3 * y1) / den
    else:
        den = x2 - x1
        lam = (y2 - y1) / den
        nu = (y1 * x2 - y2 * x1) / den
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return Pt.affine(x3, y3)


def sub_points(C: Curve, P: Pt, Q: Pt) -> Pt:
    return add_points(C, P, neg_point(C, Q))


def scalar_mul(C: Curve, n: int, P: Pt) -> Pt:
    if n < 0:
        return scalar_mul(C, -n, neg_point(C, P))
    R = Pt.infinity()
    base = P
    while n:
        if n & 1:
            R = add_points(C, R, base)
        base = add_points(C, base, base)
        n >>= 1
    return R


def point_order(C: Curve, P: Pt, bound: int) -> int:
    """Order of P given a multiple `bound` of it (e.g. N)."""
    if not scalar_mul(C, bound, P).inf:
        raise StructureInconsistent("bound is not a multiple of the point order")
    n = bound
    for ell, e in factorize(bound).items():
        for _ in range(e):
            if scalar_mul(C, n // ell, P).inf:
                n //= ell
            else:
                break
    return n


def enumerate_points(C: Curve) -> List[Pt]:
    ctx = C.ctx
    if ctx.q > ENUM_LIMIT:
        raise FieldTooLarge(f"point enumeration limited to q <= {ENUM_LIMIT}")
    one = ctx.one()
    pts = [Pt.infinity()]
    for x in ctx.elements():
        B = C.a1 * x + C.a3
        rhs = x * x * x + C.a2 * x * x + C.a4 * x + C.a6
        ys = solve_quadratic(ctx, one, B, -rhs)
        ys = sorted(ys, key=ctx.serial_key)
        for y in ys:
            pts.append(Pt.affine(x, y))
    return pts


def group_structure(C: Curve) -> Tuple[int, int, Pt, Pt]:
    """(n1, n2, g1, g2) with the point group = Z/n1 x Z/n2, n1 | n2."""
    if C._structure is not None:
        return C._structure
    pts = C.points()
    N = len(pts)
    # exponent = lcm of point orders; skip the order computation whenever the
    # running lcm already kills the point
    n2 = 1
    for P in pts:
        if scalar_mul(C, n2, P).inf:
            continue
        n2 = lcm(n2, point_order(C, P, N))
    if N % n2 != 0:
        raise StructureInconsistent("exponent does not divide the point count")
    n1 = N // n2
    if n2 % n1 != 0:
        raise StructureInconsistent("invariant factors fail n1 | n2")
    if n1 > 1 and (C.ctx.q - 1) % n1 != 0:
        raise StructureInconsistent("n1 does not divide q - 1")
    if sum(1 for P in pts if scalar_mul(C, n1, P).inf) != n1 * n1:
        raise StructureInconsistent("n1-torsion has wrong size")
    g2 = None
    for P in pts:
        if point_order(C, P, N) == n2:
            g2 = P
            break
    if g2 is None:
        raise StructureInconsistent("no point of maximal order")
    g1 = Pt.infinity()
    if n1 > 1:
        sub2 = set()
        Q = Pt.infinity()
        for _ in range(n2):
            sub2.add(Q)
            Q = add_points(C, Q, g2)
        for P in pts:
            if point_order(C, P, N) != n1:
                continue
            ok = True
            R = P
            for _ in range(n1 - 1):
                if R in sub2:
                    ok = False
                    break
                R = add_points(C, R, P)
            if ok:
                g1 = P
                break
        if g1.inf:
            raise StructureInconsistent("no independent generator found")
    C._structure = (n1, n2, g1, g2)
    return C._structure


def torsion_subgroup(C: Curve, n: int) -> List[Pt]:
    return [P for P in C.points() if scalar_mul(C, n, P).inf]


def _ordered_subgroup(pts: List[Pt]) -> List[Pt]:
    """Affine members in global point order, infinity last."""
    aff = sorted((P for P in pts if not P.inf), key=Pt.key)
    return aff + [Pt.infinity()]


def subgroup_of_order(C: Curve, h: int) -> List[Pt]:
    """A deterministic subgroup of order h, returned with infinity last."""
    N = C.N
    if h < 1 or N % h != 0:
        raise NoSuchSubgroup(f"no subgroup of order {h} (h must divide {N})")
    if h == 1:
        return [Pt.infinity()]
    tor = torsion_subgroup(C, h)
    if len(tor) == h:
        return _ordered_subgroup(tor)
    # several subgroups of order h exist; pick deterministically by greedily
    # absorbing the smallest h-torsion points (in global point order) whose
    # closure still fits inside order h
    members = {Pt.infinity()}
    for P in sorted(tor, key=Pt.key):
        if len(members) == h:
            break
        if P in members:
            continue
        grown = set()
        R = Pt.infinity()
        while True:
            grown.update(add_points(C, S, R) for S in members)
            R = add_points(C, R, P)
            if R.inf:
                break
        if h % len(grown) == 0:
            members = grown
    if len(members) != h:
        raise NoSuchSubgroup(f"order {h} incompatible with the group structure")
    return _ordered_subgroup(list(members))


def is_subgroup(C: Curve, pts: List[Pt]) -> bool:
    s = set(pts)
    if Pt.infinity() not in s:
        return False
    return all(add_points(C, P, Q) in s for P in s for Q in s)


def find_special_primes(family: str, limit: int) -> List[int]:
    if limit > 10 ** 6:
        raise ValueError("limit above 10^6")
    out = []
    if family == "eisenstein":
        u = 1
        while True:
            p = 3 * u * u + 3 * u + 1
            if p > limit:
                break
            if is_prime(p):
                out.append(p)
            u += 1
    elif family == "gaussian":
        v = 1
        while True:
            p = v * v + 1
            if p > limit:
                break
            if is_prime(p) and p % 4 == 1:
                out.append(p)
            v += 1
    else:
        raise ValueError(f"unknown prime family {family!r}")
    return out


def _subfield_elements(ctx: FieldCtx, sub_q: int) -> List[Felt]:
    """Elements of the subfield of order sub_q, in serialization order."""
    return [x for x in ctx.elements() if x ** sub_q == x]


def find_special_curve(family: str, base_param: int) -> Curve:
    """Search the stated coefficient family for the curve hitting the target
    point count; first match in coefficient (serialization) order wins."""
    if family in ("ord-j0", "ord-j1728"):
        p = base_param
        target = p * p + 2 * p if family == "ord-j0" else p * p + 2 * p - 3
        if is_prime(p):
            ctx = make_extension(p, 2)
        else:
            # prime-power base parameter (e.g. 13^2): build F_{p^2} as an
            # extension of the prime field and search coefficients inside the
            # subfield of order p
            fac = factorize(p)
            if len(fac) != 1:
                raise NoCurveFound(f"base parameter {p} is not a prime power")
            (ell, e), = fac.items()
            ctx = make_extension(ell, 2 * e)
        zero = ctx.zero()
        for b in _subfield_elements(ctx, p):
            if b == zero:
                continue
            coeffs = (0, 0, 0, 0, b) if family == "ord-j0" else (0, 0, 0, b, 0)
            try:
                C = make_curve(ctx, *coeffs)
            except SingularCurve:
                continue
            if C.N == target:
                return C
        raise NoCurveFound(f"no {family} curve over F_{ctx.q} with N = {target}")
    if family == "max":
        q = base_param
        fac = factorize(q)
        if len(fac) != 1:
            raise NoCurveFound(f"{q} is not a prime power")
        (p, a), = fac.items()
        if a % 2 != 0:
            raise NoCurveFound("maximal target needs square q")
        s = p ** (a // 2)
        target = q + 2 * s + 1
        ctx = make_prime_field(p) if a == 1 else make_extension(p, a)
        zero = ctx.zero()
        for b in ctx.elements():
            if b == zero:
                continue
            try:
                C = make_curve(ctx, 0, 0, 0, 0, b)
            except SingularCurve:
                continue
            if C.N == target:
                return C
        raise NoCurveFound(f"no maximal curve y^2 = x^3 + b over F_{q}")
    if family == "max-char2":
        a = base_param
        ctx = make_extension(2, 2 * (2 * a + 1))
        C = make_curve(ctx, 0, 0, 1, 0, 0)
        s = 1 << (2 * a + 1)
        if C.N != ctx.q + 2 * s + 1:
            raise NoCurveFound("y^2 + y = x^3 is not maximal at this size")
        return C
    raise ValueError(f"unknown curve family {family!r}")
