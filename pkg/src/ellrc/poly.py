"""Dense univariate polynomials and truncated Laurent series over a FieldCtx.

Polynomials are plain Python lists of packed element values, little-endian,
normalized so the last entry is nonzero (the zero polynomial is []).  Degrees
stay modest throughout the library, so list arithmetic is plenty fast; the
heavy lifting happens in linalg on numpy arrays.
"""

from __future__ import annotations

from typing import List, Sequence

from .errors import DivisionByZero, ZeroDenominator
from .ffield import Felt, FieldCtx


def ptrim(c: List[int]) -> List[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def pdeg(c: Sequence[int]) -> int:
    """Degree, with deg 0 = -1."""
    return len(c) - 1


def padd(ctx: FieldCtx, a: Sequence[int], b: Sequence[int]) -> List[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = ctx.add_raw(x, y)
    return ptrim(out)


def psub(ctx: FieldCtx, a: Sequence[int], b: Sequence[int]) -> List[int]:
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = ctx.sub_raw(x, y)
    return ptrim(out)


def pneg(ctx: FieldCtx, a: Sequence[int]) -> List[int]:
    return [ctx.neg_raw(x) for x in a]


def pscale(ctx: FieldCtx, a: Sequence[int], s: int) -> List[int]:
    if s == 0:
        return []
    return ptrim([ctx.mul_raw(x, s) for x in a])


def pmul(ctx: FieldCtx, a: Sequence[int], b: Sequence[int]) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = ctx.add_raw(out[i + j], ctx.mul_raw(x, y))
    return ptrim(out)


def pdivmod(ctx: FieldCtx, a: Sequence[int], b: Sequence[int]):
    if not b:
        raise DivisionByZero("polynomial division by zero")
    r = list(a)
    if len(r) < len(b):
        return [], ptrim(r)
    q = [0] * (len(r) - len(b) + 1)
    inv_lead = ctx.inv_raw(b[-1])
    for i in range(len(r) - len(b), -1, -1):
        c = ctx.mul_raw(r[i + len(b) - 1], inv_lead)
        if c == 0:
            continue
        q[i] = c
        for j, y in enumerate(b):
            if y:
                r[i + j] = ctx.sub_raw(r[i + j], ctx.mul_raw(c, y))
    return ptrim(q), ptrim(r)


def pmod(ctx: FieldCtx, a, b):
    return pdivmod(ctx, a, b)[1]


def pmonic(ctx: FieldCtx, a: Sequence[int]) -> List[int]:
    if not a:
        return []
    if a[-1] == 1:
        return list(a)
    return pscale(ctx, a, ctx.inv_raw(a[-1]))


def pgcd(ctx: FieldCtx, a: Sequence[int], b: Sequence[int]) -> List[int]:
    a, b = list(a), list(b)
    while b:
        a, b = b, pmod(ctx, a, b)
    return pmonic(ctx, a)


def peval(ctx: FieldCtx, a: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = ctx.add_raw(ctx.mul_raw(acc, x), c)
    return acc


def ppow(ctx: FieldCtx, a: Sequence[int], e: int) -> List[int]:
    out: List[int] = [1]
    base = list(a)
    while e:
        if e & 1:
            out = pmul(ctx, out, base)
        base = pmul(ctx, base, base)
        e >>= 1
    return out


def from_roots(ctx: FieldCtx, roots: Sequence[int]) -> List[int]:
    """Monic polynomial with the given roots (with multiplicity)."""
    out: List[int] = [1]
    for r in roots:
        out = pmul(ctx, out, [ctx.neg_raw(r), 1])
    return out


def render_poly(ctx: FieldCtx, a: Sequence[int], var: str = "x") -> str:
    if not a:
        return "0"
    parts = []
    for i in range(len(a) - 1, -1, -1):
        if a[i] == 0:
            continue
        cs = ctx.render(ctx.from_packed(a[i]))
        if i == 0:
            parts.append(f"({cs})")
        elif i == 1:
            parts.append(f"({cs})*{var}")
        else:
            parts.append(f"({cs})*{var}^{i}")
    return " + ".join(parts)


class Series:
    """Truncated Laurent series sum_{i>=0} c[i] t^(shift+i), coefficients exact
    through exponent shift+len(c)-1."""

    __slots__ = ("ctx", "shift", "c")

    def __init__(self, ctx: FieldCtx, shift: int, coeffs: Sequence[int]):
        self.ctx = ctx
        self.shift = shift
        self.c = list(coeffs)

    # exponent one past the last known coefficient
    @property
    def prec_end(self) -> int:
        return self.shift + len(self.c)

    @classmethod
    def constant(cls, ctx: FieldCtx, v: int, prec: int) -> "Series":
        c = [0] * prec
        if prec:
            c[0] = v
        return cls(ctx, 0, c)

    @classmethod
    def uniformizer(cls, ctx: FieldCtx, prec: int) -> "Series":
        """The series t, known through t^prec exclusive-ish window [1, 1+prec)."""
        c = [0] * prec
        if prec:
            c[0] = 1
        return cls(ctx, 1, c)

    def copy(self) -> "Series":
        return Series(self.ctx, self.shift, list(self.c))

    def truncate(self, end: int) -> "Series":
        """Drop knowledge at exponents >= end."""
        keep = end - self.shift
        return Series(self.ctx, self.shift, self.c[: max(keep, 0)])

    def valuation(self):
        """Exponent of the first nonzero known coefficient, or None when the
        series is zero through its precision window."""
        for i, v in enumerate(self.c):
            if v:
                return self.shift + i
        return None

    def coeff(self, e: int) -> int:
        i = e - self.shift
        if i < 0 or i >= len(self.c):
            return 0
        return self.c[i]

    def __add__(self, other: "Series") -> "Series":
        ctx = self.ctx
        shift = min(self.shift, other.shift)
        end = min(self.prec_end, other.prec_end)
        out = [0] * max(end - shift, 0)
        for i in range(len(out)):
            out[i] = ctx.add_raw(self.coeff(shift + i), other.coeff(shift + i))
        return Series(ctx, shift, out)

    def __sub__(self, other: "Series") -> "Series":
        ctx = self.ctx
        shift = min(self.shift, other.shift)
        end = min(self.prec_end, other.prec_end)
        out = [0] * max(end - shift, 0)
        for i in range(len(out)):
            out[i] = ctx.sub_raw(self.coeff(shift + i), other.coeff(shift + i))
        return Series(ctx, shift, out)

    def __neg__(self) -> "Series":
        return Series(self.ctx, self.shift, [self.ctx.neg_raw(v) for v in self.c])

    def __mul__(self, other: "Series") -> "Series":
        ctx = self.ctx
        # precision of a product: each factor's unknown tail enters at its
        # prec_end plus the other's valuation-floor (= shift)
        end = min(self.prec_end + other.shift, other.prec_end + self.shift)
        shift = self.shift + other.shift
        n = max(end - shift, 0)
        out = [0] * n
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(other.c):
                if i + j >= n:
                    break
                if y:
                    out[i + j] = ctx.add_raw(out[i + j], ctx.mul_raw(x, y))
        return Series(ctx, shift, out)

    def scale(self, s: int) -> "Series":
        return Series(self.ctx, self.shift, [self.ctx.mul_raw(v, s) for v in self.c])

    def shifted(self, k: int) -> "Series":
        """Multiply by t^k."""
        return Series(self.ctx, self.shift + k, list(self.c))

    def inverse(self) -> "Series":
        ctx = self.ctx
        v = self.valuation()
        if v is None:
            raise ZeroDenominator("inverting a series that is zero to precision")
        lead = v - self.shift
        c = self.c[lead:]
        n = len(c)
        inv0 = ctx.inv_raw(c[0])
        out = [0] * n
        out[0] = inv0
        for k in range(1, n):
            s = 0
            for j in range(1, k + 1):
                if c[j] and out[k - j]:
                    s = ctx.add_raw(s, ctx.mul_raw(c[j], out[k - j]))
            out[k] = ctx.neg_raw(ctx.mul_raw(inv0, s))
        return Series(ctx, -v, out)

    def pow(self, e: int) -> "Series":
        if e < 0:
            return self.inverse().pow(-e)
        one = Series(self.ctx, 0, [1] + [0] * (max(len(self.c), 1) - 1))
        out = one
        for _ in range(e):
            out = out * self
        return out

    def __repr__(self):
        return f"Series(shift={self.shift}, c={self.c[:8]}{'...' if len(self.c) > 8 else ''})"


def series_eval_poly(ctx: FieldCtx, coeffs: Sequence[int], s: Series) -> Series:
    """Evaluate a polynomial (packed coefficients in the base field) at a series
    with nonnegative valuation."""
    prec = len(s.c) + max(s.shift, 0)
    acc = Series.constant(ctx, 0, prec)
    for c in reversed(coeffs):
        acc = acc * s + Series.constant(ctx, c, prec)
    return acc
