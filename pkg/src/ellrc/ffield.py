"""Exact arithmetic in prime fields F_p and extensions F_{p^a}.

Elements are coefficient vectors in the power basis of a monic irreducible
modulus, packed into a single integer little-endian in base p.  Fields up to
2^20 elements carry discrete-log tables so that multiplication and inversion
are table lookups; everything at desk scale stays on that fast path.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, List, Sequence, Set, Tuple

from .errors import DivisionByZero, FieldTooLarge, NoSuchRoot, NotPrime

MAX_FIELD_ORDER = 1 << 31
TABLE_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3,317,044,064,679,887,385,961,981."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict:
    """Prime factorization by trial division; n is desk-scale here."""
    fac = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            fac[d] = fac.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    return fac


# ---------------------------------------------------------------------------
# polynomial helpers over F_p (coefficient lists, little-endian)

def _poly_trim(c: List[int]) -> List[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mulmod(a: List[int], b: List[int], mod: List[int], p: int) -> List[int]:
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _poly_remainder(res, mod, p)


def _poly_remainder(a: List[int], mod: List[int], p: int) -> List[int]:
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], p - 2, p)
    for i in range(len(a) - 1, dm - 1, -1):
        if a[i]:
            f = a[i] * inv_lead % p
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - f * mod[j]) % p
    del a[dm:]
    return a


def _poly_mod_gcd(a: List[int], b: List[int], p: int) -> List[int]:
    """gcd over F_p[x], simple Euclid."""
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while b:
        r = _poly_trim(_poly_remainder(a, b, p))
        a, b = b, r
    return a


def _is_irreducible(mod: List[int], p: int) -> bool:
    """mod monic of degree a; test via x^{p^i} == x (mod mod) criteria."""
    a = len(mod) - 1
    if a == 1:
        return True
    # x^{p^a} == x mod f, and gcd(x^{p^i} - x, f) == 1 for i <= a/2
    x = [0, 1]
    xp = x
    for i in range(1, a + 1):
        xp = _poly_powmod(xp, p, mod, p)
        if i <= a // 2:
            diff = list(xp)
            while len(diff) < 2:
                diff.append(0)
            diff[1] = (diff[1] - 1) % p
            if len(_poly_mod_gcd(mod, diff, p)) > 1:
                return False
        if i == a:
            diff = list(xp)
            while len(diff) < 2:
                diff.append(0)
            diff[1] = (diff[1] - 1) % p
            if _poly_trim(diff):
                return False
    return True


def _poly_powmod(base: List[int], e: int, mod: List[int], p: int) -> List[int]:
    result = [1]
    b = _poly_remainder(list(base), mod, p) if len(base) > len(mod) - 1 else list(base)
    while e:
        if e & 1:
            result = _poly_mulmod(result, b, mod, p)
        b = _poly_mulmod(b, b, mod, p)
        e >>= 1
    return result


# ---------------------------------------------------------------------------


class FieldCtx:
    """An explicit finite field F_{p^a} with a fixed monic irreducible modulus."""

    def __init__(self, p: int, a: int, modulus: Sequence[int]):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        q = p ** a
        if q > MAX_FIELD_ORDER:
            raise FieldTooLarge(f"field order {q} exceeds 2^31")
        modulus = [m % p for m in modulus]
        if len(modulus) != a + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree a")
        if a > 1 and not _is_irreducible(modulus, p):
            raise ValueError("modulus is reducible")
        self.p = p
        self.a = a
        self.q = q
        self.modulus = tuple(modulus)
        self._pows = [p ** i for i in range(a + 1)]
        self._exp: List[int] | None = None
        self._log: List[int] | None = None
        self._sqrt_table: dict | None = None
        self._artin_table: dict | None = None
        self._np_cache: dict = {}
        if q <= TABLE_LIMIT:
            self._build_tables()

    # -- element constructors ------------------------------------------------

    def felt(self, coeffs) -> "Felt":
        """Build an element from an int (embeds F_p) or a coefficient vector."""
        if isinstance(coeffs, Felt):
            if coeffs.ctx is not self:
                raise ValueError("element from another field")
            return coeffs
        if isinstance(coeffs, int):
            return Felt(self, coeffs % self.p)
        cs = list(coeffs)
        if len(cs) > self.a:
            raise ValueError("too many coefficients")
        v = 0
        for i, c in enumerate(cs):
            v += (c % self.p) * self._pows[i]
        return Felt(self, v)

    def from_packed(self, v: int) -> "Felt":
        return Felt(self, v)

    def zero(self) -> "Felt":
        return Felt(self, 0)

    def one(self) -> "Felt":
        return Felt(self, 1)

    def coeffs(self, v: int) -> Tuple[int, ...]:
        p = self.p
        return tuple((v // self._pows[i]) % p for i in range(self.a))

    def elements(self) -> Iterator["Felt"]:
        """All elements in serialization order (coefficient tuples, c0 first)."""
        for t in itertools.product(range(self.p), repeat=self.a):
            yield self.felt(list(t))

    # -- serialization ---------------------------------------------------------

    def render(self, x: "Felt") -> str:
        return ",".join(str(c) for c in x.coeffs)

    def parse(self, s: str) -> "Felt":
        return self.felt([int(t) for t in s.split(",")])

    def header(self) -> str:
        return f"{self.p} {self.a} " + ",".join(str(m) for m in self.modulus)

    def serial_key(self, x: "Felt") -> Tuple[int, ...]:
        return x.coeffs

    # -- internal arithmetic on packed values ----------------------------------

    def _build_tables(self) -> None:
        g = self._find_generator()
        q = self.q
        exp = [0] * (q - 1)
        log = [0] * q
        v = 1
        for i in range(q - 1):
            exp[i] = v
            log[v] = i
            v = self._mul_raw(v, g)
        self._exp = exp
        self._log = log
        self._gen = g

    def _find_generator(self) -> int:
        fac = factorize(self.q - 1)
        for cand in range(2, self.q):
            if all(self._pow_raw(cand, (self.q - 1) // ell) != 1 for ell in fac):
                return cand
        raise RuntimeError("no generator found")  # pragma: no cover

    def add_raw(self, x: int, y: int) -> int:
        if self.a == 1:
            return (x + y) % self.p
        p = self.p
        v = 0
        for pk in self._pows[: self.a]:
            v += ((x // pk + y // pk) % p) * pk
        return v

    def sub_raw(self, x: int, y: int) -> int:
        if self.a == 1:
            return (x - y) % self.p
        p = self.p
        v = 0
        for pk in self._pows[: self.a]:
            v += ((x // pk - y // pk) % p) * pk
        return v

    def neg_raw(self, x: int) -> int:
        return self.sub_raw(0, x)

    def _mul_poly(self, x: int, y: int) -> int:
        xc = list(self.coeffs(x))
        yc = list(self.coeffs(y))
        prod = [0] * (2 * self.a - 1)
        p = self.p
        for i, xi in enumerate(xc):
            if xi:
                for j, yj in enumerate(yc):
                    prod[i + j] = (prod[i + j] + xi * yj) % p
        rem = _poly_remainder(prod, list(self.modulus), p)
        v = 0
        for i, c in enumerate(rem):
            v += c * self._pows[i]
        return v

    def _mul_raw(self, x: int, y: int) -> int:
        if self.a == 1:
            return x * y % self.p
        return self._mul_poly(x, y)

    def mul_raw(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        if self._exp is not None:
            return self._exp[(self._log[x] + self._log[y]) % (self.q - 1)]
        return self._mul_raw(x, y)

    def inv_raw(self, x: int) -> int:
        if x == 0:
            raise DivisionByZero("inverse of zero")
        if self._exp is not None:
            return self._exp[(-self._log[x]) % (self.q - 1)]
        return self.pow_raw(x, self.q - 2)

    def _pow_raw(self, x: int, e: int) -> int:
        r = 1
        b = x
        while e:
            if e & 1:
                r = self._mul_raw(r, b)
            b = self._mul_raw(b, b)
            e >>= 1
        return r

    def pow_raw(self, x: int, e: int) -> int:
        if e < 0:
            return self.pow_raw(self.inv_raw(x), -e)
        if x == 0:
            return 0 if e else 1
        if self._exp is not None:
            return self._exp[self._log[x] * e % (self.q - 1)]
        return self._pow_raw(x, e)

    def __eq__(self, other):
        return (
            isinstance(other, FieldCtx)
            and self.p == other.p
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        if self.a == 1:
            return f"F_{self.p}"
        return f"F_{self.p}^{self.a}"


class Felt:
    """Element of a FieldCtx, stored as a packed base-p integer."""

    __slots__ = ("ctx", "v")

    def __init__(self, ctx: FieldCtx, v: int):
        self.ctx = ctx
        self.v = v

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return self.ctx.coeffs(self.v)

    def is_zero(self) -> bool:
        return self.v == 0

    def _cv(self, other) -> int:
        """Packed value of the other operand; ints embed via the prime subfield."""
        if isinstance(other, Felt):
            return other.v
        if isinstance(other, int):
            return other % self.ctx.p
        return NotImplemented

    def __add__(self, other) -> "Felt":
        w = self._cv(other)
        if w is NotImplemented:
            return NotImplemented
        return Felt(self.ctx, self.ctx.add_raw(self.v, w))

    __radd__ = __add__

    def __sub__(self, other) -> "Felt":
        w = self._cv(other)
        if w is NotImplemented:
            return NotImplemented
        return Felt(self.ctx, self.ctx.sub_raw(self.v, w))

    def __rsub__(self, other) -> "Felt":
        w = self._cv(other)
        if w is NotImplemented:
            return NotImplemented
        return Felt(self.ctx, self.ctx.sub_raw(w, self.v))

    def __mul__(self, other) -> "Felt":
        w = self._cv(other)
        if w is NotImplemented:
            return NotImplemented
        return Felt(self.ctx, self.ctx.mul_raw(self.v, w))

    __rmul__ = __mul__

    def __neg__(self) -> "Felt":
        return Felt(self.ctx, self.ctx.neg_raw(self.v))

    def __truediv__(self, other) -> "Felt":
        w = self._cv(other)
        if w is NotImplemented:
            return NotImplemented
        return Felt(self.ctx, self.ctx.mul_raw(self.v, self.ctx.inv_raw(w)))

    def __rtruediv__(self, other) -> "Felt":
        w = self._cv(other)
        if w is NotImplemented:
            return NotImplemented
        return Felt(self.ctx, self.ctx.mul_raw(w, self.ctx.inv_raw(self.v)))

    def inverse(self) -> "Felt":
        return Felt(self.ctx, self.ctx.inv_raw(self.v))

    def __pow__(self, e: int) -> "Felt":
        return Felt(self.ctx, self.ctx.pow_raw(self.v, e))

    def __eq__(self, other):
        return isinstance(other, Felt) and self.v == other.v and self.ctx == other.ctx

    def __hash__(self):
        return hash((self.v, self.ctx.p, self.ctx.a))

    def __repr__(self):
        return self.ctx.render(self)

    def multiplicative_order(self) -> int:
        if self.v == 0:
            raise DivisionByZero("order of zero")
        n = self.ctx.q - 1
        for ell in factorize(n):
            while n % ell == 0 and self.ctx.pow_raw(self.v, n // ell) == 1:
                n //= ell
        return n


# ---------------------------------------------------------------------------
# module-level operations


def make_prime_field(p: int) -> FieldCtx:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    # placeholder modulus X for degree-1 fields
    return FieldCtx(p, 1, [0, 1])


def make_extension(p: int, a: int) -> FieldCtx:
    """F_{p^a} with the lexicographically smallest monic irreducible modulus
    (constant coefficient compared first)."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if a < 2:
        raise ValueError("extension degree must be >= 2")
    if p ** a > MAX_FIELD_ORDER:
        raise FieldTooLarge(f"field order {p**a} exceeds 2^31")
    for tail in itertools.product(range(p), repeat=a):
        mod = list(tail) + [1]
        if _is_irreducible(mod, p):
            return FieldCtx(p, a, mod)
    raise RuntimeError("no irreducible modulus found")  # pragma: no cover


def element_arithmetic(ctx: FieldCtx, op: str, *operands: Felt):
    """Dispatcher over the basic field operations (mostly for the CLI)."""
    x = operands[0]
    if op == "add":
        return x + operands[1]
    if op == "sub":
        return x - operands[1]
    if op == "mul":
        return x * operands[1]
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    if op == "pow":
        return x ** operands[1]  # type: ignore[operator]
    if op == "eq":
        return x == operands[1]
    raise ValueError(f"unknown op {op!r}")


def find_root_of_unity(ctx: FieldCtx, n: int) -> Felt:
    """Element of exact multiplicative order n, smallest in serialization order."""
    if n < 1 or (ctx.q - 1) % n != 0:
        raise NoSuchRoot(f"{n} does not divide q-1 = {ctx.q - 1}")
    fac = factorize(n)
    for x in ctx.elements():
        if x.v == 0:
            continue
        if ctx.pow_raw(x.v, n) != 1:
            continue
        if all(ctx.pow_raw(x.v, n // ell) != 1 for ell in fac):
            return x
    raise NoSuchRoot(f"no element of order {n}")  # pragma: no cover


def sqrt(ctx: FieldCtx, x: Felt) -> Felt | None:
    """A square root of x, or None when x is a non-residue."""
    if x.v == 0:
        return ctx.zero()
    if ctx.p == 2:
        # squaring is bijective in char 2
        return x ** (ctx.q // 2)
    if ctx.q <= (1 << 16):
        if ctx._sqrt_table is None:
            table = {}
            for v in range(ctx.q):
                s = ctx.mul_raw(v, v)
                if s not in table:
                    table[s] = v
            ctx._sqrt_table = table
        v = ctx._sqrt_table.get(x.v)
        return None if v is None else Felt(ctx, v)
    return _tonelli_shanks(ctx, x)


def _tonelli_shanks(ctx: FieldCtx, x: Felt) -> Felt | None:
    q = ctx.q
    if ctx.pow_raw(x.v, (q - 1) // 2) != 1:
        return None
    s, m = q - 1, 0
    while s % 2 == 0:
        s //= 2
        m += 1
    # non-residue
    zv = 2
    while ctx.pow_raw(zv, (q - 1) // 2) == 1:
        zv += 1
    c = ctx.pow_raw(zv, s)
    t = ctx.pow_raw(x.v, s)
    r = ctx.pow_raw(x.v, (s + 1) // 2)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = ctx.mul_raw(tt, tt)
            i += 1
        b = ctx.pow_raw(c, 1 << (m - i - 1))
        m = i
        c = ctx.mul_raw(b, b)
        t = ctx.mul_raw(t, c)
        r = ctx.mul_raw(r, b)
    return Felt(ctx, r)


def absolute_trace(ctx: FieldCtx, x: Felt) -> Felt:
    """Trace down to F_p."""
    e = ctx.a
    acc = x
    cur = x
    for _ in range(e - 1):
        cur = cur ** ctx.p
        acc = acc + cur
    return acc


def solve_quadratic(ctx: FieldCtx, A: Felt, B: Felt, C: Felt) -> Set[Felt]:
    """All roots of A*y^2 + B*y + C = 0 in ctx.  Empty set is a valid answer."""
    if A.v == 0 and B.v == 0:
        raise ValueError("A and B cannot both be zero")
    if A.v == 0:
        return {(-C) / B}
    if ctx.p == 2:
        if B.v == 0:
            r = sqrt(ctx, C / A)
            assert r is not None
            return {r}
        # substitute y = (B/A) w:  w^2 + w = A*C/B^2
        c = A * C / (B * B)
        if ctx._artin_table is None:
            if ctx.q > TABLE_LIMIT:
                raise FieldTooLarge("char-2 quadratic solver needs q <= 2^20")
            table = {}
            for v in range(ctx.q):
                s = ctx.add_raw(ctx.mul_raw(v, v), v)
                table.setdefault(s, v)
            ctx._artin_table = table
        wv = ctx._artin_table.get(c.v)
        if wv is None:
            return set()
        scale = B / A
        w = Felt(ctx, wv)
        return {scale * w, scale * (w + ctx.one())}
    # odd characteristic: discriminant route
    D = B * B - ctx.felt(4) * A * C
    if D.v == 0:
        return {(-B) / (ctx.felt(2) * A)}
    s = sqrt(ctx, D)
    if s is None:
        return set()
    inv2a = (ctx.felt(2) * A).inverse()
    return {(-B + s) * inv2a, (-B - s) * inv2a}
