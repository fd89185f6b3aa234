"""Locally repairable code constructions on an elliptic curve.

Single mode: one recovering set per symbol, built from the fixed field of
G = T_H * A with the staircase basis e_1..e_r, giving [m(r+1), rt+1] codes with
design distance n - t(r+1).  Two mode: two disjoint recovering sets, built as
the intersection of two such spaces sharing the translation subgroup T_H.
Also here: the torsion side condition for the two-mode family on maximal
curves, Singleton-type bounds with the exact rational defect, repair, and the
generator-matrix file format.
"""

from __future__ import annotations

import json
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from .curve import Curve, Pt, add_points, make_curve
from .errors import (
    ExistenceFailure,
    MissingSymbols,
    NotEnoughFibers,
    RankMismatch,
    SingularRepairMatrix,
    SubgroupsIntersect,
)
from .ffield import Felt, FieldCtx, factorize, make_extension, make_prime_field
from .autgrp import (
    AutoMap,
    Fiber,
    GroupSpec,
    close_under_composition,
    fixed_field_generator,
    make_group,
    split_fibers,
)
from .funcfield import Func, const_func, evaluate, evaluate_many, riemann_roch_basis, valuation


# --------------------------------------------------------------------------
# staircase basis


class EBasis:
    """e_1 = 1, e_2, ..., e_r with the staircase pole pattern over H."""

    def __init__(self, funcs: List[Func], H: List[Pt]):
        self.funcs = funcs
        self.H = H

    def __len__(self):
        return len(self.funcs)


def _staircase_orders(i: int, h: int) -> List[int]:
    """Demanded pole orders of e_i at P_1..P_h (P_h the infinite point)."""
    mu, nu = divmod(i, h)
    return [(mu + 1) if j < nu else mu for j in range(h)]


def build_e_basis(C: Curve, H: List[Pt], r: int) -> EBasis:
    """Basis functions whose pole divisors follow the staircase pattern:
    e_i has pole order mu+1 at the first nu points of H and mu elsewhere,
    where i = mu*|H| + nu."""
    if r < 1:
        raise ExistenceFailure("need r >= 1")
    h = len(H)
    funcs: List[Func] = [const_func(C, 1)]
    for i in range(2, r + 1):
        orders = _staircase_orders(i, h)
        D = [(P, o) for P, o in zip(H, orders) if o > 0]
        basis = riemann_roch_basis(C, D)
        exact = [j for j, o in enumerate(orders) if o > 0]
        e_i = None
        # deterministic sweep: echelon elements, then prefix sums, then a
        # seeded combination walk
        candidates = list(basis)
        acc = None
        for g in basis:
            acc = g if acc is None else acc + g
            candidates.append(acc)
        rng = _SplitMix64(0xE1117C0DE ^ (i << 8) ^ h)
        ctx = C.ctx
        for _ in range(64):
            g = const_func(C, 0)
            for b in basis:
                g = g + b.scale(ctx.from_packed(rng.below(ctx.q)))
            candidates.append(g)
        for g in candidates:
            if g.is_zero():
                continue
            if all(valuation(g, H[j]) == -orders[j] for j in exact):
                e_i = g
                break
        if e_i is None:
            raise ExistenceFailure(f"no basis element with the exact pole pattern for index {i}")
        funcs.append(e_i)
    return EBasis(funcs, H)


class _SplitMix64:
    """Deterministic cross-platform generator used for seeded sweeps."""

    def __init__(self, seed: int):
        self.state = seed & 0xFFFFFFFFFFFFFFFF

    def next64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        return self.next64() % n


# --------------------------------------------------------------------------
# code containers


class LrcCode:
    def __init__(self, **kw):
        self.curve: Curve = kw["curve"]
        self.mode: str = kw["mode"]  # "single" or "two"
        self.fibers: List[Fiber] = kw["fibers"]
        self.places: List[Pt] = kw["places"]
        self.n: int = kw["n"]
        self.k: int = kw["k"]
        self.d_lower: int = kw["d_lower"]
        self.matrix: Optional[np.ndarray] = kw.get("matrix")
        self.basis: Optional[List[Func]] = kw.get("basis")
        self.H: List[Pt] = kw["H"]
        # single mode
        self.r: Optional[int] = kw.get("r")
        self.t: Optional[int] = kw.get("t")
        self.z: Optional[Func] = kw.get("z")
        self.ebasis: Optional[EBasis] = kw.get("ebasis")
        self.G: Optional[GroupSpec] = kw.get("G")
        # two mode
        self.r1: Optional[int] = kw.get("r1")
        self.r2: Optional[int] = kw.get("r2")
        self.d0: Optional[int] = kw.get("d0")
        self.t1: Optional[int] = kw.get("t1")
        self.t2: Optional[int] = kw.get("t2")
        self.L: Optional[int] = kw.get("L")
        self.z1: Optional[Func] = kw.get("z1")
        self.z2: Optional[Func] = kw.get("z2")
        self.ebasis1: Optional[EBasis] = kw.get("ebasis1")
        self.ebasis2: Optional[EBasis] = kw.get("ebasis2")
        self.G1: Optional[GroupSpec] = kw.get("G1")
        self.G2: Optional[GroupSpec] = kw.get("G2")
        self.index: Dict[Pt, int] = {P: i for i, P in enumerate(self.places)}

    @property
    def ctx(self) -> FieldCtx:
        return self.curve.ctx

    def params(self) -> str:
        if self.mode == "single":
            return f"[{self.n}, {self.k}, >= {self.d_lower}; r = {self.r}]"
        return f"[{self.n}, {self.k}, >= {self.d_lower}; ({self.r1}, {self.r2})]"


def _flatten(fibers: Sequence[Fiber]) -> List[Pt]:
    out: List[Pt] = []
    for f in fibers:
        out.extend(f.places)
    return out


def _eval_at(ctx: FieldCtx, funcs: Sequence[Func], pts: Sequence[Pt]) -> np.ndarray:
    """Rows = functions, columns = points (packed values)."""
    rows = []
    for g in funcs:
        rows.append(np.asarray([v.v for v in evaluate_many(g, pts)], dtype=np.int64))
    return np.stack(rows) if rows else np.zeros((0, len(pts)), dtype=np.int64)


def _power_grid(
    ctx: FieldCtx, zrow: np.ndarray, erows: np.ndarray, t_top: int, t_low: int
) -> np.ndarray:
    """Evaluation rows of {z^j : j <= t_top} then {z^j * e_i : j < t_low} for
    each staircase function after e_1, given the point-value rows."""
    npts = zrow.shape[0]
    zp = [np.ones(npts, dtype=np.int64)]
    for _ in range(max(t_top, t_low)):
        zp.append(linalg.arr_mul(ctx, zp[-1], zrow))
    rows = [zp[j] for j in range(t_top + 1)]
    for i in range(1, erows.shape[0]):
        for j in range(t_low):
            rows.append(linalg.arr_mul(ctx, zp[j], erows[i]))
    return np.stack(rows)


# --------------------------------------------------------------------------
# single mode


def build_code_single(
    C: Curve,
    H: List[Pt],
    A: Sequence[AutoMap],
    m: int,
    t: int,
    fibers: Optional[List[Fiber]] = None,
    z: Optional[Func] = None,
) -> LrcCode:
    G = make_group(C, H, A)
    r = G.order - 1
    if z is None:
        z = fixed_field_generator(C, G)
    if fibers is None:
        fibers = split_fibers(C, G, z, exclude_torsion=False)
    if not (1 <= t < m):
        raise NotEnoughFibers(f"need 1 <= t < m, got t={t}, m={m}")
    if m > len(fibers):
        raise NotEnoughFibers(f"only {len(fibers)} completely split fibers, need {m}")
    fibers = fibers[:m]
    places = _flatten(fibers)
    n = m * (r + 1)
    ctx = C.ctx
    eb = build_e_basis(C, H, r)
    zrow = np.asarray([v.v for v in evaluate_many(z, places)], dtype=np.int64)
    erows = _eval_at(ctx, eb.funcs, places)
    M = _power_grid(ctx, zrow, erows, t, t)
    k = r * t + 1
    if M.shape[0] != k:
        raise RankMismatch("basis enumeration does not match rt+1")
    if linalg.rank(ctx, M) != k:
        raise RankMismatch(f"generator matrix rank below {k}")
    basis = [_zpow(C, z, j) for j in range(t + 1)]
    for i in range(1, r):
        for j in range(t):
            basis.append(_zpow(C, z, j) * eb.funcs[i])
    return LrcCode(
        curve=C,
        mode="single",
        fibers=fibers,
        places=places,
        n=n,
        k=k,
        d_lower=n - t * (r + 1),
        matrix=M,
        basis=basis,
        H=G.H,
        r=r,
        t=t,
        z=z,
        ebasis=eb,
        G=G,
    )


def _zpow(C: Curve, z: Func, j: int) -> Func:
    out = const_func(C, 1)
    for _ in range(j):
        out = out * z
    return out


# --------------------------------------------------------------------------
# two mode


def check_torsion_condition(q: int, h: int, a1: int, a2: int) -> Tuple[bool, dict]:
    """Side condition for the two-mode family on maximal curves: with
    sqrt(q)+1 = prod l^{h_l}, require h^2*|A1|*|A2| > prod l^{2 min(2 v_l(h),
    h_l)} - h^2."""
    s = isqrt(q)
    if s * s != q:
        raise ValueError("q must be a square")
    fac = factorize(s + 1)
    prod = 1
    for ell, he in fac.items():
        ve = 0
        hh = h
        while hh % ell == 0:
            hh //= ell
            ve += 1
        prod *= ell ** (2 * min(2 * ve, he))
    lhs = h * h * a1 * a2
    rhs = prod - h * h
    return lhs > rhs, {
        "sqrt_q_plus_1": s + 1,
        "factorization": fac,
        "lhs": lhs,
        "rhs": rhs,
        "holds": lhs > rhs,
    }


def build_code_two(
    C: Curve,
    H: List[Pt],
    A1: Sequence[AutoMap],
    A2: Sequence[AutoMap],
    m: int,
    d0: int,
    with_functions: bool = True,
    with_matrix: bool = True,
) -> LrcCode:
    ctx = C.ctx
    A1 = list(A1)
    A2 = list(A2)
    if len(set(A1) & set(A2)) != 1:
        raise SubgroupsIntersect("A1 and A2 must intersect only in the identity")
    A12 = close_under_composition(list(A1) + list(A2), ctx)
    if len(A12) != len(A1) * len(A2):
        raise SubgroupsIntersect("A1*A2 does not have order |A1|*|A2|")
    G = make_group(C, H, A12)
    G1 = make_group(C, H, A1)
    G2 = make_group(C, H, A2)
    h = len(G.H)
    r1 = h * len(A1) - 1
    r2 = h * (len(A2) - 1)
    zG = fixed_field_generator(C, G)
    fibers = split_fibers(C, G, zG, exclude_torsion=True)
    if m > len(fibers):
        raise NotEnoughFibers(f"only {len(fibers)} usable fibers, need {m}")
    fibers = fibers[:m]
    places = _flatten(fibers)
    n = m * G.order
    if not (1 <= d0 < n):
        raise NotEnoughFibers(f"need 1 <= d0 < n = {n}")
    t1 = (n - d0) // (r1 + 1)
    t2 = (n - d0) // (r2 + h)
    L = max(t1 * (r1 + 1), t2 * (r2 + h))
    L0 = max(t1 * len(A1), t2 * len(A2))

    z1 = fixed_field_generator(C, G1)
    z2 = fixed_field_generator(C, G2)
    eb1 = build_e_basis(C, H, r1)
    eb2 = build_e_basis(C, H, r2)

    # sample places: any point outside H sees every function finitely; more
    # samples than dim W = L0*|H| makes evaluation injective on V1 + V2
    dimW = L0 * h
    Hset = set(G.H)
    S = []
    for P in C.points():
        if P not in Hset:
            S.append(P)
        if len(S) >= dimW + 24:
            break
    if len(S) <= dimW:
        raise NotEnoughFibers("not enough rational places to separate the function space")
    z1row = np.asarray([v.v for v in evaluate_many(z1, S)], dtype=np.int64)
    z2row = np.asarray([v.v for v in evaluate_many(z2, S)], dtype=np.int64)
    e1rows = _eval_at(ctx, eb1.funcs, S)
    e2rows = _eval_at(ctx, eb2.funcs, S)
    Y1 = _power_grid(ctx, z1row, e1rows, t1, t1)
    Y2 = _power_grid(ctx, z2row, e2rows, t2, t2)
    d1 = t1 * r1 + 1
    d2 = t2 * r2 + 1
    if Y1.shape[0] != d1 or Y2.shape[0] != d2:
        raise RankMismatch("space enumeration sizes disagree with t*r+1")
    stacked = np.concatenate([Y1, Y2], axis=0)
    k = d1 + d2 - linalg.rank(ctx, stacked)
    kw = dict(
        curve=C,
        mode="two",
        fibers=fibers,
        places=places,
        n=n,
        k=k,
        d_lower=max(n - L, d0),
        H=G.H,
        r1=r1,
        r2=r2,
        d0=d0,
        t1=t1,
        t2=t2,
        L=L,
        z1=z1,
        z2=z2,
        ebasis1=eb1,
        ebasis2=eb2,
        G1=G1,
        G2=G2,
    )
    if with_functions:
        # coefficient vectors (a | b) with a*Y1 = b*Y2 give V = V1 cap V2
        pair = np.concatenate([Y1, linalg.arr_neg(ctx, Y2)], axis=0)
        null = linalg.nullspace(ctx, pair.T)
        if null.shape[0] != k:
            raise RankMismatch("intersection dimension disagrees with rank computation")
        basis1 = [_zpow(C, z1, j) for j in range(t1 + 1)]
        for i in range(1, r1):
            for j in range(t1):
                basis1.append(_zpow(C, z1, j) * eb1.funcs[i])
        vbasis = []
        for vec in null:
            f = const_func(C, 0)
            for c, g in zip(vec[:d1], basis1):
                if c:
                    f = f + g.scale(ctx.from_packed(int(c)))
            vbasis.append(f)
        kw["basis"] = vbasis
        if with_matrix:
            M = _eval_at(ctx, vbasis, places)
            if linalg.rank(ctx, M) != k:
                raise RankMismatch("generator matrix rank below the intersection dimension")
            kw["matrix"] = M
    return LrcCode(**kw)


# --------------------------------------------------------------------------
# recovering sets and repair


def recovering_sets(code: LrcCode, pos: int) -> Tuple[List[int], Optional[List[int]]]:
    if not (0 <= pos < code.n):
        raise IndexError("position out of range")
    P = code.places[pos]
    if code.mode == "single":
        size = code.r + 1
        f = pos // size
        I1 = [i for i in range(f * size, (f + 1) * size) if i != pos]
        return I1, None
    orbit1 = code.G1.orbit(P)
    orbit2 = code.G2.orbit(P)
    th = {add_points(code.curve, P, Q) for Q in code.H}
    I1 = sorted(code.index[R] for R in orbit1 if R != P)
    I2 = sorted(code.index[R] for R in orbit2 if R not in th)
    assert not (set(I1) & set(I2)) and pos not in set(I1) | set(I2)
    return I1, I2


def repair(code: LrcCode, word: Sequence[Optional[Felt]], pos: int, which_set: int = 1) -> Felt:
    """Recover the erased symbol at pos from the chosen recovering set."""
    ctx = code.ctx
    I1, I2 = recovering_sets(code, pos)
    idx = I1 if which_set == 1 else I2
    if idx is None:
        raise MissingSymbols("this code has no second recovering set")
    vals = []
    for i in idx:
        if word[i] is None:
            raise MissingSymbols(f"recovering set needs position {i}")
        vals.append(word[i])
    eb = code.ebasis if code.mode == "single" else (code.ebasis1 if which_set == 1 else code.ebasis2)
    P = code.places[pos]
    pts = [code.places[i] for i in idx]
    M = np.asarray(
        [[evaluate(e, Q).v for e in eb.funcs] for Q in pts], dtype=np.int64
    )
    b = np.asarray([v.v for v in vals], dtype=np.int64)
    try:
        c = linalg.solve(ctx, M, b)
    except ValueError as exc:
        raise SingularRepairMatrix(str(exc)) from exc
    out = ctx.zero()
    for cv, e in zip(c, eb.funcs):
        out = out + ctx.from_packed(int(cv)) * evaluate(e, P)
    return out


def encode(code: LrcCode, message: Sequence[Felt]) -> List[Felt]:
    if code.matrix is None:
        raise MissingSymbols("code was built without its generator matrix")
    ctx = code.ctx
    if len(message) != code.k:
        raise MissingSymbols(f"message length must be {code.k}")
    acc = np.zeros(code.n, dtype=np.int64)
    for a, row in zip(message, code.matrix):
        if a.v:
            acc = linalg.arr_add(ctx, acc, linalg.arr_mul(ctx, row, a.v))
    return [ctx.from_packed(int(v)) for v in acc]


# --------------------------------------------------------------------------
# bounds


class BoundsReport:
    def __init__(self, n, k, d, localities, classical, rawat, floor_bound, ceil_bound, defect):
        self.n = n
        self.k = k
        self.d = d
        self.localities = localities
        self.classical = classical
        self.rawat = rawat
        self.floor_bound = floor_bound
        self.ceil_bound = ceil_bound
        self.defect = defect  # exact Fraction

    @property
    def defect_str(self) -> str:
        return format_defect(self.defect)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "d": self.d,
            "localities": list(self.localities),
            "classical": self.classical,
            "rawat": self.rawat,
            "floorBound": self.floor_bound,
            "ceilBound": self.ceil_bound,
            "defect": str(self.defect),
            "defectDecimal": self.defect_str,
        }


def format_defect(x: Fraction) -> str:
    """Six decimals, round half to even."""
    scaled = x * 10 ** 6
    whole = scaled.numerator // scaled.denominator
    rem = scaled - whole
    if rem > Fraction(1, 2) or (rem == Fraction(1, 2) and whole % 2 == 1):
        whole += 1
    sign = "-" if whole < 0 else ""
    whole = abs(whole)
    return f"{sign}{whole // 10**6}.{whole % 10**6:06d}"


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def bounds(n: int, k: int, d: int, localities: Sequence[int]) -> BoundsReport:
    rs = sorted(localities)
    if not rs:
        raise ValueError("need at least one locality")
    t = len(rs)
    r = rs[0]
    classical = n - k - _ceil_div(k, r) + 2
    rawat = None
    if len(set(rs)) == 1:
        rawat = n - k - _ceil_div(k * t, r) + t + 1
    ssum = 0
    for i in range(1, t + 1):
        prod = 1
        for j in range(t - i, t):
            prod *= rs[j]
        ssum += (k - 1) // prod
    floor_bound = n - k + 1 - ssum
    ceil_bound = n - k - _ceil_div((k - 1) * t + 1, 1 + sum(rs)) + 2
    defect = Fraction(n - k - d + 1 - ssum, n)
    return BoundsReport(n, k, d, rs, classical, rawat, floor_bound, ceil_bound, defect)


# --------------------------------------------------------------------------
# file format


def _pt_str(ctx: FieldCtx, P: Pt) -> str:
    if P.inf:
        return "INF"
    return f"{ctx.render(P.x)};{ctx.render(P.y)}"


def write_code(code: LrcCode, path: str) -> None:
    if code.matrix is None:
        raise MissingSymbols("code was built without its generator matrix")
    ctx = code.ctx
    lines = ["ELLRC 1", f"FIELD {ctx.header()}"]
    lines.append("CURVE " + " ".join(ctx.render(c) for c in code.curve.coeff_list()))
    if isinstance(code, StoredCode):
        fs, m = code.fiber_size, code.m
        locs = code.localities
    else:
        fs, m = len(code.fibers[0].places), len(code.fibers)
        locs = [code.r] if code.mode == "single" else [code.r1, code.r2]
    lines.append(f"CODE {code.n} {code.k} {code.mode} {fs} {m}")
    if code.mode == "single":
        lines.append(f"LOCALITY {locs[0]}")
    else:
        lines.append(f"LOCALITY {locs[0]} {locs[1]} {code.d0}")
    lines.append("POINTS")
    for P in code.places:
        lines.append(_pt_str(ctx, P))
    lines.append("MATRIX")
    for row in code.matrix:
        lines.append(" ".join(ctx.render(ctx.from_packed(int(v))) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "format": "ELLRC 1",
        "field": ctx.header(),
        "curve": [ctx.render(c) for c in code.curve.coeff_list()],
        "n": code.n,
        "k": code.k,
        "mode": code.mode,
        "fiberSize": fs,
        "m": m,
        "locality": locs,
        "d0": code.d0,
    }

    def _maps(group) -> list:
        return [
            [ctx.render(c) for c in (s.c1, s.c2, s.c3, s.c4, s.c5)] for s in group.A
        ]

    if not isinstance(code, StoredCode):
        meta["dLower"] = code.d_lower
        meta["H"] = [_pt_str(ctx, P) for P in code.H]
        if code.mode == "single" and code.G is not None:
            meta["A1"] = _maps(code.G)
        elif code.mode == "two" and code.G1 is not None:
            meta["A1"] = _maps(code.G1)
            meta["A2"] = _maps(code.G2)
    with open(path + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


class StoredCode:
    """Generator matrix and metadata read back from an .ellrc file."""

    def __init__(self, ctx, curve, n, k, mode, fiber_size, m, localities, d0, places, matrix):
        self.ctx = ctx
        self.curve = curve
        self.n = n
        self.k = k
        self.mode = mode
        self.fiber_size = fiber_size
        self.m = m
        self.localities = localities
        self.d0 = d0
        self.places = places
        self.matrix = matrix


def read_code(path: str) -> StoredCode:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0].strip() != "ELLRC 1":
        raise ValueError("not an ELLRC 1 file")
    fparts = lines[1].split()
    if fparts[0] != "FIELD":
        raise ValueError("missing FIELD line")
    p, a = int(fparts[1]), int(fparts[2])
    ctx = make_prime_field(p) if a == 1 else make_extension(p, a)
    if ctx.header() != " ".join(fparts[1:]):
        raise ValueError("field modulus does not match the canonical modulus")
    cparts = lines[2].split()
    if cparts[0] != "CURVE":
        raise ValueError("missing CURVE line")
    coeffs = [ctx.parse(s) for s in cparts[1:]]
    curve = make_curve(ctx, *coeffs)
    dparts = lines[3].split()
    n, k, mode, fiber_size, m = int(dparts[1]), int(dparts[2]), dparts[3], int(dparts[4]), int(dparts[5])
    lparts = lines[4].split()
    localities = [int(x) for x in lparts[1:3]] if mode == "two" else [int(lparts[1])]
    d0 = int(lparts[3]) if mode == "two" else None
    i = 5
    if lines[i] != "POINTS":
        raise ValueError("missing POINTS section")
    i += 1
    places = []
    for _ in range(n):
        s = lines[i]
        i += 1
        if s == "INF":
            places.append(Pt.infinity())
        else:
            xs, ys = s.split(";")
            places.append(Pt.affine(ctx.parse(xs), ctx.parse(ys)))
    if lines[i] != "MATRIX":
        raise ValueError("missing MATRIX section")
    i += 1
    rows = []
    for _ in range(k):
        rows.append([ctx.parse(s).v for s in lines[i].split()])
        i += 1
    matrix = np.asarray(rows, dtype=np.int64)
    for P in places:
        if not P.inf and not curve.on_curve(P):
            raise ValueError("point not on the stated curve")
    return StoredCode(ctx, curve, n, k, mode, fiber_size, m, localities, d0, places, matrix)
