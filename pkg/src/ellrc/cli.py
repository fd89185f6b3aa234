"""Command-line driver: curve discovery, code construction, verification,
bound tables, and export/import of generator-matrix files."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import linalg
from .autgrp import (
    AutoMap,
    GroupSpec,
    close_under_composition,
    fixed_field_generator,
    make_group,
    negation_map,
    split_fibers,
)
from .curve import (
    Curve,
    Pt,
    find_special_curve,
    find_special_primes,
    group_structure,
    make_curve,
    subgroup_of_order,
)
from .errors import (
    BudgetExceeded,
    EllrcError,
    HypothesisViolation,
    MissingSymbols,
    NoCurveFound,
    NoSuchSubgroup,
    NotASubgroup,
    NotEnoughFibers,
    NotPrime,
    SubgroupsIntersect,
    TorsionConditionFailed,
    UnsupportedFamily,
)
from .ffield import FieldCtx, find_root_of_unity, make_extension, make_prime_field
from .funcfield import render_func
from .lrc import (
    LrcCode,
    StoredCode,
    bounds,
    build_code_single,
    build_code_two,
    read_code,
    write_code,
)
from . import verify as verifymod

HYPOTHESIS_ERRORS = (
    HypothesisViolation,
    NoSuchSubgroup,
    NotASubgroup,
    SubgroupsIntersect,
    TorsionConditionFailed,
    NotEnoughFibers,
    NotPrime,
    NoCurveFound,
    UnsupportedFamily,
    BudgetExceeded,
    MissingSymbols,
)


def _default_budget() -> int:
    env = os.environ.get("ELLRC_BUDGET")
    return int(env) if env else verifymod.DEFAULT_BUDGET


# --------------------------------------------------------------------------
# field / curve / automorphism resolution


def _resolve_curve(args) -> Curve:
    if getattr(args, "char2", False):
        return find_special_curve("max-char2", _char2_param(args.ext2q))
    if args.coeffs:
        ctx = make_prime_field(args.p) if args.ext == 1 else make_extension(args.p, args.ext)
        cs = [ctx.parse(s) for s in args.coeffs]
        if len(cs) != 5:
            raise UnsupportedFamily("--coeffs needs exactly five entries a1 a2 a3 a4 a6")
        return make_curve(ctx, *cs)
    fam = args.family
    if fam is None:
        raise UnsupportedFamily("give either --family or --coeffs")
    q = args.p**args.ext
    if fam in ("j0", "j1728"):
        if args.ext % 2:
            raise UnsupportedFamily("the ordinary families live over even-degree extensions")
        base = args.p ** (args.ext // 2)
        return find_special_curve("ord-" + fam, base)
    if fam == "max":
        return find_special_curve("max", q)
    if fam == "max-char2":
        return find_special_curve("max-char2", _char2_param(q))
    raise UnsupportedFamily(f"unknown curve family {fam!r}")


def _char2_param(q: Optional[int]) -> int:
    """q = 4^(2a+1) -> a, the size parameter of the y^2 + y = x^3 family."""
    if not q or q < 4:
        raise UnsupportedFamily("the character-2 family needs a field size 4^(2a+1)")
    e = q.bit_length() - 1
    if 1 << e != q or e % 4 != 2:
        raise UnsupportedFamily(f"{q} is not of the form 4^(2a+1)")
    return (e // 2 - 1) // 2


def _aut_generator(C: Curve, token: str) -> AutoMap:
    ctx = C.ctx
    zero, one = ctx.zero(), ctx.one()
    if token == "neg":
        return negation_map(C)
    if token == "y+1":
        return AutoMap(one, zero, one, zero, one)
    if token in ("zeta3", "zeta4", "zeta6"):
        order = int(token[4:])
        u = find_root_of_unity(ctx, order)
        return AutoMap(u * u, zero, u * u * u, zero, zero)
    if token.startswith("char2(") and token.endswith(")"):
        parts = token[6:-1].split(":")
        if len(parts) != 3:
            raise UnsupportedFamily("char2 token takes three field elements: char2(a:d:e)")
        a, d, e = (ctx.parse(s) for s in parts)
        return AutoMap(a, a * d * d, one, d, e)
    raise UnsupportedFamily(f"unknown automorphism token {token!r}")


def _aut_group(C: Curve, token: str) -> List[AutoMap]:
    gens = [_aut_generator(C, t) for t in token.split(",")]
    for g in gens:
        g.validate(C)
    return close_under_composition(gens, C.ctx)


def _pick_subgroup(C: Curve, h: int, exact_division: bool) -> List[Pt]:
    N = C.N
    if N % h != 0:
        raise HypothesisViolation(f"h must divide N: {h} does not divide {N}")
    if exact_division and math.gcd(h, N // h) != 1:
        raise HypothesisViolation("h ∤∤ N: gcd(h, N/h) ≠ 1")
    return subgroup_of_order(C, h)


def _curve_json(C: Curve) -> dict:
    ctx = C.ctx
    q = ctx.q
    n1, n2 = group_structure(C)[:2]
    hw_top = q + 1 + math.isqrt(4 * q)
    return {
        "q": q,
        "modulus": ctx.header(),
        "coeffs": [ctx.render(c) for c in C.coeff_list()],
        "N": C.N,
        "n1": n1,
        "n2": n2,
        "maximal": C.N == hw_top,
        "hasse_weil_defect": hw_top - C.N,
    }


# --------------------------------------------------------------------------
# subcommands


def cmd_primes(args) -> int:
    ps = find_special_primes(args.family, args.limit)
    print("p\tu/v\tp^2+2p\tp^2+2p-3")
    for p in ps:
        if args.family == "eisenstein":
            uv = next(u for u in range(p) if 3 * u * u + 3 * u + 1 == p)
        else:
            uv = next(v for v in range(p) if v * v + 1 == p)
        print(f"{p}\t{uv}\t{p * p + 2 * p}\t{p * p + 2 * p - 3}")
    return 0


def cmd_curve(args) -> int:
    C = _resolve_curve(args)
    print(json.dumps(_curve_json(C), indent=2))
    return 0


def cmd_fixed_field(args) -> int:
    C = _resolve_curve(args)
    H = _pick_subgroup(C, args.h, exact_division=False)
    A = _aut_group(C, args.A)
    G = make_group(C, H, A)
    z = fixed_field_generator(C, G)
    fibers = split_fibers(C, G, z)
    out = {
        "curve": _curve_json(C),
        "groupOrder": G.order,
        "z": render_func(z),
        "splitFibers": len(fibers),
        "fiberSize": G.order,
        "alphas": [C.ctx.render(f.alpha) for f in fibers[:10]],
    }
    print(json.dumps(out, indent=2))
    return 0


def _summary(code: LrcCode) -> dict:
    out = {
        "n": code.n,
        "k": code.k,
        "dLower": code.d_lower,
        "mode": code.mode,
    }
    if code.mode == "single":
        lower, witness = verifymod.distance_certificate(code)
        out["localities"] = [code.r]
        out["dExact"] = witness if witness == lower else None
        classical = code.n - code.k - (-(-code.k // code.r)) + 2
        out["optimal"] = witness == classical
        rep = bounds(code.n, code.k, witness, [code.r])
    else:
        out["localities"] = [code.r1, code.r2]
        out["optimal"] = None
        rep = bounds(code.n, code.k, code.d_lower, sorted([code.r1, code.r2]))
    out["defect"] = rep.defect_str
    return out


def cmd_build(args) -> int:
    C = _resolve_curve(args)
    if args.two:
        H = _pick_subgroup(C, args.h, exact_division=False)
        A1 = _aut_group(C, args.A1)
        A2 = _aut_group(C, args.A2)
        code = build_code_two(C, H, A1, A2, args.m, args.d0)
    else:
        H = _pick_subgroup(C, args.h, exact_division=True)
        A = _aut_group(C, args.A)
        code = build_code_single(C, H, A, args.m, args.t)
    if args.out:
        write_code(code, args.out)
    print(json.dumps(_summary(code), indent=2))
    return 0


def _stored_meta(path: str) -> Optional[dict]:
    try:
        with open(path + ".json") as fh:
            return json.load(fh)
    except OSError:
        return None


def _stored_recovering_sets(stored: StoredCode, meta: Optional[dict]):
    """Recovering-set indices for every position of a stored code.

    Single mode needs only the fiber blocking; two mode rebuilds the
    group action from the sidecar metadata."""
    fs = stored.fiber_size
    if stored.mode == "single":
        out = []
        for pos in range(stored.n):
            f = pos // fs
            out.append(([i for i in range(f * fs, (f + 1) * fs) if i != pos], None))
        return out
    if not meta or "H" not in meta or "A1" not in meta:
        raise MissingSymbols(
            "two-set repair audit needs the .json sidecar with the group data"
        )
    ctx = stored.ctx
    C = stored.curve

    def pt(s: str) -> Pt:
        if s == "INF":
            return Pt.infinity()
        xs, ys = s.split(";")
        return Pt.affine(ctx.parse(xs), ctx.parse(ys))

    H = [pt(s) for s in meta["H"]]
    A1 = [AutoMap(*(ctx.parse(c) for c in row)) for row in meta["A1"]]
    A2 = [AutoMap(*(ctx.parse(c) for c in row)) for row in meta["A2"]]
    G1 = make_group(C, H, A1)
    G2 = make_group(C, H, A2)
    index = {P: i for i, P in enumerate(stored.places)}
    from .curve import add_points

    out = []
    for pos, P in enumerate(stored.places):
        th = {add_points(C, P, Q) for Q in H}
        I1 = sorted(index[R] for R in G1.orbit(P) if R != P)
        I2 = sorted(index[R] for R in G2.orbit(P) if R not in th)
        out.append((I1, I2))
    return out


def cmd_verify(args) -> int:
    stored = read_code(args.file)
    ctx = stored.ctx
    budget = args.budget or _default_budget()
    rep = verifymod.VerifyReport(seed=args.seed, budget=budget)
    rep.extend(verifymod.curve_sanity(stored.curve, seed=args.seed))
    rep.add(
        "generator matrix rank equals k",
        linalg.rank(ctx, stored.matrix) == stored.k,
        f"k = {stored.k}",
    )
    lower = verifymod.lower_distance_bound(stored)
    if args.distance == "exact":
        try:
            d = verifymod.min_distance_exact(stored, budget=budget)
            rep.add("exact distance at least the designed bound", d >= lower, f"d = {d}")
        except BudgetExceeded as exc:
            rep.add("exact distance", None, str(exc))
    else:
        lo, wit = verifymod.distance_certificate(stored, seed=args.seed)
        rep.add(
            "distance certificate consistent",
            wit is None or lo <= wit,
            f"lower {lo}, witness weight {wit}",
        )
    sets = _stored_recovering_sets(stored, _stored_meta(args.file))
    M = stored.matrix
    plans = []
    solvable = True
    for pos, (I1, I2) in enumerate(sets):
        for idx in (I1, I2):
            if idx is None:
                continue
            try:
                w = linalg.solve(ctx, M[:, idx], M[:, pos])
            except ValueError:
                solvable = False
                continue
            plans.append((pos, np.asarray(idx), w))
    rep.add("every position linearly repairable from its sets", solvable)
    rng = verifymod._SplitMix64(args.seed)
    failures = total = 0
    for _ in range(args.repair_trials):
        word = verifymod._random_codeword(ctx, M, rng)
        for pos, idx, w in plans:
            total += 1
            if verifymod._dot(ctx, w, word[idx]) != int(word[pos]):
                failures += 1
    if args.repair_trials:
        rep.add(
            "repair round-trip",
            failures == 0,
            f"{total - failures}/{total} repairs matched",
        )
    print(json.dumps(rep.as_dict(), indent=2))
    return 0 if rep.passed else 1


def cmd_bounds(args) -> int:
    locs = [int(s) for s in args.localities.split(",")]
    rep = bounds(args.n, args.k, args.d, locs)
    print(json.dumps(rep.as_dict(), indent=2))
    return 0


def cmd_table(args) -> int:
    C = _resolve_curve(args)
    rows = []
    if args.two:
        H = _pick_subgroup(C, args.h, exact_division=False)
        A1 = _aut_group(C, args.A1)
        A2 = _aut_group(C, args.A2)
        fs = len(H) * len(A1) * len(A2)
        for m in range(1, args.m_max + 1):
            n = m * fs
            d0 = args.d0 if args.d0 else max(1, n - n // 4)
            if d0 >= n:
                continue
            built = n <= args.construct_limit
            row = {"m": m, "n": n, "d0": d0, "built": built}
            if built:
                code = build_code_two(C, H, A1, A2, m, d0)
                row.update(k=code.k, dLower=code.d_lower, localities=[code.r1, code.r2])
            print(json.dumps(row))
            rows.append(row)
        return 0
    H = _pick_subgroup(C, args.h, exact_division=True)
    A = _aut_group(C, args.A)
    fs = len(H) * len(A)
    r = fs - 1
    for m in range(2, args.m_max + 1):
        for t in range(1, m):
            n = m * fs
            built = n <= args.construct_limit
            row = {"m": m, "t": t, "n": n, "k": r * t + 1, "d": (m - t) * fs, "built": built}
            if built:
                code = build_code_single(C, H, A, m, t)
                lower, wit = verifymod.distance_certificate(code)
                row["optimal"] = wit == lower == row["d"]
            print(json.dumps(row))
            rows.append(row)
    return 0


def cmd_export(args) -> int:
    stored = read_code(args.file)
    ctx = stored.ctx
    from .lrc import _pt_str

    out = {
        "field": ctx.header(),
        "curve": [ctx.render(c) for c in stored.curve.coeff_list()],
        "n": stored.n,
        "k": stored.k,
        "mode": stored.mode,
        "localities": stored.localities,
        "points": [_pt_str(ctx, P) for P in stored.places],
        "matrix": [
            [ctx.render(ctx.from_packed(int(v))) for v in row] for row in stored.matrix
        ],
    }
    text = json.dumps(out, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_import(args) -> int:
    stored = read_code(args.file)
    if linalg.rank(stored.ctx, stored.matrix) != stored.k:
        raise HypothesisViolation("stored matrix rank disagrees with the stated k")
    loc = ",".join(str(x) for x in stored.localities)
    print(
        f"[{stored.n}, {stored.k}; ({loc})]_{stored.ctx.q} "
        f"{stored.mode} mode, {stored.m} fibers of size {stored.fiber_size}"
    )
    return 0


# --------------------------------------------------------------------------
# argument plumbing


def _add_field_args(sp, curve_required=True):
    sp.add_argument("--p", type=int, default=2, help="field characteristic")
    sp.add_argument("--ext", type=int, default=1, help="extension degree")
    sp.add_argument("--family", choices=["j0", "j1728", "max", "max-char2"])
    sp.add_argument("--coeffs", nargs="*", help="a1 a2 a3 a4 a6 (serialized)")
    sp.add_argument("--char2", action="store_true", help="use the y^2+y=x^3 family")
    sp.add_argument("--ext2q", type=int, help="field size for --char2")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ellrc",
        description="locally repairable codes from elliptic curve automorphisms",
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("primes", help="primes supporting the ordinary families")
    sp.add_argument("--family", choices=["eisenstein", "gaussian"], required=True)
    sp.add_argument("--limit", type=int, required=True)
    sp.set_defaults(fn=cmd_primes)

    sp = sub.add_parser("curve", help="find/describe a curve")
    _add_field_args(sp)
    sp.set_defaults(fn=cmd_curve)

    sp = sub.add_parser("fixed-field", help="invariant function of a group")
    _add_field_args(sp)
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--A", required=True, help="comma separated automorphism tokens")
    sp.set_defaults(fn=cmd_fixed_field)

    sp = sub.add_parser("build", help="construct a code and write its matrix")
    _add_field_args(sp)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--single", action="store_true")
    mode.add_argument("--two", action="store_true")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--A", help="tokens for the single-mode group")
    sp.add_argument("--A1")
    sp.add_argument("--A2")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--t", type=int)
    sp.add_argument("--d0", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_build)

    sp = sub.add_parser("verify", help="audit a stored .ellrc file")
    sp.add_argument("file")
    sp.add_argument("--distance", choices=["exact", "certificate"], default="certificate")
    sp.add_argument("--repair-trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--budget", type=int)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("bounds", help="distance bounds and Singleton defect")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--localities", required=True, help="comma separated")
    sp.set_defaults(fn=cmd_bounds)

    sp = sub.add_parser("table", help="sweep admissible (m, t) rows")
    _add_field_args(sp)
    sp.add_argument("--two", action="store_true")
    sp.add_argument("--h", type=int, required=True)
    sp.add_argument("--A")
    sp.add_argument("--A1")
    sp.add_argument("--A2")
    sp.add_argument("--m-max", type=int, default=4)
    sp.add_argument("--d0", type=int)
    sp.add_argument("--construct-limit", type=int, default=200)
    sp.set_defaults(fn=cmd_table)

    sp = sub.add_parser("export", help="dump a stored code as JSON")
    sp.add_argument("file")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_export)

    sp = sub.add_parser("import", help="validate a stored code file")
    sp.add_argument("file")
    sp.set_defaults(fn=cmd_import)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HYPOTHESIS_ERRORS as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EllrcError, ValueError, AssertionError) as exc:
        print(f"internal invariant failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
