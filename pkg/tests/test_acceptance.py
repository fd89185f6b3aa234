"""End-to-end reproduction targets.

One test per numbered criterion; each prints a single pass/fail line
(run with -s or look at captured output) and then asserts.
"""

import pytest

from ellrc.autgrp import (
    AutoMap,
    close_under_composition,
    fixed_field_generator,
    make_group,
    negation_map,
    split_fibers,
)
from ellrc.curve import (
    Pt,
    add_points,
    find_special_curve,
    scalar_mul,
    subgroup_of_order,
)
from ellrc.ffield import find_root_of_unity
from ellrc.funcfield import evaluate, riemann_roch_basis
from ellrc.lrc import (
    bounds,
    build_code_single,
    build_code_two,
    check_torsion_condition,
)
from ellrc.verify import distance_certificate, full_audit, min_distance_exact
from ellrc import linalg

import numpy as np


def _verdict(num: int, label: str, ok: bool, details: str = "") -> None:
    line = f"criterion {num} ({label}): {'PASS' if ok else 'FAIL'}"
    if details:
        line += f" -- {details}"
    print(line)
    assert ok, line


def _neg_group(C):
    return close_under_composition([negation_map(C)], C.ctx)


def _order3_group(C):
    ctx = C.ctx
    u = find_root_of_unity(ctx, 3)
    return close_under_composition(
        [AutoMap(u, ctx.zero(), ctx.one(), ctx.zero(), ctx.zero())], ctx
    )


def _y_plus_one_group(C):
    ctx = C.ctx
    return close_under_composition(
        [AutoMap(ctx.one(), ctx.zero(), ctx.one(), ctx.zero(), ctx.one())], ctx
    )


def test_criterion_1_point_counts():
    counts = (
        find_special_curve("ord-j0", 7).N,
        find_special_curve("ord-j1728", 37).N,
        find_special_curve("ord-j0", 169).N,
        find_special_curve("max-char2", 1).N,
    )
    ok = counts == (63, 1440, 28899, 81)
    _verdict(1, "point counts", ok, f"N = {counts}")


def test_criterion_2_fixed_field_generators():
    import test_autgrp as ta

    C49 = find_special_curve("ord-j0", 7)
    G49 = make_group(C49, subgroup_of_order(C49, 7), _neg_group(C49))
    z49 = fixed_field_generator(C49, G49)
    ok1 = ta._affine_match(
        C49, z49, [0, 6, 0, 0, 3, 0, 0, 1], [1, 0, 0, 5, 0, 0, 1]
    )

    C37 = find_special_curve("ord-j1728", 37)
    u = find_root_of_unity(C37.ctx, 4)
    zero = C37.ctx.zero()
    A = close_under_composition([AutoMap(u * u, zero, u * u * u, zero, zero)], C37.ctx)
    G37 = make_group(C37, subgroup_of_order(C37, 5), A)
    z37 = fixed_field_generator(C37, G37)
    ok2 = ta._affine_match(
        C37,
        z37,
        [26, 0, 30, 0, 13, 0, 24, 0, 7, 0, 11],
        [10, 0, 4, 0, 8, 0, 3, 0, 1],
    )
    _verdict(2, "fixed-field generators", ok1 and ok2, f"F_49 {ok1}, F_37^2 {ok2}")


def test_criterion_3_optimal_single_mode():
    ok = True
    notes = []
    for base, h, m_max in ((7, 7, 4), (169, 9, 5)):
        C = find_special_curve("ord-j0", base)
        H = subgroup_of_order(C, h)
        A = _neg_group(C)
        r = 2 * h - 1
        for m in range(2, m_max + 1):
            for t in range(1, m):
                code = build_code_single(C, H, A, m, t)
                good = (code.n, code.k) == ((r + 1) * m, r * t + 1)
                good &= (
                    linalg.rank(code.ctx, np.asarray(code.matrix, dtype=np.int64))
                    == code.k
                )
                lower, wit = distance_certificate(code)
                good &= lower == wit == (m - t) * (r + 1)
                classical = code.n - code.k - (-(-code.k // code.r)) + 2
                good &= wit == classical
                if not good:
                    notes.append(f"q^2={C.ctx.q} m={m} t={t}")
                ok &= good
    _verdict(3, "optimal single-mode sweep", ok, "; ".join(notes) or "all rows optimal")


def test_criterion_4_two_mode_char2():
    from ellrc.verify import repair_audit

    C = find_special_curve("max-char2", 1)
    H = subgroup_of_order(C, 3)
    A1, A2 = _y_plus_one_group(C), _order3_group(C)
    ok = True
    notes = []
    for m in (1, 2, 3):
        code = build_code_two(C, H, A1, A2, m, 12 * m)
        good = (code.r1, code.r2) == (5, 6)
        good &= code.k >= code.t1 * code.r1 + code.t2 * code.r2 + 2 - code.L
        good &= repair_audit(code, trials=100).passed
        swapped = build_code_two(C, H, A2, A1, m, 12 * m)
        good &= (swapped.r1, swapped.r2) == (8, 3)
        good &= repair_audit(swapped, trials=100).passed
        if not good:
            notes.append(f"m={m}")
        ok &= good
    tiny = build_code_two(C, H, A1, A2, 1, 12)
    ok_tiny = tiny.k == 1 and min_distance_exact(tiny) >= tiny.n - tiny.L
    ok &= ok_tiny
    _verdict(
        4,
        "two recovering sets, characteristic 2",
        ok,
        "; ".join(notes) or f"m=1..3 both orders, k<=3 exact distance {ok_tiny}",
    )


@pytest.mark.extended
def test_criterion_5_headline_dimension():
    C = find_special_curve("max", 5**6)
    H = subgroup_of_order(C, 4)
    code = build_code_two(
        C, H, _neg_group(C), _order3_group(C), 661, 14001, with_functions=False
    )
    bound = code.t1 * code.r1 + code.t2 * code.r2 + 2 - code.L
    ok = code.n == 15864 and bound == 1006 and code.k == 1083
    _verdict(
        5,
        "headline two-set dimension",
        ok,
        f"n = {code.n}, bound = {bound}, k = {code.k} (expected 1083)",
    )


def test_criterion_6_defect_values():
    rows = [
        ((15864, 1006, 14004, [7, 8]), "0.044945"),
        ((15864, 1392, 12528, [4, 11]), "0.112708"),
        ((15582, 3090, 10878, [97, 98]), "0.101656"),
        # this reference value is not reproducible from the defect
        # definition (which gives 0.069375); it matches the ceiling-type
        # bound instead -- see test_lrc.py::test_defect_reference_values
        ((15582, 777, 13720, [49, 146]), "0.069247"),
        ((15768, 4160, 8964, [17, 18]), "0.152270"),
        ((15768, 1885, 11691, [9, 26]), "0.134006"),
    ]
    got = [bounds(*args).defect_str for args, _ in rows]
    want = [exp for _, exp in rows]
    ok = got == want
    _verdict(6, "defect arithmetic", ok, f"got {got}")


def test_criterion_7_property_audits():
    C49 = find_special_curve("ord-j0", 7)
    H = subgroup_of_order(C49, 7)
    code = build_code_single(C49, H, _neg_group(C49), 4, 2)
    ok = full_audit(code, trials=5).passed

    C64 = find_special_curve("max-char2", 1)
    code2 = build_code_two(
        C64,
        subgroup_of_order(C64, 3),
        _y_plus_one_group(C64),
        _order3_group(C64),
        3,
        36,
    )
    ok &= full_audit(code2, trials=5).passed

    # invariance of z on every place outside H, for every group element
    G = code.G
    z = code.z
    Hset = set(G.H)
    for P in C49.points():
        if P in Hset:
            continue
        v = evaluate(z, P)
        for g in G.elements:
            ok &= evaluate(z, G.apply(g, P)) == v

    # genus-one dimension formula on the divisors the construction uses
    ok &= len(riemann_roch_basis(C49, [(P, 2) for P in H])) == 14

    # every fiber sums to [|A|](sum of H)
    hsum = Pt.infinity()
    for P in G.H:
        hsum = add_points(C49, hsum, P)
    target = scalar_mul(C49, 2, hsum)
    for fib in code.fibers:
        acc = Pt.infinity()
        for P in fib.places:
            acc = add_points(C49, acc, P)
        ok &= acc == target

    _verdict(7, "property audits", ok)


def test_criterion_8_torsion_condition_checker():
    C = find_special_curve("max", 5**6)
    ok = True
    details = []
    expected = {2: True, 3: False, 7: True}
    for h in (2, 3, 7):
        holds, det = check_torsion_condition(5**6, h, 2, 3)
        small = big = 0
        for P in C.points():
            Q = scalar_mul(C, h, P)
            if Q.inf:
                small += 1
                big += 1
            elif scalar_mul(C, h, Q).inf:
                big += 1
        brute_count = big - small
        brute_holds = h * h * 2 * 3 > brute_count
        ok &= holds == brute_holds == expected[h]
        ok &= det["rhs"] == brute_count and det["lhs"] == h * h * 6
        details.append(f"h={h}: {det['lhs']} > {brute_count} is {holds}")
    _verdict(8, "torsion side condition", ok, "; ".join(details))
