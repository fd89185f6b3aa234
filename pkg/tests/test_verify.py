import itertools
from types import SimpleNamespace

import numpy as np
import pytest

from ellrc.autgrp import AutoMap, close_under_composition, negation_map
from ellrc.curve import find_special_curve, subgroup_of_order
from ellrc.errors import BudgetExceeded
from ellrc.ffield import find_root_of_unity, make_prime_field
from ellrc.lrc import build_code_single, build_code_two
from ellrc.verify import (
    VerifyReport,
    curve_sanity,
    distance_certificate,
    full_audit,
    lower_distance_bound,
    min_distance_exact,
    repair_audit,
    submatrix_audit,
    theorem_audit,
)

C49 = find_special_curve("ord-j0", 7)
C64 = find_special_curve("max-char2", 1)


def _single_49(m, t):
    H = subgroup_of_order(C49, 7)
    A = close_under_composition([negation_map(C49)], C49.ctx)
    return build_code_single(C49, H, A, m, t)


def _two_64(m, d0):
    ctx = C64.ctx
    H = subgroup_of_order(C64, 3)
    u = find_root_of_unity(ctx, 3)
    a1 = close_under_composition(
        [AutoMap(ctx.one(), ctx.zero(), ctx.one(), ctx.zero(), ctx.one())], ctx
    )
    a2 = close_under_composition(
        [AutoMap(u, ctx.zero(), ctx.one(), ctx.zero(), ctx.zero())], ctx
    )
    return build_code_two(C64, H, a1, a2, m, d0)


@pytest.fixture(scope="module")
def code49():
    return _single_49(4, 2)


@pytest.fixture(scope="module")
def code64():
    return _two_64(3, 36)


def test_report_status_and_passed():
    rep = VerifyReport(seed=1)
    rep.add("a", True)
    rep.add("b", None, "skipped")
    assert rep.passed
    rep.add("c", False, "boom")
    assert not rep.passed
    statuses = [s for _, s, _ in rep.checks]
    assert statuses == ["PASS", "SKIP", "FAIL"]
    assert rep.as_dict()["checks"][2]["details"] == "boom"
    assert any(line.startswith("FAIL") for line in rep.lines())


def test_exact_distance_matches_naive_enumeration():
    # independent oracle: enumerate the full span of a small matrix
    ctx = make_prime_field(7)
    M = np.array(
        [[1, 0, 0, 3, 5, 1], [0, 1, 0, 2, 2, 6], [0, 0, 1, 1, 4, 4]],
        dtype=np.int64,
    )
    stub = SimpleNamespace(ctx=ctx, matrix=M, k=3, n=6)
    naive = 6
    for msg in itertools.product(range(7), repeat=3):
        if msg == (0, 0, 0):
            continue
        word = [0] * 6
        for a, row in zip(msg, M):
            for j, v in enumerate(row):
                word[j] = ctx.add_raw(word[j], ctx.mul_raw(a, int(v)))
        naive = min(naive, sum(1 for v in word if v))
    assert min_distance_exact(stub) == naive


def test_exact_distance_constant_code():
    code = _two_64(1, 12)
    assert code.k == 1
    d = min_distance_exact(code)
    assert d == code.n == 18
    assert d >= lower_distance_bound(code) == 12


def test_exact_distance_refuses_oversized_enumeration(code49):
    with pytest.raises(BudgetExceeded):
        min_distance_exact(code49, budget=10**6)


def test_distance_certificate_is_sharp_single_mode(code49):
    lower, witness = distance_certificate(code49)
    assert lower == witness == 28


def test_distance_certificate_two_mode(code64):
    lower, witness = distance_certificate(code64, samples=50, seed=11)
    assert lower == 36
    assert witness is not None and witness >= lower
    again = distance_certificate(code64, samples=50, seed=11)
    assert again == (lower, witness)


def test_repair_audit_all_pass(code49, code64):
    for code in (code49, code64):
        rep = repair_audit(code, trials=5, seed=7)
        assert rep.passed, rep.lines()
        names = [n for n, _, _ in rep.checks]
        assert "recovering sets disjoint" in names
        assert "corrupted helper changes the repaired value" in names


def test_submatrix_audit(code49, code64):
    assert submatrix_audit(code49).passed
    rep = submatrix_audit(code64)
    assert rep.passed and len(rep.checks) == 2


def test_theorem_audit_single(code49):
    rep = theorem_audit(code49)
    assert rep.passed, rep.lines()
    byname = {n: s for n, s, _ in rep.checks}
    assert byname["meets the classical locality bound with equality"] == "PASS"


def test_theorem_audit_two(code64):
    rep = theorem_audit(code64)
    assert rep.passed, rep.lines()
    byname = {n: s for n, s, _ in rep.checks}
    # |H| = 3 is not a perfect square, so the torsion check is out of scope
    assert byname["torsion-avoidance inequality"] == "SKIP"


def test_curve_sanity_reports():
    rep = curve_sanity(C49)
    assert rep.passed, rep.lines()
    byname = {n: (s, d) for n, s, d in rep.checks}
    assert byname["ordinary-family point count formula"][0] == "PASS"
    rep64 = curve_sanity(C64)
    assert rep64.passed
    byname64 = {n: (s, d) for n, s, d in rep64.checks}
    assert byname64["maximality status"][1] == "maximal"


def test_full_audit_green(code49):
    rep = full_audit(code49, trials=3)
    assert rep.passed, rep.lines()
    assert rep.as_dict()["passed"] is True
