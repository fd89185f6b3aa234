import pytest
from hypothesis import given, settings, strategies as st

from ellrc.curve import (
    Pt,
    add_points,
    find_special_curve,
    find_special_primes,
    group_structure,
    is_subgroup,
    make_curve,
    neg_point,
    point_order,
    scalar_mul,
    subgroup_of_order,
    torsion_subgroup,
)
from ellrc.errors import NoSuchSubgroup, SingularCurve
from ellrc.ffield import make_extension, make_prime_field


@pytest.fixture(scope="module")
def c49():
    return find_special_curve("ord-j0", 7)


@pytest.fixture(scope="module")
def c64():
    return find_special_curve("max-char2", 1)


def test_singular_curve_rejected():
    ctx = make_prime_field(7)
    with pytest.raises(SingularCurve):
        make_curve(ctx, 0, 0, 0, 0, 0)


def test_point_counts_of_named_curves(c49, c64):
    assert c49.N == 63
    assert c64.N == 81
    c37 = find_special_curve("ord-j1728", 37)
    assert c37.N == 1440


def test_group_law_exhaustive_small(c49):
    pts = c49.points()
    O = Pt.infinity()
    for P in pts[:12]:
        assert add_points(c49, P, O) == P
        assert add_points(c49, P, neg_point(c49, P)).inf
    # associativity on a sampled triple grid
    sample = pts[::7]
    for P in sample:
        for Q in sample:
            for R in sample[:4]:
                lhs = add_points(c49, add_points(c49, P, Q), R)
                rhs = add_points(c49, P, add_points(c49, Q, R))
                assert lhs == rhs


_C64 = find_special_curve("max-char2", 1)


@given(data=st.data())
@settings(max_examples=40, deadline=None)
def test_group_law_random_triples(data):
    C = _C64
    pts = C.points()
    i = data.draw(st.integers(0, len(pts) - 1))
    j = data.draw(st.integers(0, len(pts) - 1))
    k = data.draw(st.integers(0, len(pts) - 1))
    P, Q, R = pts[i], pts[j], pts[k]
    assert add_points(C, add_points(C, P, Q), R) == add_points(C, P, add_points(C, Q, R))


def test_scalar_mul_matches_repeated_addition(c49):
    P = next(p for p in c49.points() if not p.inf)
    acc = Pt.infinity()
    for n in range(1, 12):
        acc = add_points(c49, acc, P)
        assert scalar_mul(c49, n, P) == acc


def test_group_structure(c49, c64):
    n1, n2, g1, g2 = group_structure(c49)
    assert (n1, n2) == (3, 21)
    assert point_order(c49, g2, 63) == 21
    assert (group_structure(c64)[0], group_structure(c64)[1]) == (9, 9)


def test_exponent_annihilates(c64):
    for P in c64.points():
        assert scalar_mul(c64, 9, P).inf


def test_torsion_sizes(c64):
    assert len(torsion_subgroup(c64, 3)) == 9
    assert len(torsion_subgroup(c64, 9)) == 81


def test_subgroup_of_order_pinned_char2(c64):
    H = subgroup_of_order(c64, 3)
    ctx = c64.ctx
    zero, one = ctx.zero(), ctx.one()
    assert H[-1].inf
    assert set(H) == {Pt.affine(zero, zero), Pt.affine(zero, one), Pt.infinity()}


def test_subgroup_of_order_generic(c49):
    for h in (3, 7, 9, 21):
        H = subgroup_of_order(c49, h)
        assert len(H) == h and H[-1].inf
        assert is_subgroup(c49, H)
    with pytest.raises(NoSuchSubgroup):
        subgroup_of_order(c49, 4)


def test_special_primes():
    assert find_special_primes("eisenstein", 50) == [7, 19, 37]
    assert find_special_primes("gaussian", 50) == [5, 17, 37]
    assert find_special_primes("eisenstein", 1) == []


def test_maximal_family_over_25():
    C = find_special_curve("max", 25)
    assert C.N == 36


def test_ordinary_family_prime_power_base():
    C = find_special_curve("ord-j0", 169)
    assert C.ctx.q == 13**4
    assert C.N == 28899
