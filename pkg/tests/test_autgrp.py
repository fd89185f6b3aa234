import pytest

from ellrc.autgrp import (
    AutoMap,
    aut_catalog,
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
    neg_point,
    scalar_mul,
    subgroup_of_order,
)
from ellrc.errors import NotASubgroup
from ellrc.ffield import find_root_of_unity
from ellrc.funcfield import evaluate, func_from, valuation

C49 = find_special_curve("ord-j0", 7)
C64 = find_special_curve("max-char2", 1)
C37 = find_special_curve("ord-j1728", 37)


def test_catalog_orders():
    assert len(aut_catalog(C49)) == 6  # j = 0, odd characteristic
    assert len(aut_catalog(C37)) == 4  # j = 1728
    assert len(aut_catalog(C64)) == 24  # char 2, j = 0


def test_catalog_maps_are_automorphisms():
    for C in (C49, C64):
        for s in aut_catalog(C):
            s.validate(C)
            for P in C.points()[:8]:
                assert C.on_curve(s.apply(P)) or s.apply(P).inf


def test_compose_inverse_identity():
    for C in (C49, C64, C37):
        for s in aut_catalog(C):
            assert s.compose(s.inverse()).is_identity()


def test_negation_map_matches_group_negation():
    for C in (C49, C37):
        neg = negation_map(C)
        for P in C.points()[:10]:
            assert neg.apply(P) == neg_point(C, P)


def test_closure():
    neg = negation_map(C49)
    A = close_under_composition([neg], C49.ctx)
    assert len(A) == 2 and A[0].is_identity()


def test_make_group_rejects_bad_H():
    pts = C49.points()
    bad = [p for p in pts if not p.inf][:6] + [Pt.infinity()]
    with pytest.raises(NotASubgroup):
        make_group(C49, bad, close_under_composition([negation_map(C49)], C49.ctx))


@pytest.fixture(scope="module")
def g49():
    H = subgroup_of_order(C49, 7)
    A = close_under_composition([negation_map(C49)], C49.ctx)
    return make_group(C49, H, A)


def test_fixed_field_generator_poles(g49):
    z = fixed_field_generator(C49, g49)
    for P in g49.H:
        assert valuation(z, P) == -2


def test_invariance_exhaustive(g49):
    z = fixed_field_generator(C49, g49)
    Hset = set(g49.H)
    for P in C49.points():
        if P in Hset:
            continue
        v = evaluate(z, P)
        for elem in g49.elements:
            assert evaluate(z, g49.apply(elem, P)) == v


def test_split_fibers_abel_sums(g49):
    z = fixed_field_generator(C49, g49)
    fibers = split_fibers(C49, g49, z)
    assert all(len(f.places) == g49.order for f in fibers)
    # the fiber over alpha sums to |A| * (sum of H) = O for this group
    hsum = Pt.infinity()
    for P in g49.H:
        hsum = add_points(C49, hsum, P)
    target = scalar_mul(C49, len(g49.A), hsum)
    for f in fibers:
        acc = Pt.infinity()
        for P in f.places:
            acc = add_points(C49, acc, P)
        assert acc == target


def _affine_match(C, z, u, d):
    """Solve z_ref = a*z + b from two values and check the identity."""
    zref = func_from(C, u, [], d)
    pts = []
    vals = set()
    for P in C.points():
        if P.inf:
            continue
        try:
            v = evaluate(z, P)
            vr = evaluate(zref, P)
        except Exception:
            continue
        if v.v not in vals:
            pts.append((v, vr))
            vals.add(v.v)
        if len(pts) == 2:
            break
    (v1, r1), (v2, r2) = pts
    a = (r1 - r2) / (v1 - v2)
    b = r1 - a * v1
    from ellrc.funcfield import const_func

    diff = zref - (z.scale(a) + const_func(C, b))
    return diff.is_zero()


def test_z_affine_equivalent_to_reference_f49(g49):
    z = fixed_field_generator(C49, g49)
    # (x^7 + 3x^4 + 6x) / (x^6 + 5x^3 + 1)
    assert _affine_match(C49, z, [0, 6, 0, 0, 3, 0, 0, 1], [1, 0, 0, 5, 0, 0, 1])


def test_z_affine_equivalent_to_reference_f37sq():
    H = subgroup_of_order(C37, 5)
    u = find_root_of_unity(C37.ctx, 4)
    zero = C37.ctx.zero()
    s = AutoMap(u * u, zero, u * u * u, zero, zero)
    A = close_under_composition([s], C37.ctx)
    assert len(A) == 4
    G = make_group(C37, H, A)
    z = fixed_field_generator(C37, G)
    num = [26, 0, 30, 0, 13, 0, 24, 0, 7, 0, 11]
    den = [10, 0, 4, 0, 8, 0, 3, 0, 1]
    assert _affine_match(C37, z, num, den)
