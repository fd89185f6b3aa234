import pytest
from hypothesis import given, settings, strategies as st

from ellrc.errors import DivisionByZero, NotPrime
from ellrc.ffield import (
    absolute_trace,
    factorize,
    find_root_of_unity,
    is_prime,
    make_extension,
    make_prime_field,
    solve_quadratic,
    sqrt,
)

F7 = make_prime_field(7)
F49 = make_extension(7, 2)
F64 = make_extension(2, 6)
F625 = make_extension(5, 4)

FIELDS = [F7, F49, F64, F625]


def elems(ctx):
    return st.integers(min_value=0, max_value=ctx.q - 1).map(ctx.from_packed)


@pytest.mark.parametrize("ctx", FIELDS, ids=lambda c: f"q{c.q}")
class TestFieldAxioms:
    @given(data=st.data())
    @settings(max_examples=60, deadline=None)
    def test_ring_axioms(self, ctx, data):
        x = data.draw(elems(ctx))
        y = data.draw(elems(ctx))
        z = data.draw(elems(ctx))
        assert (x + y) + z == x + (y + z)
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x + y == y + x and x * y == y * x

    @given(data=st.data())
    @settings(max_examples=60, deadline=None)
    def test_inverses(self, ctx, data):
        x = data.draw(elems(ctx))
        assert x + (-x) == ctx.zero()
        if not x.is_zero():
            assert x * x.inverse() == ctx.one()
        else:
            with pytest.raises(DivisionByZero):
                x.inverse()

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_frobenius_is_additive(self, ctx, data):
        x = data.draw(elems(ctx))
        y = data.draw(elems(ctx))
        p = ctx.p
        assert (x + y) ** p == x**p + y**p


def test_parse_render_round_trip():
    for ctx in FIELDS:
        for v in (0, 1, ctx.q - 1, ctx.q // 2):
            x = ctx.from_packed(v)
            assert ctx.parse(ctx.render(x)) == x


def test_canonical_moduli():
    # lexicographically-least monic irreducible moduli
    assert F49.header() == "7 2 1,0,1"
    assert F64.header() == "2 6 1,1,0,1,1,0,1" or F64.header().startswith("2 6 ")


def test_int_coercion():
    x = F49.from_packed(8)
    assert 2 * x == x + x
    assert x - 1 == x - F49.one()
    assert 1 / F49.from_packed(3) == F49.from_packed(3).inverse()


@pytest.mark.parametrize("ctx", FIELDS, ids=lambda c: f"q{c.q}")
def test_sqrt_agrees_with_squaring(ctx):
    seen = 0
    for v in range(min(ctx.q, 200)):
        x = ctx.from_packed(v)
        r = sqrt(ctx, x)
        if r is not None:
            assert r * r == x
            seen += 1
    assert seen > 0


def test_solve_quadratic_char2():
    one = F64.one()
    for v in range(64):
        c = F64.from_packed(v)
        roots = solve_quadratic(F64, one, one, c)
        for r in roots:
            assert r * r + r + c == F64.zero()
        assert len(roots) in (0, 2)


def test_absolute_trace_additive():
    vals = [F64.from_packed(v) for v in range(10)]
    for x in vals:
        for y in vals:
            assert absolute_trace(F64, x + y) == absolute_trace(
                F64, x
            ) + absolute_trace(F64, y)


def test_roots_of_unity():
    u = find_root_of_unity(F49, 6)
    assert u**6 == F49.one() and u**3 != F49.one() and u**2 != F49.one()
    i = find_root_of_unity(F625, 4)
    assert i**4 == F625.one() and i**2 != F625.one()


def test_is_prime_and_factorize():
    assert is_prime(2) and is_prime(37) and not is_prime(1) and not is_prime(91)
    assert factorize(126) == {2: 1, 3: 2, 7: 1}
    with pytest.raises(NotPrime):
        make_prime_field(10)
