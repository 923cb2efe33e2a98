import pytest
from hypothesis import given, settings, strategies as st

from polyprog.parser import (
    ProgressionSyntaxError,
    parse_progression,
    render_progression,
)
from polyprog.polycore import UniPoly, binomial_poly, from_binomial_basis
from polyprog.progression import progression

Y = UniPoly((0, 1))
Y2 = UniPoly((0, 0, 1))
Y3 = UniPoly((0, 0, 0, 1))


def test_parse_worked_examples():
    expr = parse_progression("x, x+y, x+2y, x+y^3")
    assert expr.progression == progression(Y, Y * 2, Y3)
    expr5 = parse_progression("x, x+y^2, x+2y^2, x+y^3, x+2y^3")
    assert expr5.progression == progression(Y2, Y2 * 2, Y3, Y3 * 2)


def test_parse_binomial_atoms_and_mixed_terms():
    expr = parse_progression("x, x + C(y,2), x + y - 2*y^2")
    assert expr.progression.polys[0] == binomial_poly(2)
    assert expr.progression.polys[1] == UniPoly((0, 1, -2))


def test_parse_rejects_non_integral():
    with pytest.raises(ProgressionSyntaxError) as err:
        parse_progression("x, x+y/2")
    assert "not integral" in str(err.value)


def test_parse_rejects_duplicates():
    with pytest.raises(ProgressionSyntaxError) as err:
        parse_progression("x, x+y, x+y")
    assert "duplicate" in str(err.value)


def test_parse_rejects_zero_term():
    with pytest.raises(ProgressionSyntaxError):
        parse_progression("x, x+y-y")


def test_syntax_error_carries_position():
    with pytest.raises(ProgressionSyntaxError) as err:
        parse_progression("x, x+y, q")
    assert err.value.position == 8    # the offending 'q'


def test_requires_leading_x():
    with pytest.raises(ProgressionSyntaxError):
        parse_progression("y, x+y")
    with pytest.raises(ProgressionSyntaxError):
        parse_progression("x")


def test_roundtrip_canonical():
    expr = parse_progression("x, x + y + y^2, x + 3*y")
    again = parse_progression(expr.canonical)
    assert again.progression == expr.progression
    assert again.canonical == expr.canonical


coeff_vectors = st.lists(
    st.lists(st.integers(min_value=-4, max_value=4), min_size=1, max_size=4)
    .filter(lambda c: any(c)),
    min_size=1, max_size=4, unique_by=tuple)


@given(coeff_vectors)
@settings(max_examples=500, deadline=None)
def test_roundtrip_random_progressions(vectors):
    polys, seen = [], set()
    for coords in vectors:
        p = from_binomial_basis([0] + coords)
        if p.is_zero or p in seen:
            return
        seen.add(p)
        polys.append(p)
    prog = progression(*polys)
    text = render_progression(prog)
    assert parse_progression(text).progression == prog
