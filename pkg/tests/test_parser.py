import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import derivations, polys, rings
from pfoliate.derivation import Derivation
from pfoliate.errors import ParseError
from pfoliate.gfpoly import Ring
from pfoliate.parser import parse_derivation, parse_poly, tokenize


def test_toric_parses():
    ring = Ring(("x", "y"), 5)
    assert parse_derivation("2*x*dx + 3*y*dy", ring) == Derivation.toric(ring, (2, 3))
    assert parse_derivation("2 x dx + 3 y dy", ring) == Derivation.toric(ring, (2, 3))
    assert parse_derivation("x*(2*dx) + dy*y*3", ring) == Derivation.toric(ring, (2, 3))


def test_coefficients_reduce():
    ring = Ring(("x", "y"), 3)
    assert parse_poly("4*x + 3*y", ring) == ring.var("x")
    assert parse_poly("-x", ring) == ring.var("x").scale(2)
    assert parse_poly("x*y (mod 3)", ring) == ring.var("x") * ring.var("y")


def test_error_offsets():
    ring = Ring(("x", "y"), 3)
    with pytest.raises(ParseError) as e:
        parse_poly("x +", ring)
    assert e.value.offset == 3
    with pytest.raises(ParseError) as e:
        parse_poly("x + w", ring)
    assert e.value.offset == 4 and "unknown variable" in str(e.value)
    with pytest.raises(ParseError) as e:
        parse_poly("x*dx", ring)
    assert e.value.offset == 2
    with pytest.raises(ParseError) as e:
        parse_poly("x (mod 5)", ring)
    assert e.value.offset == 7
    with pytest.raises(ParseError):
        parse_poly("x $ y", ring)


def test_derivation_shape_errors():
    ring = Ring(("x", "y"), 3)
    for bad in ("dx*dy", "dx^2", "x + dx", "(x + dx)*y"):
        with pytest.raises(ParseError):
            parse_derivation(bad, ring)


def test_negative_exponent_only_on_laurent_slot():
    ring = Ring(("u", "v"), 3, laurent="u")
    assert parse_poly("u^-1*v", ring).terms == {(-1, 1): 1}
    with pytest.raises(ParseError):
        parse_poly("v^-1", ring)


def test_clashing_names():
    with pytest.raises(ParseError):
        parse_poly("x", Ring(("x", "dx"), 3))


def test_tokens():
    assert [t.kind for t in tokenize("3*x^2")] == ["int", "op", "name", "op", "int", "end"]


@given(st.data())
def test_poly_round_trip(data):
    ring = data.draw(rings())
    f = data.draw(polys(ring, 3, 5))
    assert parse_poly(str(f), ring) == f


@given(st.data())
def test_derivation_round_trip(data):
    ring = data.draw(rings())
    D = data.draw(derivations(ring))
    assert parse_derivation(str(D), ring) == D
