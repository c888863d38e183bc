import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfoliate.constants import (
    certify_generators,
    check_relation,
    kernel_truncated,
    subalgebra_member_truncated,
    toric_constants,
)
from pfoliate.derivation import Derivation, apply
from pfoliate.errors import PreconditionError
from pfoliate.gfpoly import Ring
from pfoliate.parser import parse_derivation, parse_poly


def P(text, ring):
    return parse_poly(text, ring)


def D(text, ring, frozen=()):
    return parse_derivation(text, ring, frozen)


def brute_minimal(weights, p):
    """Minimal nonzero elements of {e : w.e = 0 mod p} by a full box scan."""
    n = len(weights)
    box = [e for e in itertools.product(range(p + 1), repeat=n) if any(e) and sum(a * b for a, b in zip(weights, e)) % p == 0]
    le = lambda a, b: a != b and all(x <= y for x, y in zip(a, b))
    return {e for e in box if not any(le(f, e) for f in box)}


def test_toric_constants_examples():
    assert set(toric_constants((1, 1), 2).minimal_gens) == {(2, 0), (0, 2), (1, 1)}
    assert set(toric_constants((1, 0), 3).minimal_gens) == {(3, 0), (0, 1)}
    assert toric_constants((1, 4), 5).contains((1, 1))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_toric_constants_match_box_scan(p):
    for n in (2, 3):
        for w in itertools.product(range(p), repeat=n):
            assert set(toric_constants(w, p).minimal_gens) == brute_minimal(w, p)


def test_kernel_examples():
    r2 = Ring(("x", "y"), 2)
    K = kernel_truncated([Derivation.toric(r2, (1, 1))], 2)
    assert set(K.basis) == {r2.one(), P("x^2", r2), P("y^2", r2), P("x*y", r2)}
    for p in (2, 3, 5):
        ring = Ring(("x", "y"), p)
        K = kernel_truncated([D(f"x^{p}*dx + y^{p}*dy", ring)], p + 1)
        for f in (f"x^{p}", f"y^{p}", f"x^{p}*y - x*y^{p}"):
            assert K.contains(P(f, ring))
    r5 = Ring(("x", "y"), 5)
    K = kernel_truncated([D("dx", r5)], 3)
    assert set(K.basis) == {P(f"y^{k}", r5) for k in range(4)}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kernel_matches_monomial_oracle(p):
    for n in (2, 3):
        ring = Ring(("x", "y", "z")[:n], p)
        d = 3 * p if n == 2 else p + 1
        for w in itertools.product(range(p), repeat=n):
            K = kernel_truncated([Derivation.toric(ring, w)], d)
            expected = {e for e in ring.monomials_up_to(d) if sum(a * b for a, b in zip(w, e)) % p == 0}
            assert {next(iter(f.terms)) for f in K.basis} == expected
            assert all(f.is_monomial() for f in K.basis)


def test_kernel_basis_is_exact_and_reduced():
    ring = Ring(("x", "y"), 3)
    E = D("y*dx + x^3*dy", ring)
    K = kernel_truncated([E], 7)
    leads = [f.leading()[0] for f in K.basis]
    assert len(set(leads)) == len(leads)
    for f in K.basis:
        assert apply(E, f).is_zero()
        assert f.leading()[1] == 1
        for g in K.basis:
            if g is not f:
                assert g.coeff(f.leading()[0]) == 0


def test_kernel_contains_p_th_powers_and_base():
    ring = Ring(("x", "y", "t"), 3)
    E = D("(x^2 + t)*dx + y*t*dy", ring, frozen=("t",))
    K = kernel_truncated([E], 6)
    for e in ring.monomials_up_to(6):
        if all(a % 3 == 0 for a in e):
            assert K.contains(ring.monomial(e))
    assert K.contains(ring.var("t"))


def test_kernel_closed_under_products():
    ring = Ring(("x", "y"), 3)
    E = D("x^3*dx + y^3*dy", ring)
    K4 = kernel_truncated([E], 4)
    K8 = kernel_truncated([E], 8)
    for f, g in itertools.product(K4.basis, repeat=2):
        assert K8.contains(f * g)


def test_subalgebra_examples():
    r2 = Ring(("x", "y"), 2)
    assert subalgebra_member_truncated(P("x^2*y^2", r2), [P("x^2", r2), P("y^2", r2)], 4)
    assert not subalgebra_member_truncated(P("x*y", r2), [P("x^2", r2), P("y^2", r2)], 2)
    for p in (2, 3):
        ring = Ring(("x", "y"), p)
        gens = [P(f"x^{p}", ring), P(f"y^{p}", ring), P(f"x^{p}*y - x*y^{p}", ring)]
        f = P(f"x^{2 * p}*y - x^{p + 1}*y^{p}", ring)
        assert subalgebra_member_truncated(f, gens, 2 * p + 1)


def test_certify_examples():
    r2 = Ring(("x", "y"), 2)
    rep = certify_generators([D("x^2*dx + y^2*dy", r2)], [P("x^2", r2), P("y^2", r2), P("x^2*y - x*y^2", r2)], 6)
    assert rep.passed
    for p in (2, 3):
        ring = Ring(("x", "y"), p)
        for a, b in itertools.product(range(1, p), repeat=2):
            gens = toric_constants((a, b), p).as_polys(ring)
            assert certify_generators([Derivation.toric(ring, (a, b))], gens, 3 * p).passed
    rep = certify_generators([Derivation.toric(r2, (1, 1))], [P("x^2", r2)], 2)
    assert not rep.passed and rep.first_failure in (P("y^2", r2), P("x*y", r2))
    with pytest.raises(PreconditionError):
        certify_generators([Derivation.toric(r2, (1, 1))], [P("x", r2)], 2)


def test_check_relation_examples():
    src, dst = Ring(("u", "v", "s"), 2), Ring(("x", "y"), 2)
    assign = {"u": P("x^2", dst), "v": P("y^2", dst), "s": P("x^2*y - x*y^2", dst)}
    assert check_relation(assign, P("s^2 - (u^2*v - u*v^2)", src))
    s3, d3 = Ring(("u", "v", "s"), 3), Ring(("x", "y"), 3)
    assert check_relation({"u": P("x^2", d3), "v": P("y^2", d3), "s": P("x*y", d3)}, P("s^2 - u*v", s3))
    mixed = Ring(("u", "x"), 5)
    assert not check_relation({"u": P("x", Ring(("x",), 5))}, P("u^2 - x", mixed))
    assert check_relation({"u": P("x", Ring(("x",), 5))}, P("u - x", mixed))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_additive_relation_general_p(p):
    src, dst = Ring(("u", "v", "s"), p), Ring(("x", "y"), p)
    assign = {"u": P(f"x^{p}", dst), "v": P(f"y^{p}", dst), "s": P(f"x^{p}*y - x*y^{p}", dst)}
    assert check_relation(assign, P(f"s^{p} - (u^{p}*v - u*v^{p})", src))
    assert check_relation(assign, P("s^2 - (u^2*v - u*v^2)", src)) == (p == 2)


@given(st.sampled_from((2, 3, 5)), st.data())
def test_random_kernel_elements_are_constants(p, data):
    ring = Ring(("x", "y"), p)
    coeffs = [data.draw(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(0, p - 1), max_size=3))
              for _ in range(2)]
    from pfoliate.gfpoly import Poly
    E = Derivation(ring, [Poly(ring, c) for c in coeffs])
    for f in kernel_truncated([E], p + 2).basis:
        assert apply(E, f).is_zero()
