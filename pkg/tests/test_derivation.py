import itertools
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import derivations, polys, rings
from pfoliate.derivation import (
    ADDITIVE,
    ALPHA_P,
    MU_P,
    NOT_P_CLOSED,
    P_CLOSED,
    Derivation,
    additive_rescale,
    apply,
    classify,
    coaction_expand,
    coaction_is_homomorphism,
    fixed_ideal_gens,
    hochschild_residual,
    is_multiplicative_at,
    jacobson_commuting_residual,
    lie_bracket,
    p_power,
)
from pfoliate.errors import PreconditionError, RingMismatchError
from pfoliate.gfpoly import Ring, degree_cap_override
from pfoliate.parser import parse_derivation, parse_poly
from pfoliate.samples import random_pclosed_rank1


def D(text, ring, frozen=()):
    return parse_derivation(text, ring, frozen)


def P(text, ring):
    return parse_poly(text, ring)


def toric(a, b, p):
    return Derivation.toric(Ring(("x", "y"), p), (a, b))


def test_apply_examples():
    ring = Ring(("x", "y"), 5)
    assert apply(toric(2, 3, 5), P("x^2*y^3", ring)) == P("3*x^2*y^3", ring)  # 2*2 + 3*3 = 13
    assert apply(toric(2, 3, 5), ring.const(4)).is_zero()
    assert apply(D("x^5*dx + y^5*dy", ring), P("x^5*y - x*y^5", ring)).is_zero()
    with pytest.raises(RingMismatchError):
        apply(toric(1, 1, 3), P("x", ring))


def test_bracket_examples():
    ring = Ring(("x", "y"), 3)
    assert lie_bracket(D("dx", ring), D("x*dx", ring)) == D("dx", ring)
    E = D("x^2*dy + y*dx", ring)
    assert lie_bracket(E, E).is_zero()
    assert lie_bracket(D("x*dx", ring), D("y*dy", ring)).is_zero()


def test_p_power_examples():
    for p in (2, 3, 5):
        for a, b in itertools.product(range(p), range(p)):
            assert p_power(toric(a, b, p)) == toric(a, b, p)
        ring = Ring(("x", "y"), p)
        assert p_power(D(f"x^{p}*dx + y^{p}*dy", ring)).is_zero()
    r2 = Ring(("x", "y"), 2)
    assert p_power(D("x*dy + y*dx", r2)) == D("x*dx + y*dy", r2)


def test_classify_examples():
    c = classify(toric(1, 1, 3))
    assert c.status == P_CLOSED and c.a_num == Ring(("x", "y"), 3).one() and c.a_den == 1
    r2 = Ring(("x", "y"), 2)
    assert classify(D("x*dy + y*dx", r2)).status == NOT_P_CLOSED
    for p in (2, 3, 5, 7):
        assert classify(D("x^2*dx", Ring(("x", "y"), p))).status == ADDITIVE


def test_classify_cross_identity_on_samples():
    rng = random.Random(3)
    for p in (2, 3, 5):
        for k in range(30):
            ring = Ring(("x", "y", "z") if k % 3 == 0 else ("x", "y"), p)
            E, _ = random_pclosed_rank1(rng, ring)
            c = classify(E)
            assert c.status != NOT_P_CLOSED
            assert not c.a_den.is_zero()
            for i in range(ring.nvars):
                assert c.a_num * E.coeffs[i] == c.a_den * c.witness.coeffs[i]


def test_is_multiplicative_examples():
    assert is_multiplicative_at(toric(1, 1, 3), (0, 0))
    assert not is_multiplicative_at(D("x^2*dx", Ring(("x", "y"), 3)), (0, 0))
    lau = Ring(("x",), 3, laurent="x")
    assert is_multiplicative_at(D("x*dx", lau), (1,))
    assert classify(additive_rescale(D("x*dx", lau), lau.var("x"))).status == ADDITIVE
    with pytest.raises(PreconditionError):
        is_multiplicative_at(D("x*dy + y*dx", Ring(("x", "y"), 2)), (0, 0))


def test_additive_rescale_examples():
    ring = Ring(("x", "y"), 2)
    assert additive_rescale(D("x*dx", ring), P("x", ring)) == D("x^2*dx", ring)
    out = additive_rescale(toric(1, 1, 2), P("x", ring))
    assert out == D("x^2*dx + x*y*dy", ring) and p_power(out).is_zero()
    with pytest.raises(PreconditionError):
        additive_rescale(D("dx", ring), P("y", ring))


def test_identity_examples():
    r2 = Ring(("x", "y"), 2)
    assert hochschild_residual(P("x", r2), D("dx", r2)).is_zero()
    r3 = Ring(("x", "y"), 3)
    E = D("x^2*dy + y*dx", r3)
    assert hochschild_residual(r3.one(), E).is_zero()
    assert jacobson_commuting_residual(D("x*dx", r3), D("y*dy", r3)).is_zero()
    assert jacobson_commuting_residual(D("dx", r2), D("dy", r2)).is_zero()
    assert jacobson_commuting_residual(D("x*dx", r3), D("x*dx", r3)).is_zero()
    with pytest.raises(PreconditionError):
        jacobson_commuting_residual(D("dx", r3), D("x*dy", r3))


def test_coaction_examples():
    for p in (2, 3, 5):
        ring = Ring(("x", "y"), p)
        x = ring.var("x")
        z = ring.zero()
        assert coaction_expand(D("dx", ring), x, ALPHA_P) == [x, ring.one()] + [z] * (p - 2)
        assert coaction_expand(D("x*dx", ring), x, MU_P) == [z, x] + [z] * (p - 2)
    r3 = Ring(("x", "y"), 3)
    assert coaction_is_homomorphism(D("x*dx", r3), P("x", r3), P("x", r3), MU_P)
    assert coaction_expand(D("x*dx", r3), P("x^2", r3), MU_P)[2] == P("x^2", r3)
    with pytest.raises(PreconditionError):
        coaction_expand(D("x*dx", r3), P("x", r3), ALPHA_P)
    with pytest.raises(PreconditionError):
        coaction_expand(D("dx", r3), P("x", r3), MU_P)


def test_coaction_at_identity():
    # t = 1 recovers s for mu_p; t = 0 recovers s for alpha_p
    ring = Ring(("x", "y"), 5)
    s = P("x^3*y + 2*x + y^2 + 1", ring)
    total = ring.zero()
    for c in coaction_expand(toric(2, 3, 5), s, MU_P):
        total = total + c
    assert total == s
    assert coaction_expand(D("dx + y^5*dy", ring), s, ALPHA_P)[0] == s


def test_fixed_ideal_examples():
    for p in (2, 3, 5):
        ring = Ring(("x", "y"), p)
        for a, b in itertools.product(range(1, p), range(1, p)):
            assert fixed_ideal_gens(toric(a, b, p)) == [P(f"{a}*x", ring), P(f"{b}*y", ring)]
        assert fixed_ideal_gens(D("dx", ring)) == [ring.one()]
        r4 = Ring(("x", "y", "z", "t"), p)
        E = D(f"x^{p}*dx + y^{p}*dy + t*dz", r4, frozen=("t",))
        assert fixed_ideal_gens(E) == [P(f"x^{p}", r4), P(f"y^{p}", r4), P("t", r4)]


def test_frozen_variable_must_be_killed():
    ring = Ring(("x", "t"), 3)
    with pytest.raises(PreconditionError):
        Derivation(ring, [ring.var("x"), ring.one()], frozen=("t",))


# ---- properties

small_rings = rings(("x", "y"), (2, 3, 5))


@given(st.data())
def test_leibniz(data):
    ring = data.draw(small_rings)
    E = data.draw(derivations(ring))
    f, g = data.draw(polys(ring, 3)), data.draw(polys(ring, 3))
    assert apply(E, f * g) == f * apply(E, g) + g * apply(E, f)


@given(st.data())
def test_p_power_is_a_derivation(data):
    ring = data.draw(small_rings)
    E = data.draw(derivations(ring, 1, 2))
    f, g = data.draw(polys(ring, 2, 3)), data.draw(polys(ring, 2, 3))
    with degree_cap_override(200):
        W = p_power(E)
        assert apply(W, f * g) == f * apply(W, g) + g * apply(W, f)
        h = f
        for _ in range(ring.p):
            h = apply(E, h)
        assert apply(W, f) == h


@given(st.data())
def test_equal_coefficients_equal_action(data):
    ring = data.draw(small_rings)
    E = data.draw(derivations(ring))
    F = Derivation(ring, [c + ring.zero() for c in E.coeffs])
    f = data.draw(polys(ring, 3))
    assert apply(E, f) == apply(F, f)


@given(st.data())
def test_hochschild_formula(data):
    ring = data.draw(small_rings)
    a = data.draw(polys(ring, 2, 3))
    E = data.draw(derivations(ring, 2, 3))
    with degree_cap_override(300):
        assert hochschild_residual(a, E).is_zero()


@given(st.data())
def test_scaling_keeps_closure_status(data):
    ring = data.draw(small_rings)
    E = data.draw(derivations(ring, 2, 2))
    lam = data.draw(st.integers(1, ring.p - 1))
    assume(not E.is_zero())
    with degree_cap_override(300):
        assert classify(E.scale(lam)).status == classify(E).status


@given(st.sampled_from((2, 3, 5)), st.data())
def test_additive_rescale_is_additive(p, data):
    ring = Ring(("x", "y"), p)
    a, b = data.draw(st.integers(0, p - 1)), data.draw(st.integers(0, p - 1))
    x = data.draw(polys(ring, 2, 3))
    E = toric(a, b, p)
    assume(not apply(E, x).is_zero())
    with degree_cap_override(400):
        assert p_power(additive_rescale(E, x)).is_zero()
