import itertools
import random

import pytest

from pfoliate.derivation import Derivation, apply, classify, NOT_P_CLOSED, is_multiplicative_at, p_power
from pfoliate.errors import MaxStepsExhausted, PreconditionError
from pfoliate.gfpoly import Ring
from pfoliate.linalg import is_nilpotent, mat_pow
from pfoliate.parser import parse_derivation, parse_poly
from pfoliate.samples import random_pclosed_rank1
from pfoliate.singularity import (
    LC_MULTIPLICATIVE,
    NOT_LC,
    REGULAR,
    REGULAR_CANONICAL,
    STRICTLY_LC,
    ann_foliation,
    ann_surface_classify,
    classify_rank1,
    commuting_multiplicative_check,
    fedder_f_pure,
    find_nonlc_divisor,
    jordan_chain_coordinates,
    linear_part,
    semisimple_linear_check,
)


def P(text, ring):
    return parse_poly(text, ring)


def D(text, ring):
    return parse_derivation(text, ring)


def R(names, p):
    return Ring(tuple(names.split(",")), p)


def test_linear_part_examples():
    ring = R("x,y", 5)
    assert [list(r) for r in linear_part(Derivation.toric(ring, (2, 3))).matrix] == [[2, 0], [0, 3]]
    assert linear_part(D("x^2*dx + y^2*dy", ring)).is_zero()
    assert [list(r) for r in linear_part(D("x*dy + y*dx", ring)).matrix] == [[0, 1], [1, 0]]
    # row = variable of the linear term, column = the coordinate the field acts on
    assert [list(r) for r in linear_part(D("y*dx", ring)).matrix] == [[0, 0], [1, 0]]
    with pytest.raises(PreconditionError):
        linear_part(D("dx + x*dy", ring))


def test_linear_part_at_a_point():
    ring = R("x,y", 5)
    E = D("(x - 1)*dx + 2*(y - 3)*dy", ring)
    assert [list(r) for r in linear_part(E, (1, 3)).matrix] == [[1, 0], [0, 2]]


def test_nilpotent_examples():
    assert not is_nilpotent([[1, 0], [0, 1]], 3)
    assert is_nilpotent([[0, 0], [0, 0]], 3)
    assert is_nilpotent([[0, 1], [0, 0]], 3)


def test_classify_rank1_examples():
    for p in (2, 3, 5):
        ring = R("x,y", p)
        for a, b in itertools.product(range(1, p), repeat=2):
            v = classify_rank1(Derivation.toric(ring, (a, b)))
            assert v.status == LC_MULTIPLICATIVE and v.cross_check_ok
        v = classify_rank1(D(f"x^{p}*dx + y^{p}*dy", ring))
        assert v.status == NOT_LC and v.cross_check_ok
        if p > 2:
            assert classify_rank1(D("dx + x*dy", ring)).status == REGULAR_CANONICAL
    with pytest.raises(PreconditionError):
        classify_rank1(D("x*dy + y*dx", R("x,y", 2)))
    with pytest.raises(PreconditionError):
        classify_rank1(D("x^2*dx + x*y*dy", R("x,y", 3)))  # not saturated


def test_never_terminal_note():
    v = classify_rank1(Derivation.toric(R("x,y", 3), (1, 1)))
    assert any("terminal" in n for n in v.notes)


def test_classify_rank1_at_other_points():
    ring = R("x,y", 5)
    E = D("(x - 2)*dx + 3*(y - 1)*dy", ring)
    assert classify_rank1(E, (2, 1)).status == LC_MULTIPLICATIVE
    assert classify_rank1(E, (0, 0)).status == REGULAR_CANONICAL


def test_nonlc_examples():
    for p in (2, 3, 5):
        cert = find_nonlc_divisor(D("x^2*dx + y^2*dy", R("x,y", p)))
        assert (cert.blowups, cert.a_F, cert.epsilon) == (1, -1, 0)
    cert = find_nonlc_divisor(D("y*dx + x^3*dy", R("x,y", 3)))
    assert cert.blowups == 2 and cert.a_F < -cert.epsilon
    assert [(r.a_F, r.epsilon) for r in cert.intermediate] == [(0, 0)]
    with pytest.raises(PreconditionError):
        find_nonlc_divisor(Derivation.toric(R("x,y", 3), (1, 2)))
    with pytest.raises(MaxStepsExhausted):
        find_nonlc_divisor(D("y*dx + z*dy", R("x,y,z", 3)), max_steps=1)


def test_nonlc_jordan_centre_must_be_invariant():
    with pytest.raises(PreconditionError):
        find_nonlc_divisor(D("y*dx + z^3*dy", R("x,y,z", 3)))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_nonlc_order_bound(p):
    for n in (2, 3):
        ring = Ring(("x", "y", "z")[:n], p)
        for d in range(2, p + 2):
            E = Derivation(ring, [ring.var(v) ** d for v in ring.names])
            if classify(E).status == NOT_P_CLOSED:
                continue
            cert = find_nonlc_divisor(E)
            assert cert.order == d and cert.a_F <= -d + 1 and cert.a_F < -cert.epsilon


def test_jordan_chain():
    M = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    rows, r = jordan_chain_coordinates(M, 5)
    assert r == 3 and len(rows) == 3


def test_fedder_examples():
    assert not fedder_f_pure(P("s^2 - (u^2*v - u*v^2)", R("u,v,s", 2)))
    assert fedder_f_pure(P("s^2 - u*v", R("u,v,s", 3)))
    assert fedder_f_pure(P("s^2 - u*v", R("u,v,s", 5)))
    for p in (2, 3, 5):
        assert fedder_f_pure(P("x", R("x,y", p)))
        assert not fedder_f_pure(P("x^2", R("x,y", p)))


def test_surface_consistency():
    # lc verdict of the foliation matches F-purity of the presented quotient
    assert classify_rank1(D("x^2*dx + y^2*dy", R("x,y", 2))).is_lc == fedder_f_pure(
        P("s^2 - (u^2*v - u*v^2)", R("u,v,s", 2))
    )
    for p in (3, 5):
        assert classify_rank1(D("x*dx - y*dy", R("x,y", p))).is_lc == fedder_f_pure(P("s^2 - u*v", R("u,v,s", p)))


def test_semisimple_examples():
    for p in (2, 3, 5):
        for a, b in itertools.product(range(p), repeat=2):
            assert semisimple_linear_check(Derivation.toric(R("x,y", p), (a, b)))
    E = D("x*dy + y*dx", R("x,y", 3))
    assert p_power(E) == E and semisimple_linear_check(E)
    with pytest.raises(PreconditionError):
        semisimple_linear_check(D("x^3*dx", R("x,y", 3)))


def test_no_nilpotent_linear_part_with_identity_p_power():
    rng = random.Random(5)
    for p in (2, 3, 5):
        for k in range(60):
            ring = R("x,y", p) if k % 2 else R("x,y,z", p)
            E, kind = random_pclosed_rank1(rng, ring)
            if kind == "multiplicative" and p_power(E) == E:
                M = linear_part(E).matrix
                assert not is_nilpotent(M, p)
                assert mat_pow(M, p, p) == [list(r) for r in M]


def test_commuting_multiplicative_check():
    ring = R("x,y", 3)
    assert commuting_multiplicative_check([D("x*dx", ring), D("y*dy", ring)])
    assert not commuting_multiplicative_check([D("x*dx", ring), D("x^3*dy", ring)])


def test_ann_examples():
    for p in (3, 5):
        ring = R("x,y", p)
        assert ann_foliation(P("x*y", ring)) == [D("x*dx - y*dy", ring)]
    r5 = R("x,y", 5)
    assert ann_foliation(P("x^2 + y^3", r5)) == [D("3*y^2*dx - 2*x*dy", r5)]
    with pytest.raises(PreconditionError):
        ann_foliation(P("x^5", r5))
    r3 = R("x,y,z", 3)
    s = P("x*y*z + x^2 + z", r3)
    gens = ann_foliation(s)
    assert len(gens) == 2 and all(apply(g, s).is_zero() for g in gens)


def test_ann_surface_examples():
    v = ann_surface_classify(P("x*y", R("x,y", 5)))
    assert v.status == STRICTLY_LC and v.agrees and [list(r) for r in v.matrix] == [[1, 0], [0, 4]]
    # second-order coefficients 1, 1, 1 give [[1, -2], [2, -1]], determinant 3
    v = ann_surface_classify(P("x^2 + x*y + y^2", R("x,y", 5)))
    assert [list(r) for r in v.matrix] == [[1, 3], [2, 4]]
    assert v.status == STRICTLY_LC and v.cross_check == LC_MULTIPLICATIVE and v.agrees
    assert ann_surface_classify(P("x + y^3", R("x,y", 5))).status == REGULAR
    v = ann_surface_classify(P("x^3 + y^2", R("x,y", 5)))
    assert v.status == NOT_LC and v.agrees
    with pytest.raises(PreconditionError):
        ann_surface_classify(P("x^2*y", R("x,y", 5)))


def test_criterion_agreement_small_sample():
    rng = random.Random(17)
    for p in (2, 3, 5):
        for k in range(40):
            E, _ = random_pclosed_rank1(rng, R("x,y", p))
            v = classify_rank1(E)
            assert (v.status == LC_MULTIPLICATIVE) == is_multiplicative_at(E, v.point)
