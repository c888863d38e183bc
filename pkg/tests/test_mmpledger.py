from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfoliate.birational import toric_blowup_sequence
from pfoliate.errors import PreconditionError
from pfoliate.mmpledger import (
    POSITIVE_CLASSES,
    DivisorLedger,
    SingClass,
    adjunction_residual,
    explain_transfer,
    foliation_class_holds,
    guaranteed_at_least,
    implies,
    pair_class_holds,
    pullback_divisor,
    pullback_ledger,
    pullback_multiplicity,
    pushforward_ledger,
    transfer_class,
    transfer_discrepancy,
    validate_transfer_table,
)


def test_pushforward_examples():
    assert pushforward_ledger(DivisorLedger.of(2, ("E", 1, 1))).coefficient("E") == Fraction(1, 2)
    assert pushforward_ledger(DivisorLedger.of(5, ("E", 1, 0))).coefficient("E") == 1
    assert pushforward_ledger(DivisorLedger.of(3, ("E", "2/3", 1))).coefficient("E") == Fraction(2, 9)


def test_pullback_examples():
    assert pullback_multiplicity(0, 5) == 1
    assert pullback_multiplicity(1, 5) == 5
    for eps in (0, 1):
        back = pullback_ledger(pushforward_ledger(DivisorLedger.of(7, ("E", 1, eps))))
        assert back.coefficient("E") == 1
    e = DivisorLedger.of(3, ("E", "1/3", 1)).entries[0]
    assert pullback_divisor(e, 3).coefficient == 1


def test_adjunction_examples():
    assert adjunction_residual(DivisorLedger.of(2, ("E", 5, 1))).is_zero()
    assert adjunction_residual(DivisorLedger((), 3)).entries == ()
    L = DivisorLedger.of(3, ("A", "1/2", 0), ("B", -4, 1), ("C", "7/5", 1))
    assert adjunction_residual(L).is_zero()


def test_ledger_validation():
    with pytest.raises(PreconditionError):
        DivisorLedger.of(3, ("E", 1, 0), ("E", 2, 1))
    with pytest.raises(PreconditionError):
        DivisorLedger.of(3, ("E", 1, 2))


def test_transfer_discrepancy_examples():
    assert transfer_discrepancy(0, 0, True, 5) == 0
    assert transfer_discrepancy(1, 0, True, 3) == 1
    # smooth surface point (c = 1) and the lc place of the toric field
    b = toric_blowup_sequence(1, 1, 2).records[0].a_F
    assert transfer_discrepancy(1, b, False, 2) == 0


def test_transfer_class_examples():
    assert transfer_class("terminal", "canonical") == SingClass.TERMINAL
    assert transfer_class("lc", "klt") == SingClass.KLT
    assert transfer_class("klt", "lc") == SingClass.KLT
    assert transfer_class("lc", "lc") == SingClass.LC
    assert transfer_class("not_lc", "canonical") == SingClass.NOT_LC
    assert guaranteed_at_least is transfer_class
    with pytest.raises(PreconditionError):
        transfer_class("klt", "not_lc")


def test_table_is_consistent_with_implications():
    for x in POSITIVE_CLASSES:
        for f in POSITIVE_CLASSES:
            g = transfer_class(x, f)
            assert implies(g, SingClass.LC)


def test_implication_order():
    assert implies(SingClass.TERMINAL, SingClass.KLT)
    assert implies(SingClass.CANONICAL, SingClass.LC)
    assert not implies(SingClass.CANONICAL, SingClass.KLT)
    assert not implies(SingClass.LC, SingClass.KLT)


def test_boundary_cells():
    # lc pair, lc foliation, non-invariant divisor at both bounds
    for p in (2, 3, 5, 7):
        a = transfer_discrepancy(-1, -1, False, p)
        assert a == -1 and pair_class_holds(SingClass.LC, a)
        # klt pair just above -1 stays klt
        a = transfer_discrepancy(Fraction(-999, 1000), -1, False, p)
        assert pair_class_holds(SingClass.KLT, a)


def test_explain_lines():
    lines = explain_transfer("lc", "lc", 3)
    assert lines[-1].endswith("lc")
    assert any("(c + 2*b)/3" in line for line in lines)
    assert explain_transfer("not_lc", "lc", 3)


def test_validate_small():
    rep = validate_transfer_table(1000, (2, 3, 5), seed=4)
    assert rep.total_violations == 0 and len(rep.cells) == 16 and rep.total_samples == 16000


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=50)


@given(st.sampled_from((2, 3, 5, 7)),
       st.lists(st.tuples(fractions, st.integers(0, 1)), max_size=6))
def test_round_trip_identity(p, items):
    L = DivisorLedger.of(p, *[(f"E{i}", c, e) for i, (c, e) in enumerate(items)])
    assert adjunction_residual(L).is_zero()
    assert [e.coefficient for e in pullback_ledger(pushforward_ledger(L)).entries] == [c for c, _ in items]


@given(st.sampled_from((2, 3, 5, 7)), fractions, fractions, fractions, st.booleans())
def test_transfer_monotone(p, c, b, delta, inv):
    delta = abs(delta)
    a = transfer_discrepancy(c, b, inv, p)
    assert transfer_discrepancy(c + delta, b, inv, p) >= a
    assert transfer_discrepancy(c, b + delta, inv, p) >= a
    if delta:
        assert transfer_discrepancy(c + delta, b, inv, p) > a


@given(st.sampled_from(POSITIVE_CLASSES), st.sampled_from(POSITIVE_CLASSES), st.sampled_from((2, 3, 5, 7)),
       fractions, fractions, st.integers(0, 1))
def test_guarantee_holds(x, f, p, c, b, eps):
    if pair_class_holds(x, c) and foliation_class_holds(f, b, eps):
        assert pair_class_holds(transfer_class(x, f), transfer_discrepancy(c, b, eps == 0, p))
