"""Ledger-level bookkeeping for purely inseparable quotients q: X -> Y = X/F.

Canonical classes are symbolic; only the exceptional corrections (the
discrepancies c of (X, Delta), b of F and a of (Y, Delta_Y)) are numbers.
All arithmetic is exact with :class:`fractions.Fraction`.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError


class SingClass(str, enum.Enum):
    TERMINAL = "terminal"
    CANONICAL = "canonical"
    KLT = "klt"
    LC = "lc"
    NOT_LC = "not_lc"

    def __str__(self) -> str:
        return self.value


POSITIVE_CLASSES = (SingClass.TERMINAL, SingClass.CANONICAL, SingClass.KLT, SingClass.LC)

_IMPLIES = {
    SingClass.TERMINAL: {SingClass.TERMINAL, SingClass.CANONICAL, SingClass.KLT, SingClass.LC},
    SingClass.CANONICAL: {SingClass.CANONICAL, SingClass.LC},
    SingClass.KLT: {SingClass.KLT, SingClass.LC},
    SingClass.LC: {SingClass.LC},
    SingClass.NOT_LC: set(),
}


def implies(a: SingClass, b: SingClass) -> bool:
    """Whether class a implies class b (terminal => canonical => lc, terminal => klt => lc)."""
    return b == SingClass.NOT_LC or b in _IMPLIES[SingClass(a)]


@dataclass(frozen=True)
class DivisorEntry:
    id: str
    coefficient: Fraction
    epsilon: int


@dataclass(frozen=True)
class DivisorLedger:
    entries: tuple[DivisorEntry, ...]
    p: int
    on_quotient: bool = False

    def __post_init__(self):
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise PreconditionError("divisor ids must be unique")
        for e in self.entries:
            if e.epsilon not in (0, 1):
                raise PreconditionError("epsilon must be 0 or 1")

    @classmethod
    def of(cls, p: int, *items: tuple[str, Fraction | int | str, int]) -> DivisorLedger:
        return cls(tuple(DivisorEntry(i, Fraction(c), eps) for i, c, eps in items), p)

    def coefficient(self, divisor_id: str) -> Fraction:
        for e in self.entries:
            if e.id == divisor_id:
                return e.coefficient
        raise KeyError(divisor_id)

    def is_zero(self) -> bool:
        return all(e.coefficient == 0 for e in self.entries)


def pushforward_factor(epsilon: int, p: int) -> Fraction:
    return 1 - Fraction(epsilon * (p - 1), p)


def pushforward_ledger(delta: DivisorLedger) -> DivisorLedger:
    """Delta_Y = sum (1 - eps (p-1)/p) delta_E q(E)."""
    p = delta.p
    entries = tuple(
        DivisorEntry(e.id, e.coefficient * pushforward_factor(e.epsilon, p), e.epsilon) for e in delta.entries
    )
    return DivisorLedger(entries, p, on_quotient=True)


def pullback_multiplicity(epsilon: int, p: int) -> int:
    """q^* E^Y = E for invariant E and p E otherwise."""
    if epsilon not in (0, 1):
        raise PreconditionError("epsilon must be 0 or 1")
    return 1 if epsilon == 0 else p


def pullback_divisor(entry: DivisorEntry, p: int) -> DivisorEntry:
    return DivisorEntry(entry.id, entry.coefficient * pullback_multiplicity(entry.epsilon, p), entry.epsilon)


def pullback_ledger(delta_y: DivisorLedger) -> DivisorLedger:
    return DivisorLedger(tuple(pullback_divisor(e, delta_y.p) for e in delta_y.entries), delta_y.p)


def adjunction_residual(delta: DivisorLedger) -> DivisorLedger:
    """q^* q_* Delta - Delta, entry by entry; identically zero."""
    back = pullback_ledger(pushforward_ledger(delta))
    entries = tuple(
        DivisorEntry(e.id, b.coefficient - e.coefficient, e.epsilon) for e, b in zip(delta.entries, back.entries)
    )
    return DivisorLedger(entries, delta.p)


def transfer_discrepancy(c: Fraction | int, b: Fraction | int, invariant: bool, p: int) -> Fraction:
    """Discrepancy on Y of q(E) from c = a(E; X, Delta) and b = a(E; F)."""
    s = Fraction(c) + (p - 1) * Fraction(b)
    return s if invariant else s / p


def pair_class_holds(cls: SingClass, c: Fraction) -> bool:
    cls = SingClass(cls)
    if cls == SingClass.TERMINAL:
        return c > 0
    if cls == SingClass.CANONICAL:
        return c >= 0
    if cls == SingClass.KLT:
        return c > -1
    if cls == SingClass.LC:
        return c >= -1
    return True


def foliation_class_holds(cls: SingClass, b: Fraction, epsilon: int) -> bool:
    cls = SingClass(cls)
    if cls == SingClass.TERMINAL:
        return b > 0
    if cls == SingClass.CANONICAL:
        return b >= 0
    if cls == SingClass.KLT:
        return b > -epsilon
    if cls == SingClass.LC:
        return b >= -epsilon
    return True


def transfer_class(x_class: SingClass | str, f_class: SingClass | str) -> SingClass:
    """Best class of (Y, Delta_Y) guaranteed from the classes of (X, Delta) and F.

    This is a guarantee, not the actual class of the quotient.  ``not_lc``
    means no guarantee.
    """
    x, f = SingClass(x_class), SingClass(f_class)
    if f == SingClass.NOT_LC:
        raise PreconditionError("no transfer statement for a foliation that is not lc")
    if x == SingClass.NOT_LC:
        return SingClass.NOT_LC
    if f in (SingClass.TERMINAL, SingClass.CANONICAL):
        return x
    if f == SingClass.KLT:
        return SingClass.KLT
    # f is lc
    return SingClass.LC if x == SingClass.LC else SingClass.KLT


guaranteed_at_least = transfer_class


_PAIR_BOUND = {
    SingClass.TERMINAL: "c > 0",
    SingClass.CANONICAL: "c >= 0",
    SingClass.KLT: "c > -1",
    SingClass.LC: "c >= -1",
}
_FOL_BOUND = {
    SingClass.TERMINAL: ("b > 0", "b > 0"),
    SingClass.CANONICAL: ("b >= 0", "b >= 0"),
    SingClass.KLT: ("b > 0", "b > -1"),
    SingClass.LC: ("b >= 0", "b >= -1"),
}


def explain_transfer(x_class: SingClass | str, f_class: SingClass | str, p: int) -> list[str]:
    """The inequalities behind :func:`transfer_class`, one line per case."""
    x, f = SingClass(x_class), SingClass(f_class)
    out = transfer_class(x, f)
    if x == SingClass.NOT_LC:
        return ["(X, Delta) is not lc: nothing is guaranteed for the quotient"]
    inv_b, non_b = _FOL_BOUND[f]
    lines = [
        f"hypotheses: {_PAIR_BOUND[x]} for (X, Delta); {inv_b} on invariant and {non_b} on non-invariant divisors for F",
        f"invariant E: a = c + {p - 1}*b",
        f"non-invariant E: a = (c + {p - 1}*b)/{p}",
    ]
    lo_c = {"c > 0": 0, "c >= 0": 0, "c > -1": -1, "c >= -1": -1}[_PAIR_BOUND[x]]
    lo_inv = 0
    lo_non = -1 if f in (SingClass.KLT, SingClass.LC) else 0
    strict_c = ">" in _PAIR_BOUND[x] and ">=" not in _PAIR_BOUND[x]
    inv_val = lo_c + (p - 1) * lo_inv
    non_val = Fraction(lo_c + (p - 1) * lo_non, p)
    strict_inv = strict_c or (">" in inv_b and ">=" not in inv_b)
    strict_non = strict_c or (">" in non_b and ">=" not in non_b)
    lines.append(f"invariant E: a {'>' if strict_inv else '>='} {inv_val}")
    lines.append(f"non-invariant E: a {'>' if strict_non else '>='} {non_val}")
    lines.append(f"guaranteed: (Y, Delta_Y) is {out}")
    return lines


def _sample_above(rng: random.Random, bound: int, strict: bool) -> Fraction:
    q = rng.randint(1, 12)
    roll = rng.random()
    if roll < 0.2:
        return Fraction(bound) + (Fraction(1, rng.choice((q, 1000, 10**6))) if strict else 0)
    lo = 1 if strict else 0
    return Fraction(bound * q + rng.randint(lo, 6 * q), q)


def _sample_pair(rng: random.Random, cls: SingClass) -> Fraction:
    if cls == SingClass.TERMINAL:
        return _sample_above(rng, 0, True)
    if cls == SingClass.CANONICAL:
        return _sample_above(rng, 0, False)
    if cls == SingClass.KLT:
        return _sample_above(rng, -1, True)
    return _sample_above(rng, -1, False)


def _sample_foliation(rng: random.Random, cls: SingClass, eps: int) -> Fraction:
    if cls == SingClass.TERMINAL:
        return _sample_above(rng, 0, True)
    if cls == SingClass.CANONICAL:
        return _sample_above(rng, 0, False)
    if cls == SingClass.KLT:
        return _sample_above(rng, -eps, True)
    return _sample_above(rng, -eps, False)


@dataclass
class CellReport:
    x_class: SingClass
    f_class: SingClass
    guaranteed: SingClass
    samples: int
    violations: list = field(default_factory=list)


@dataclass
class TransferReport:
    cells: list[CellReport]

    @property
    def total_violations(self) -> int:
        return sum(len(c.violations) for c in self.cells)

    @property
    def total_samples(self) -> int:
        return sum(c.samples for c in self.cells)


def validate_transfer_table(
    samples: int = 10_000, primes: Sequence[int] = (2, 3, 5, 7), seed: int = 0
) -> TransferReport:
    """Sample discrepancies meeting each cell's hypotheses and test the guarantee.

    A cell is an (X class, F class) pair; each sample draws p from ``primes``
    in rotation, a random epsilon, c above the X bound and b above the F
    bound (boundary values included on purpose).
    """
    rng = random.Random(seed)
    cells = []
    for x in POSITIVE_CLASSES:
        for f in POSITIVE_CLASSES:
            g = transfer_class(x, f)
            rep = CellReport(x, f, g, samples)
            for k in range(samples):
                p = primes[k % len(primes)]
                eps = rng.randint(0, 1)
                c = _sample_pair(rng, x)
                b = _sample_foliation(rng, f, eps)
                if not (pair_class_holds(x, c) and foliation_class_holds(f, b, eps)):
                    raise AssertionError("sampler produced a sample outside the hypotheses")
                a = transfer_discrepancy(c, b, eps == 0, p)
                if not pair_class_holds(g, a):
                    rep.violations.append((c, b, eps, p, a))
            cells.append(rep)
    return TransferReport(cells)
