"""Regression corpus: worked examples and acceptance checks across modules.

Each case is a function returning a small JSON-able detail dict; a failed
expectation raises :class:`CaseFailure`.  :func:`run_corpus` streams one JSON
line per case and a summary line.
"""
from __future__ import annotations

import itertools
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, TextIO

from . import report
from .birational import (
    blowup_chart,
    discrepancy_rank1,
    is_invariant,
    pullback,
    saturate_rank1,
    toric_blowup_sequence,
)
from .constants import certify_generators, check_relation, kernel_truncated, toric_constants
from .derivation import (
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
    p_power,
)
from .errors import PfoliateError, PreconditionError
from .families import (
    FamilyDerivation,
    fiber_restrict,
    fiber_vs_quotient_compare,
    find_lift,
    lift_witness,
    mu_p_family_commutes,
    noncommutativity_obstruction,
)
from .gfpoly import Poly, Ring, exact_divide, monomial_content, monomial_ideal_member
from .mmpledger import (
    POSITIVE_CLASSES,
    DivisorLedger,
    SingClass,
    adjunction_residual,
    pullback_ledger,
    pullback_multiplicity,
    pushforward_ledger,
    transfer_class,
    validate_transfer_table,
)
from .parser import parse_derivation, parse_poly
from .samples import identity_sample, random_pclosed_rank1, random_poly
from .singularity import (
    LC_MULTIPLICATIVE,
    NOT_LC,
    REGULAR,
    REGULAR_CANONICAL,
    STRICTLY_LC,
    ann_foliation,
    ann_surface_classify,
    classify_rank1,
    fedder_f_pure,
    find_nonlc_divisor,
    linear_part,
    semisimple_linear_check,
)

PRIMES = (2, 3, 5)


class CaseFailure(AssertionError):
    pass


def expect(actual, expected, what: str) -> None:
    if actual != expected:
        raise CaseFailure(f"{what}: expected {expected}, got {actual}")


def ensure(cond: bool, what: str) -> None:
    if not cond:
        raise CaseFailure(what)


@dataclass(frozen=True)
class Case:
    id: str
    tags: tuple[str, ...]
    run: Callable[[], dict]

    def matches(self, flt: str | None) -> bool:
        return not flt or flt in self.tags or flt in self.id


def R(names: str, p: int, laurent: str | None = None) -> Ring:
    return Ring(tuple(names.split(",")), p, laurent)


def P(text: str, ring: Ring) -> Poly:
    return parse_poly(text, ring)


def Dv(text: str, ring: Ring, frozen=()) -> Derivation:
    return parse_derivation(text, ring, frozen)


def toric(a: int, b: int, p: int) -> Derivation:
    return Derivation.toric(R("x,y", p), (a, b))


def units(p: int) -> range:
    return range(1, p)


# ---------------------------------------------------------------- gfpoly

def case_substitute_chart() -> dict:
    src, dst = R("x,y", 5), R("u,v", 5)
    img = P("x*y", src).substitute({"x": P("u", dst), "y": P("u*v", dst)}, dst)
    expect(img, P("u^2*v", dst), "xy under x->u, y->uv")
    return {"image": img}


def case_exact_divide_toric() -> dict:
    out = {}
    for p in PRIMES:
        ring = R("x,y", p)
        for a in units(p):
            q = exact_divide(toric(a, 1, p).coeff("x"), ring.var("x"))
            expect(q, ring.const(a), f"a*x / x for a={a}, p={p}")
        out[p] = "ok"
    return out


def case_ideal_non_commutativity() -> dict:
    for p in (2, 3, 5):
        ring = R("x,y,z,t", p)
        gens = [P(f"x^{p}", ring), P(f"y^{p}", ring), P("t", ring)]
        ensure(not monomial_ideal_member(ring.one(), gens), f"1 must not lie in (x^p, y^p, t), p={p}")
        ensure(monomial_ideal_member(P(f"x^{p}*z + t*y", ring), gens), "x^p z + t y lies in the ideal")
    return {}


def case_monomial_content_toric() -> dict:
    for p in PRIMES:
        ring = R("u,v", p)
        for a, b in itertools.product(units(p), units(p)):
            if a != b:
                c = monomial_content([P(f"{a}*u", ring), P(f"{(b - a) % p}*v", ring)])
                expect(c, ring.one(), f"content of [au, (b-a)v], a={a}, b={b}")
    return {}


def case_frobenius() -> dict:
    for p in PRIMES:
        ring = R("x,y", p)
        expect(P("x + y", ring) ** p, P(f"x^{p} + y^{p}", ring), f"(x+y)^p, p={p}")
    return {}


# ---------------------------------------------------------------- derivation

def case_apply_toric() -> dict:
    for p in PRIMES:
        ring = R("x,y", p)
        for a, b in itertools.product(units(p), units(p)):
            D = toric(a, b, p)
            for i, j in itertools.product(range(4), range(4)):
                m = ring.monomial((i, j))
                expect(apply(D, m), m.scale(a * i + b * j), f"apply toric({a},{b}) to x^{i}y^{j}")
    return {}


def case_additive_constants() -> dict:
    for p in PRIMES:
        ring = R("x,y", p)
        D = Dv(f"x^{p}*dx + y^{p}*dy", ring)
        expect(apply(D, P(f"x^{p}*y - x*y^{p}", ring)), ring.zero(), f"D(x^p y - x y^p), p={p}")
        expect(p_power(D), Derivation.zero(ring), f"p-power of x^p dx + y^p dy, p={p}")
    return {}


def case_toric_p_power() -> dict:
    for p in PRIMES:
        for a, b in itertools.product(range(p), range(p)):
            D = toric(a, b, p)
            expect(p_power(D), D, f"toric({a},{b})^[p], p={p}")
    return {}


def case_swap_p2() -> dict:
    ring = R("x,y", 2)
    D = Dv("y*dx + x*dy", ring)
    expect(p_power(D), Dv("x*dx + y*dy", ring), "(x dy + y dx)^[2]")
    expect(classify(D).status, NOT_P_CLOSED, "classification of x dy + y dx at p=2")
    lp = linear_part(D)
    expect([list(r) for r in lp.matrix], [[0, 1], [1, 0]], "linear part of x dy + y dx")
    return {"p_power": p_power(D)}


def case_classify_examples() -> dict:
    ring3 = R("x,y", 3)
    c = classify(toric(1, 1, 3))
    expect((c.status, c.a_num), (P_CLOSED, ring3.one()), "toric(1,1) at p=3")
    for p in PRIMES:
        ring = R("x,y", p)
        for i in [0] + list(range(2, p + 1)):
            D = Dv(f"x^{i}*dx", ring)
            expect(classify(D).status, ADDITIVE, f"x^{i} dx at p={p}")
        ensure(not is_multiplicative_at(Dv("x^2*dx", ring), (0, 0)), "x^2 dx is not multiplicative")
    ensure(is_multiplicative_at(toric(1, 1, 3), (0, 0)), "toric(1,1) multiplicative at the origin")
    return {}


def case_representative_dependence() -> dict:
    for p in PRIMES:
        ring = R("x", p, laurent="x")
        D = Dv("x*dx", ring)
        ensure(is_multiplicative_at(D, (1,)), f"x dx multiplicative at x=1, p={p}")
        rescaled = additive_rescale(D, ring.var("x"))
        expect(rescaled, Dv(f"x^{p}*dx", ring), "additive rescale of x dx by x")
        expect(classify(rescaled).status, ADDITIVE, "the rescaled field is additive")
        expect(classify(Dv("dx", ring)).status, ADDITIVE, "dx is additive")
    return {}


def case_identity_examples() -> dict:
    ring2 = R("x,y", 2)
    expect(hochschild_residual(P("x", ring2), Dv("dx", ring2)), Derivation.zero(ring2), "Hochschild for x, dx")
    ring3 = R("x,y", 3)
    rng = random.Random(7)
    for _ in range(20):
        a = random_poly(rng, ring3, 2, 3)
        D = Derivation(ring3, [random_poly(rng, ring3, 1, 2) for _ in ring3.names])
        expect(hochschild_residual(a, D), Derivation.zero(ring3), f"Hochschild residual for a={a}, D={D}")
    expect(
        jacobson_commuting_residual(Dv("x*dx", ring3), Dv("y*dy", ring3)),
        Derivation.zero(ring3),
        "Jacobson residual for x dx, y dy",
    )
    return {}


def case_coactions() -> dict:
    for p in PRIMES:
        ring = R("x,y", p)
        x, y = ring.gens()
        mu = coaction_expand(Dv("x*dx", ring), x, MU_P)
        expect(mu, [ring.zero(), x] + [ring.zero()] * (p - 2), f"mu_p coaction of x, p={p}")
        al = coaction_expand(Dv("dx", ring), x, ALPHA_P)
        expect(al, [x, ring.one()] + [ring.zero()] * (p - 2), f"alpha_p coaction of x, p={p}")
        for a, b in itertools.product(units(p), units(p)):
            ensure(coaction_is_homomorphism(toric(a, b, p), x + y, x * y, MU_P), "mu_p coaction is multiplicative")
        ensure(coaction_is_homomorphism(Dv(f"x^{p}*dx + y^{p}*dy", ring), x + y, x * y * y, ALPHA_P),
               "alpha_p coaction is multiplicative")
    return {}


def case_fixed_ideal() -> dict:
    for p in PRIMES:
        ring = R("x,y", p)
        for a, b in itertools.product(units(p), units(p)):
            gens = fixed_ideal_gens(toric(a, b, p))
            expect(gens, [P(f"{a}*x", ring), P(f"{b}*y", ring)], f"fixed ideal of toric({a},{b})")
        r4 = R("x,y,z,t", p)
        gens = fixed_ideal_gens(Dv(f"x^{p}*dx + y^{p}*dy + t*dz", r4, frozen=("t",)))
        expect(gens, [P(f"x^{p}", r4), P(f"y^{p}", r4), P("t", r4)], "fixed ideal of the non-commutativity field")
    return {}


# ---------------------------------------------------------------- constants

def case_toric_constants_examples() -> dict:
    ring = R("x,y", 5)
    M = toric_constants((1, 4), 5)
    ensure(M.contains((1, 1)), "xy is a constant of toric(1,-1)")
    K = kernel_truncated([toric(1, 1, 2)], 2)
    r2 = R("x,y", 2)
    expect(sorted(K.basis, key=str), sorted([r2.one(), P("x^2", r2), P("y^2", r2), P("x*y", r2)], key=str),
           "kernel of toric(1,1) to degree 2 at p=2")
    return {"minimal": M.as_polys(ring)}


def case_additive_kernel_contains() -> dict:
    for p in PRIMES:
        ring = R("x,y", p)
        K = kernel_truncated([Dv(f"x^{p}*dx + y^{p}*dy", ring)], p + 1)
        for f in (f"x^{p}", f"y^{p}", f"x^{p}*y - x*y^{p}"):
            ensure(K.contains(P(f, ring)), f"{f} in the truncated kernel, p={p}")
    return {}


def case_certify_toric() -> dict:
    out = {}
    for p in (2, 3):
        ring = R("x,y", p)
        for a, b in itertools.product(units(p), units(p)):
            gens = toric_constants((a, b), p).as_polys(ring)
            rep = certify_generators([toric(a, b, p)], gens, 3 * p)
            ensure(rep.passed, f"toric({a},{b}) generators certify at d={3 * p}: {rep.first_failure}")
        out[p] = "ok"
    return out


def case_quotient_only_lc_relation() -> dict:
    src, dst = R("u,v,s", 3), R("x,y", 3)
    ok = check_relation({"u": P("x^2", dst), "v": P("y^2", dst), "s": P("x*y", dst)}, P("s^2 - u*v", src))
    ensure(ok, "s^2 = uv under (x^2, y^2, xy)")
    return {}


# ---------------------------------------------------------------- birational

def case_chart_maps() -> dict:
    ring = R("x,y", 3)
    ch = blowup_chart(ring, ("x", "y"), "x")
    expect((ch.image("x"), ch.image("y")), (P("x", ch.source), P("x*y", ch.source)), "x-chart images")
    ch2 = blowup_chart(ring, ("x", "y"), "x", new_names=("u", "v"))
    expect(ch2.exceptional_var, "u", "exceptional variable")
    expect(str(ch2.image("y")), "u*v", "y image in (u,v)")
    r = R("x1,x2,x3", 5)
    ch3 = blowup_chart(r, ("x1", "x2", "x3"), "x1")
    expect([str(ch3.image(n)) for n in r.names], ["x1", "x1*x2", "x1*x3"], "x1-chart of a point blow-up")
    w = blowup_chart(r, ("x1", "x3"), "x1", weights={"x1": 1, "x3": 5})
    expect([str(w.image(n)) for n in r.names], ["x1", "x2", "x1^5*x3"], "weighted chart")
    return {"chart": ch2}


def case_toric_pullback() -> dict:
    for p in PRIMES:
        src = R("x,y", p)
        for a, b in itertools.product(units(p), units(p)):
            ch = blowup_chart(src, ("x", "y"), "x", new_names=("u", "v"))
            raw = pullback(toric(a, b, p), ch)
            expect(raw, Derivation.toric(ch.laurent_ring, (a, b - a)), f"pullback of toric({a},{b})")
            rec = discrepancy_rank1(toric(a, b, p), ch)
            if a == b:
                expect((str(rec.content), rec.a_F, rec.epsilon), ("u", -1, 1), f"a=b={a}")
                ensure(not is_invariant(rec.saturated_pullback, ch.source.var("u")), "E not invariant")
            else:
                expect((str(rec.content), rec.a_F, rec.epsilon), ("1", 0, 0), f"a={a}, b={b}")
                ensure(is_invariant(rec.saturated_pullback, ch.source.var("u")), "E invariant")
    return {}


def case_saturation_examples() -> dict:
    ring = R("u,v", 5)
    expect(saturate_rank1(Dv("u*du", ring)), (Dv("du", ring), P("u", ring)), "saturate u du")
    D = Dv("2*u*du + 3*v*dv", ring)
    expect(saturate_rank1(D), (D, ring.one()), "saturate 2u du + 3v dv")
    return {}


def case_toric_sequences() -> dict:
    rep = toric_blowup_sequence(1, 1, 2)
    expect((rep.steps, rep.records[0].a_F, rep.records[0].epsilon), (1, -1, 1), "sequence(1,1), p=2")
    rep = toric_blowup_sequence(1, 3, 5)
    expect(rep.steps, 3, "sequence(1,3), p=5")
    expect([(r.a_F, r.epsilon) for r in rep.records[:-1]], [(0, 0), (0, 0)], "intermediate records")
    ensure(rep.reached_regular, "sequence ends at a regular point")
    return {"records": [(r.a_F, r.epsilon) for r in rep.records]}


def case_regular_weighted() -> dict:
    for p in PRIMES:
        for n in (2, 3):
            ring = Ring(tuple(f"x{i}" for i in range(1, n + 1)), p)
            D = Derivation(ring, {"x1": ring.one()})
            ch = blowup_chart(ring, ("x1", f"x{n}"), "x1", weights={"x1": 1, f"x{n}": p})
            raw = pullback(D, ch)
            vals = [c.valuation("x1") for c in raw.coeffs if not c.is_zero()]
            expect(min(vals), 0, f"order along E of the weighted pullback of dx1, n={n}, p={p}")
            for centre in (("x1", "x2"), tuple(ring.names)):
                for cv in centre:
                    rec = discrepancy_rank1(D, blowup_chart(ring, centre, cv))
                    ensure(rec.a_F >= 0, f"regular foliation has a_F >= 0 (centre {centre}, chart {cv})")
    return {}


# ---------------------------------------------------------------- singularity

def case_linear_parts() -> dict:
    for p in PRIMES:
        for a, b in itertools.product(units(p), units(p)):
            expect([list(r) for r in linear_part(toric(a, b, p)).matrix], [[a, 0], [0, b]], "diag(a,b)")
            ensure(semisimple_linear_check(toric(a, b, p)), "toric fields pass the semisimple check")
            expect(classify_rank1(toric(a, b, p)).status, LC_MULTIPLICATIVE, f"toric({a},{b})")
        ring = R("x,y", p)
        D = Dv(f"x^{p}*dx + y^{p}*dy", ring)
        ensure(linear_part(D).is_zero(), "x^p dx + y^p dy has zero linear part")
        expect(classify_rank1(D).status, NOT_LC, f"x^p dx + y^p dy, p={p}")
    ring = R("x,y", 3)
    ensure(semisimple_linear_check(Dv("y*dx + x*dy", ring)), "x dy + y dx at p=3")
    ring = R("x,y", 2)
    expect(classify_rank1(Dv("dx", ring)).status, REGULAR_CANONICAL, "dx is regular")
    return {}


def case_fedder_examples() -> dict:
    src = R("u,v,s", 2)
    ensure(not fedder_f_pure(P("s^2 - (u^2*v - u*v^2)", src)), "s^2 - (u^2 v - u v^2) is not F-pure")
    for p in (3, 5):
        ensure(fedder_f_pure(P("s^2 - u*v", R("u,v,s", p))), f"s^2 - uv is F-pure, p={p}")
    return {}


NONLC_INPUTS: tuple[tuple[str, str, int], ...] = tuple(
    [("x,y", f"x^{p}*dx + y^{p}*dy", p) for p in PRIMES]
    + [("x,y", f"y^{p}*dx + x^{p}*dy", p) for p in PRIMES]
    + [("x,y,z", f"x^{p}*dx + y^{p}*dy + z^{p}*dz", p) for p in PRIMES]
    + [("x,y,z", f"y^{p}*dx + z^{p}*dy + x^{p}*dz", p) for p in PRIMES]
    + [("x,y", f"y*dx + x^{p}*dy", p) for p in (3, 5)]
    + [("x,y,z", "y*dx + z*dy", p) for p in (3, 5)]
    + [("x,y,z", "y*dx + (z + x^2)*dy", 5)]
    + [("x,y", "2*y*dx + 2*x^2*dy", 5)]  # Ann(x^3 + y^2)
)


def case_nonlc_examples() -> dict:
    out = []
    for names, text, p in NONLC_INPUTS:
        D = Dv(text, R(names, p))
        expect(classify_rank1(D).status, NOT_LC, f"{text} at p={p}")
        cert = find_nonlc_divisor(D)
        out.append({"input": text, "p": p, "a_F": cert.a_F, "epsilon": cert.epsilon, "blowups": cert.blowups})
    return {"certificates": out}


ANN_SURFACES: tuple[tuple[str, int, str], ...] = (
    ("x*y", 3, STRICTLY_LC),
    ("x*y", 5, STRICTLY_LC),
    ("x^2 + x*y + y^2", 5, STRICTLY_LC),
    ("x^2 + y^2", 3, STRICTLY_LC),
    ("x^3 + y^2", 5, NOT_LC),
    ("x^2*y + y^3", 5, NOT_LC),
    ("x^2*y + x*y^2", 5, NOT_LC),
    ("x + y^2", 3, REGULAR),
    ("x*y + x^3", 7, STRICTLY_LC),
)


def case_ann_examples() -> dict:
    out = []
    for text, p, status in ANN_SURFACES:
        v = ann_surface_classify(P(text, R("x,y", p)))
        expect(v.status, status, f"Ann({text}) at p={p}")
        ensure(v.agrees, f"Ann({text}) disagrees with the rank-one classifier ({v.cross_check})")
        out.append({"phi": text, "p": p, "status": v.status})
    v = ann_surface_classify(P("x*y", R("x,y", 5)))
    expect(v.generator, Dv("x*dx - y*dy", R("x,y", 5)), "Ann(xy) generator")
    return {"cases": out}


# ---------------------------------------------------------------- mmpledger

def case_ledger_examples() -> dict:
    L = pushforward_ledger(DivisorLedger.of(2, ("E", 1, 1)))
    expect(L.coefficient("E"), Fraction(1, 2), "pushforward of (E, 1, eps=1) at p=2")
    expect(pullback_multiplicity(0, 5), 1, "multiplicity for eps=0")
    expect(pullback_multiplicity(1, 5), 5, "multiplicity for eps=1, p=5")
    for eps in (0, 1):
        back = pullback_ledger(pushforward_ledger(DivisorLedger.of(5, ("E", 1, eps))))
        expect(back.coefficient("E"), 1, f"round trip for eps={eps}")
        ensure(adjunction_residual(DivisorLedger.of(3, ("E", Fraction(2, 7), eps))).is_zero(), "single entry")
    expect(transfer_class("terminal", "canonical"), SingClass.TERMINAL, "(terminal, canonical)")
    expect(transfer_class("lc", "klt"), SingClass.KLT, "(lc, klt)")
    expect(transfer_class("klt", "lc"), SingClass.KLT, "(klt, lc)")
    rep = validate_transfer_table(1000, (2, 3, 5))
    cell = next(c for c in rep.cells if c.x_class == SingClass.CANONICAL and c.f_class == SingClass.CANONICAL)
    expect(len(cell.violations), 0, "violations in (canonical, canonical)")
    return {}


def case_toric_quotient_discrepancy() -> dict:
    # the lc place of toric(1,1) over a smooth surface: b = -1, eps = 1, c = 1
    from .mmpledger import transfer_discrepancy

    out = {}
    for p in PRIMES:
        rec = toric_blowup_sequence(1, 1, p).records[0]
        a = transfer_discrepancy(1, rec.a_F, rec.epsilon == 0, p)
        expect(a, Fraction(1 - (p - 1), p), f"quotient discrepancy at p={p}")
        out[p] = a
    return out


# ---------------------------------------------------------------- families

def _commuting_family(f: str, g: str) -> FamilyDerivation:
    ring = R("x,y,t", 2)
    return FamilyDerivation(Dv(f"(x^2 + t*({f}))*dx + (y^2 + t*({g}))*dy", ring), ("t",))


def case_family_restrictions() -> dict:
    F = _commuting_family("1 + t", "t^2")
    expect(fiber_restrict(F, 0), Dv("x^2*dx + y^2*dy", R("x,y", 2)), "fibre at t=0")
    for p in (2, 3):
        G = FamilyDerivation(Dv(f"x^{p}*dx + y^{p}*dy + t*dz", R("x,y,z,t", p)), ("t",))
        expect(fiber_restrict(G, 0), Dv(f"x^{p}*dx + y^{p}*dy", R("x,y,z", p)), "non-commutative fibre")
        rep = fiber_vs_quotient_compare(G, 0, p + 1)
        ensure(not rep.equal and P("z", R("x,y,z", p)) in rep.missing, "z has no lift")
        try:
            mu_p_family_commutes(G, 0, p)
        except PreconditionError:
            pass
        else:
            raise CaseFailure("additive family accepted by the multiplicative comparison")
    ob = noncommutativity_obstruction(_commuting_family("1", "x"), P("x*y^2 + x^2*y", R("x,y", 2)))
    expect(ob.status, "unknown", "obstruction for the liftable example")
    return {}


def case_unexpected_commutativity() -> dict:
    F = _commuting_family("1 + t", "t^2")
    fr = R("x,y", 2)
    g0 = P("x*y^2 + x^2*y", fr)
    rep = fiber_vs_quotient_compare(F, 0, 4)
    ensure(rep.equal, "family and fibre constants agree at d=4")
    lift = find_lift(F, g0, 0, 4)
    ring = F.ring
    h = lift_witness(F, g0, lift, 0)
    ensure(apply(F.derivation, h - P("t^2*x + (1 + t)*y", ring)).is_zero(), "h differs from gx+fy by a constant")
    return {"lift": lift, "h": h}


# ---------------------------------------------------------------- criteria

def criterion_1() -> dict:
    t0 = time.perf_counter()
    count = 0
    for p in PRIMES:
        d = 3 * p
        ring = R("x,y", p)
        for a, b in itertools.product(units(p), units(p)):
            K = kernel_truncated([toric(a, b, p)], d)
            brute = {(i, j) for i in range(d + 1) for j in range(d + 1 - i) if (a * i + b * j) % p == 0}
            ensure(all(f.is_monomial() and f.leading()[1] == 1 for f in K.basis), "basis is monomial")
            got = {next(iter(f.terms)) for f in K.basis}
            expect(got, brute, f"kernel of toric({a},{b}) at p={p}")
            expect(len(K.basis), len(brute), "dimension")
            count += 1
    secs = time.perf_counter() - t0
    ensure(secs < 5, f"runtime {secs:.2f}s exceeds 5s")
    return {"pairs": count, "millis": int(secs * 1000)}


def criterion_2() -> dict:
    for p in (2, 3):
        ring = R("x,y", p)
        D = Dv(f"x^{p}*dx + y^{p}*dy", ring)
        expect(p_power(D), Derivation.zero(ring), f"p-power at p={p}")
        claimed = [P(f"x^{p}", ring), P(f"y^{p}", ring), P(f"x^{p}*y - x*y^{p}", ring)]
        rep = certify_generators([D], claimed, 3 * p)
        ensure(rep.passed, f"certification failed at p={p}: {rep.first_failure}")
    src, dst = R("u,v,s", 2), R("x,y", 2)
    assign = {"u": P("x^2", dst), "v": P("y^2", dst), "s": P("x^2*y - x*y^2", dst)}
    ensure(check_relation(assign, P("s^2 - (u^2*v - u*v^2)", src)), "s^2 = u^2 v - u v^2 at p=2")
    # for odd p the same substitution satisfies s^p = u^p v - u v^p
    src3, dst3 = R("u,v,s", 3), R("x,y", 3)
    assign3 = {"u": P("x^3", dst3), "v": P("y^3", dst3), "s": P("x^3*y - x*y^3", dst3)}
    ensure(check_relation(assign3, P("s^3 - (u^3*v - u*v^3)", src3)), "s^3 = u^3 v - u v^3 at p=3")
    ensure(not check_relation(assign3, P("s^3 - (u^2*v - u*v^2)", src3)), "quadratic form of the relation at p=3")
    return {}


def criterion_3() -> dict:
    ensure(not fedder_f_pure(P("s^2 - (u^2*v - u*v^2)", R("u,v,s", 2))), "Fedder at p=2")
    expect(classify_rank1(Dv("x^2*dx + y^2*dy", R("x,y", 2))).status, NOT_LC, "x^2 dx + y^2 dy")
    for p in (3, 5):
        ensure(fedder_f_pure(P("s^2 - u*v", R("u,v,s", p))), f"Fedder at p={p}")
        expect(classify_rank1(Dv("x*dx - y*dy", R("x,y", p))).status, LC_MULTIPLICATIVE, f"x dx - y dy, p={p}")
    return {}


def criterion_4() -> dict:
    case_toric_pullback()
    for p in PRIMES:
        for a, b in itertools.product(units(p), units(p)):
            n = next(n for n in range(1, p + 1) if (b - n * a) % p == 0)
            rep = toric_blowup_sequence(a, b, p)
            expect(rep.steps, n, f"sequence length for ({a},{b}), p={p}")
            ensure(rep.reached_regular, "sequence reaches a regular point")
    return {}


def criterion_5(samples: int = 200) -> dict:
    out = {}
    for p in PRIMES:
        rng = random.Random(1000 + p)
        disagree = 0
        for k in range(samples):
            ring = R("x,y,z", p) if k % 4 == 3 else R("x,y", p)
            D, _ = random_pclosed_rank1(rng, ring)
            ensure(classify(D).status != NOT_P_CLOSED, f"sample {k} is not p-closed")
            v = classify_rank1(D)
            disagree += (v.status == LC_MULTIPLICATIVE) != is_multiplicative_at(D, v.point)
        expect(disagree, 0, f"disagreements at p={p}")
        out[p] = samples
    return out


def criterion_6() -> dict:
    out = []
    for names, text, p in NONLC_INPUTS:
        D = Dv(text, R(names, p))
        n = D.ring.nvars
        cert = find_nonlc_divisor(D)
        ensure(cert.blowups <= 2 * n, f"{text}: {cert.blowups} blow-ups")
        ensure(cert.a_F < -cert.epsilon, f"{text}: a_F={cert.a_F}, eps={cert.epsilon}")
        if cert.order >= 2:
            ensure(cert.a_F <= -cert.order + 1, f"{text}: a_F={cert.a_F} with order {cert.order}")
        out.append(text)
    return {"inputs": len(out)}


def criterion_7(samples: int = 500) -> dict:
    t0 = time.perf_counter()
    for p in PRIMES:
        rng = random.Random(2000 + p)
        for k in range(samples):
            a, D, D1, D2 = identity_sample(rng, p, k)
            ensure(hochschild_residual(a, D).is_zero(), f"Hochschild residual, p={p}, sample {k}")
            ensure(jacobson_commuting_residual(D1, D2).is_zero(), f"Jacobson residual, p={p}, sample {k}")
    secs = time.perf_counter() - t0
    ensure(secs < 10, f"runtime {secs:.2f}s exceeds 10s")
    return {"millis": int(secs * 1000)}


def criterion_8(ledgers: int = 2000) -> dict:
    rng = random.Random(8)
    for _ in range(ledgers):
        p = rng.choice((2, 3, 5, 7))
        items = [(f"E{i}", Fraction(rng.randint(-20, 20), rng.randint(1, 12)), rng.randint(0, 1))
                 for i in range(rng.randint(1, 6))]
        L = DivisorLedger.of(p, *items)
        ensure(adjunction_residual(L).is_zero(), "adjunction residual")
        for e in L.entries:
            m = pullback_multiplicity(e.epsilon, p)
            expect(m, 1 if e.epsilon == 0 else p, "pullback multiplicity")
    return {"ledgers": ledgers}


def criterion_9() -> dict:
    t0 = time.perf_counter()
    rep = validate_transfer_table(10_000, (2, 3, 5, 7))
    secs = time.perf_counter() - t0
    expect(len(rep.cells), len(POSITIVE_CLASSES) ** 2, "cells")
    expect(rep.total_violations, 0, "violations")
    ensure(secs < 10, f"runtime {secs:.2f}s exceeds 10s")
    return {"samples": rep.total_samples, "millis": int(secs * 1000)}


def criterion_10() -> dict:
    rng = random.Random(10)
    ring = R("x,y,t", 2)
    tring = R("t", 2)
    seen = set()
    while len(seen) < 10:
        f, g = random_poly(rng, tring, 2, 2), random_poly(rng, tring, 2, 2)
        if (f, g) in seen:
            continue
        seen.add((f, g))
        F = _commuting_family(str(f), str(g))
        fr = F.fiber_ring
        g0 = P("x*y^2 + x^2*y", fr)
        ensure(fiber_vs_quotient_compare(F, 0, 4).equal, f"comparison for f={f}, g={g}")
        lift = find_lift(F, g0, 0, 4)
        ensure(lift is not None, f"no lift for f={f}, g={g}")
        h = lift_witness(F, g0, lift, 0)
        gx_fy = P(f"({g})*x + ({f})*y", ring)
        ensure(apply(F.derivation, h - gx_fy).is_zero(), f"witness differs from gx+fy by a non-constant, f={f}, g={g}")
        ensure(apply(F.derivation, P(str(g0), ring) + P("t", ring) * gx_fy).is_zero(), "g0 + t(gx+fy) is constant")
    for p in (2, 3):
        r4 = R("x,y,z,t", p)
        G = FamilyDerivation(Dv(f"x^{p}*dx + y^{p}*dy + t*dz", r4), ("t",))
        ob = noncommutativity_obstruction(G, P("z", G.fiber_ring))
        expect(ob.status, "proof", f"obstruction at p={p}")
        expect(ob.forcing, r4.const(-1), "forcing term")
        expect(sorted(map(str, ob.ideal)), sorted([f"x^{p}", f"y^{p}", "t"]), "obstruction ideal")
    for p in PRIMES:
        r3 = R("x,y,t", p)
        for a, b in ((1, 1), (1, p - 1), (1, 2 % p or 1)):
            for unit in ("1", "1 + t", f"{max(1, p - 1)} + t^2"):
                F = FamilyDerivation(Dv(f"({unit})*({a}*x*dx + {b}*y*dy)", r3), ("t",))
                mu_p_family_commutes(F, 0, 3 * p)
    return {"witness_choices": len(seen)}


def criterion_11() -> dict:
    rng = random.Random(11)
    n = 0
    while n < 100:
        p = rng.choice(PRIMES)
        ring = R("x,y", p) if rng.random() < 0.5 else R("x,y,z", p)
        s = random_poly(rng, ring, 4, 4)
        if all(s.partial(v).is_zero() for v in ring.names):
            continue
        for D in ann_foliation(s):
            ensure(apply(D, s).is_zero(), f"{D} does not annihilate {s}")
        n += 1
    for text, p, _ in ANN_SURFACES:
        ensure(ann_surface_classify(P(text, R("x,y", p))).agrees, f"Ann({text}) cross-check at p={p}")
    return {"polys": n, "surfaces": len(ANN_SURFACES)}


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11)


def default_cases() -> list[Case]:
    cases = [
        Case("gfpoly/substitute-chart", ("gfpoly",), case_substitute_chart),
        Case("gfpoly/exact-divide-toric", ("gfpoly", "toric"), case_exact_divide_toric),
        Case("gfpoly/ideal-noncommutativity", ("gfpoly", "families"), case_ideal_non_commutativity),
        Case("gfpoly/content-toric", ("gfpoly", "toric"), case_monomial_content_toric),
        Case("gfpoly/frobenius", ("gfpoly",), case_frobenius),
        Case("derivation/apply-toric", ("derivation", "toric"), case_apply_toric),
        Case("derivation/additive-constants", ("derivation",), case_additive_constants),
        Case("derivation/toric-p-power", ("derivation", "toric"), case_toric_p_power),
        Case("derivation/swap-p2", ("derivation",), case_swap_p2),
        Case("derivation/classify", ("derivation", "toric"), case_classify_examples),
        Case("derivation/rescaling", ("derivation",), case_representative_dependence),
        Case("derivation/identities", ("derivation",), case_identity_examples),
        Case("derivation/coactions", ("derivation", "toric"), case_coactions),
        Case("derivation/fixed-ideal", ("derivation", "toric"), case_fixed_ideal),
        Case("constants/toric-examples", ("constants", "toric"), case_toric_constants_examples),
        Case("constants/additive-kernel", ("constants",), case_additive_kernel_contains),
        Case("constants/certify-toric", ("constants", "toric"), case_certify_toric),
        Case("constants/quotient-only-lc", ("constants",), case_quotient_only_lc_relation),
        Case("birational/charts", ("birational",), case_chart_maps),
        Case("birational/toric-pullback", ("birational", "toric"), case_toric_pullback),
        Case("birational/saturation", ("birational",), case_saturation_examples),
        Case("birational/toric-sequences", ("birational", "toric"), case_toric_sequences),
        Case("birational/regular-weighted", ("birational",), case_regular_weighted),
        Case("singularity/linear-parts", ("singularity", "toric"), case_linear_parts),
        Case("singularity/fedder", ("singularity",), case_fedder_examples),
        Case("singularity/nonlc", ("singularity",), case_nonlc_examples),
        Case("singularity/ann", ("singularity",), case_ann_examples),
        Case("mmpledger/examples", ("mmpledger",), case_ledger_examples),
        Case("mmpledger/toric-quotient", ("mmpledger", "toric"), case_toric_quotient_discrepancy),
        Case("families/restrictions", ("families",), case_family_restrictions),
        Case("families/unexpected-commutativity", ("families",), case_unexpected_commutativity),
    ]
    tags = {1: ("toric", "constants"), 4: ("toric", "birational")}
    for i, fn in enumerate(CRITERIA, 1):
        cases.append(Case(f"criterion/{i}", ("criterion",) + tags.get(i, ()), fn))
    return cases


def run_case(case: Case) -> dict:
    t0 = time.perf_counter()
    try:
        detail = case.run()
        ok, error = True, None
    except (CaseFailure, PfoliateError, AssertionError) as exc:
        detail, ok = None, False
        error = {"kind": type(exc).__name__, "message": str(exc)}
    millis = int((time.perf_counter() - t0) * 1000)
    result = {"case": case.id, "tags": list(case.tags), "millis": millis, "detail": detail}
    return report.envelope("corpus", None, ok, result, "pass" if ok else "fail", error)


def run_corpus(flt: str | None = None, cases: Iterable[Case] | None = None, stream: TextIO | None = None) -> int:
    """Run the selected cases in order; 0 iff all pass."""
    out = stream if stream is not None else sys.stdout
    selected = [c for c in (cases if cases is not None else default_cases()) if c.matches(flt)]
    t0 = time.perf_counter()
    passed, first_failure = 0, None
    for case in selected:
        doc = run_case(case)
        print(report.dumps(doc), file=out, flush=True)
        if doc["ok"]:
            passed += 1
        elif first_failure is None:
            first_failure = case.id
    ok = first_failure is None and bool(selected)
    summary = {
        "cases": len(selected),
        "passed": passed,
        "failed": len(selected) - passed,
        "first_failure": first_failure,
        "millis": int((time.perf_counter() - t0) * 1000),
    }
    print(report.dumps(report.envelope("corpus-summary", None, ok, summary, "pass" if ok else "fail")), file=out)
    return 0 if ok else 1
