"""One-parameter families of rank-one foliations.

A family is a derivation on F_p[x_1..x_n, t] that kills the base variable t.
Comparing the constants of the family, specialised at t = s, with the
constants of the fibre derivation is done at a fixed degree bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .constants import kernel_truncated
from .derivation import NOT_P_CLOSED, Derivation, apply, classify, fixed_ideal_gens, is_multiplicative_at
from .errors import NotDivisible, PfoliateError, PreconditionError
from .gfpoly import Poly, Ring, exact_divide, monomial_ideal_member
from .linalg import SparseEchelon


class CommutativityViolation(PfoliateError):
    """A multiplicative family whose fibre constants failed to lift."""


@dataclass(frozen=True)
class FamilyDerivation:
    derivation: Derivation
    base: tuple[str, ...]

    def __post_init__(self):
        D = self.derivation
        base = tuple(self.base)
        object.__setattr__(self, "base", base)
        for b in base:
            if not D.coeff(b).is_zero():
                raise PreconditionError(f"family derivation must kill the base variable {b}")
        if set(base) - D.frozen:
            object.__setattr__(self, "derivation", Derivation(D.ring, D.coeffs, D.frozen | set(base)))

    @property
    def ring(self) -> Ring:
        return self.derivation.ring

    @property
    def fiber_ring(self) -> Ring:
        return Ring(tuple(n for n in self.ring.names if n not in self.base), self.ring.p)

    @property
    def base_var(self) -> str:
        if len(self.base) != 1:
            raise PreconditionError("a one-dimensional base is required")
        return self.base[0]


def _values(F: FamilyDerivation, s) -> dict[str, int]:
    if isinstance(s, Mapping):
        missing = set(F.base) - set(s)
        if missing:
            raise PreconditionError(f"missing base values for {sorted(missing)}")
        return {b: s[b] % F.ring.p for b in F.base}
    if len(F.base) != 1:
        raise PreconditionError("give base values as a mapping")
    return {F.base[0]: s % F.ring.p}


def specialize(f: Poly, base_values: Mapping[str, int], fiber_ring: Ring) -> Poly:
    """Set the base variables to constants and move into the fibre ring."""
    g = f.substitute({b: v for b, v in base_values.items()})
    keep = [f.ring.index(n) for n in fiber_ring.names]
    return Poly(fiber_ring, {tuple(e[i] for i in keep): c for e, c in g.terms.items()})


def embed(f: Poly, ring: Ring) -> Poly:
    """A fibre polynomial viewed in the total ring (no base dependence)."""
    idx = [f.ring.index(n) if n in f.ring.names else None for n in ring.names]
    return Poly(ring, {tuple(e[i] if i is not None else 0 for i in idx): c for e, c in f.terms.items()})


def fiber_restrict(F: FamilyDerivation, s) -> Derivation:
    vals = _values(F, s)
    fr = F.fiber_ring
    return Derivation(fr, [specialize(F.derivation.coeff(n), vals, fr) for n in fr.names])


@dataclass
class CompareReport:
    equal: bool
    degree: int
    base_value: dict
    family_kernel_dim: int
    fiber_kernel_dim: int
    lifts: list = field(default_factory=list)  # (fibre element, lift in the family kernel)
    missing: list = field(default_factory=list)  # fibre elements without a degree-d lift


def _specialized_span(F: FamilyDerivation, d: int, vals: Mapping[str, int]):
    K = kernel_truncated([F.derivation], d)
    ech = SparseEchelon(F.ring.p, track=True)
    for i, b in enumerate(K.basis):
        ech.insert(dict(specialize(b, vals, F.fiber_ring).terms), i)
    return K, ech


def _lift_from(K, ech: SparseEchelon, g: Poly, ring: Ring) -> Poly | None:
    combo = ech.express(dict(g.terms))
    if combo is None:
        return None
    out = ring.zero()
    for i, c in combo.items():
        out = out + K.basis[i].scale(c)
    return out


def fiber_vs_quotient_compare(F: FamilyDerivation, s, d: int) -> CompareReport:
    """Do the family constants (degree <= d), specialised at s, span the fibre constants?"""
    F.base_var
    vals = _values(F, s)
    K, ech = _specialized_span(F, d, vals)
    Kf = kernel_truncated([fiber_restrict(F, s)], d)
    # the easy inclusion: specialised family constants are fibre constants
    fib = SparseEchelon(F.ring.p)
    for b in Kf.basis:
        fib.insert(dict(b.terms))
    for b in K.basis:
        if not fib.contains(dict(specialize(b, vals, F.fiber_ring).terms)):
            raise AssertionError("a specialised family constant is not a fibre constant")
    rep = CompareReport(True, d, vals, len(K.basis), len(Kf.basis))
    for g in Kf.basis:
        lift = _lift_from(K, ech, g, F.ring)
        if lift is None:
            rep.missing.append(g)
        else:
            rep.lifts.append((g, lift))
    rep.equal = not rep.missing
    return rep


def find_lift(F: FamilyDerivation, g: Poly, s, d: int) -> Poly | None:
    """A family constant of degree <= d restricting to g at t = s, if one exists."""
    vals = _values(F, s)
    K, ech = _specialized_span(F, d, vals)
    return _lift_from(K, ech, g, F.ring)


def lift_witness(F: FamilyDerivation, g: Poly, lift: Poly, s) -> Poly:
    """h with lift = g + (t - s) h."""
    t = F.base_var
    vals = _values(F, s)
    ring = F.ring
    return exact_divide(lift - embed(g, ring), ring.var(t) - vals[t])


@dataclass(frozen=True)
class Obstruction:
    status: str  # "proof", "unknown" or "liftable"
    forcing: Poly | None
    ideal: tuple[Poly, ...]
    note: str = ""


def noncommutativity_obstruction(F: FamilyDerivation, g: Poly, s=0) -> Obstruction:
    """Try to prove that the fibre constant g has no lift to a family constant.

    A lift has the form G = g + (t - s) f, so D(g) = (t - s) r and D(f) = -r.
    Since D(f) lies in the ideal generated by the D(x_i), it is enough that
    -r is outside the (larger) monomial ideal generated by those values and
    the base variable, after moving s to 0.
    """
    t = F.base_var
    fiber = fiber_restrict(F, s)
    if not apply(fiber, g).is_zero():
        raise PreconditionError(f"{g} is not a constant of the fibre")
    vals = _values(F, s)
    D = F.derivation
    ring = F.ring
    Dg = apply(D, embed(g, ring))
    if Dg.is_zero():
        return Obstruction("liftable", None, (), "g is already a family constant")
    r = exact_divide(Dg, ring.var(t) - vals[t])
    # centre the base point at 0
    shift = {t: ring.var(t) + vals[t]}
    forcing = (-r).substitute(shift)
    ideal = [c.substitute(shift) for c in fixed_ideal_gens(D)] + [ring.var(b) for b in F.base]
    if not all(c.is_monomial() for c in ideal):
        return Obstruction("unknown", forcing, tuple(ideal), "ideal is not monomial")
    ideal = list(dict.fromkeys(Poly(ring, {next(iter(c.terms)): 1}) for c in ideal))
    if monomial_ideal_member(forcing, ideal):
        return Obstruction("unknown", forcing, tuple(ideal), "forcing term lies in the monomial ideal")
    return Obstruction("proof", forcing, tuple(ideal), "forcing term is outside the ideal containing D(f)")


def mu_p_family_commutes(F: FamilyDerivation, s, d: int, point: Sequence[int] | None = None) -> CompareReport:
    """Truncated comparison for a p-closed family with multiplicative fibre at ``point``.

    Inequality here would contradict the commutativity statement for
    multiplicative singularities, so it raises instead of returning.
    """
    fiber = fiber_restrict(F, s)
    if classify(F.derivation).status == NOT_P_CLOSED:
        raise PreconditionError("family derivation is not p-closed")
    pt = point if point is not None else (0,) * fiber.ring.nvars
    if classify(fiber).status == NOT_P_CLOSED or not is_multiplicative_at(fiber, pt):
        raise PreconditionError("fibre is not multiplicative at the point")
    rep = fiber_vs_quotient_compare(F, s, d)
    if not rep.equal:
        raise CommutativityViolation(f"fibre constants {rep.missing[:3]} have no lift at degree {d}")
    return rep
