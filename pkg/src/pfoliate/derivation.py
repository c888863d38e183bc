"""Derivations of F_p[x_1, ..., x_n] and their restricted structure.

A derivation is stored by its values on the coordinates, D = sum f_i d/dx_i.
The p-th power is computed by literal p-fold iteration on coordinates: the
p-fold composite of a derivation is again a derivation in characteristic p,
so its coordinate values determine it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import NotDivisible, PreconditionError, RingMismatchError
from .gfpoly import Poly, Ring, exact_divide, format_poly, monomial_content


class Derivation:
    """D = sum coeffs[i] * d/d(ring.names[i]); ``frozen`` variables are killed by D."""

    __slots__ = ("ring", "coeffs", "frozen")

    def __init__(self, ring: Ring, coeffs: Sequence[Poly] | Mapping[str, Poly | int], frozen: Iterable[str] = ()):
        if isinstance(coeffs, Mapping):
            for k in coeffs:
                ring.index(k)
            items = [coeffs.get(n, 0) for n in ring.names]
        else:
            items = list(coeffs)
            if len(items) != ring.nvars:
                raise RingMismatchError(f"expected {ring.nvars} coefficients, got {len(items)}")
        cs = []
        for c in items:
            if isinstance(c, int):
                c = ring.const(c)
            ring = ring.join(c.ring)
            cs.append(c)
        self.ring = ring
        self.coeffs: tuple[Poly, ...] = tuple(c if c.ring is ring else Poly(ring, c.terms) for c in cs)
        self.frozen = frozenset(frozen)
        for v in self.frozen:
            if not self.coeffs[ring.index(v)].is_zero():
                raise PreconditionError(f"frozen variable {v} has a nonzero coefficient")

    @classmethod
    def zero(cls, ring: Ring, frozen: Iterable[str] = ()) -> Derivation:
        return cls(ring, [ring.zero()] * ring.nvars, frozen)

    @classmethod
    def toric(cls, ring: Ring, weights: Sequence[int]) -> Derivation:
        """sum w_i x_i d/dx_i."""
        return cls(ring, [ring.var(n).scale(w) for n, w in zip(ring.names, weights)])

    def coeff(self, var: str) -> Poly:
        return self.coeffs[self.ring.index(var)]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __call__(self, f: Poly) -> Poly:
        return apply(self, f)

    def _same(self, other: Derivation) -> Ring:
        return self.ring.join(other.ring)

    def __add__(self, other: Derivation) -> Derivation:
        self._same(other)
        return Derivation(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.frozen & other.frozen)

    def __sub__(self, other: Derivation) -> Derivation:
        self._same(other)
        return Derivation(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)], self.frozen & other.frozen)

    def __neg__(self) -> Derivation:
        return Derivation(self.ring, [-a for a in self.coeffs], self.frozen)

    def scale(self, a: Poly | int) -> Derivation:
        """a*D for a scalar or polynomial a."""
        return Derivation(self.ring, [c * a for c in self.coeffs], self.frozen)

    def __rmul__(self, a):
        return self.scale(a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.ring.compatible(other.ring) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def degree(self) -> int:
        return max(c.degree() for c in self.coeffs)

    def translate(self, point: Sequence[int] | Mapping[str, int]) -> Derivation:
        """The same vector field written in coordinates centred at ``point``."""
        return Derivation(self.ring, [c.translate(point) for c in self.coeffs], self.frozen)

    def in_ring(self, ring: Ring) -> Derivation:
        return Derivation(ring, [c.in_ring(ring) for c in self.coeffs], self.frozen)

    def __str__(self) -> str:
        return format_derivation(self)

    def __repr__(self) -> str:
        return f"Derivation({format_derivation(self)!r}, p={self.ring.p})"


def format_derivation(D: Derivation) -> str:
    parts = []
    for n, c in zip(D.ring.names, D.coeffs):
        if c.is_zero():
            continue
        if c == 1:
            parts.append(f"d{n}")
        elif len(c) == 1:
            parts.append(f"{format_poly(c)}*d{n}")
        else:
            parts.append(f"({format_poly(c)})*d{n}")
    return " + ".join(parts) if parts else "0"


def apply(D: Derivation, f: Poly) -> Poly:
    ring = D.ring.join(f.ring)
    out = ring.zero()
    for i, c in enumerate(D.coeffs):
        if c.is_zero():
            continue
        df = f.partial_index(i)
        if not df.is_zero():
            out = out + c * df
    return out


def iterate(D: Derivation, f: Poly, k: int) -> list[Poly]:
    """[f, D f, D^2 f, ..., D^k f]."""
    seq = [f]
    for _ in range(k):
        seq.append(apply(D, seq[-1]))
    return seq


def lie_bracket(D1: Derivation, D2: Derivation) -> Derivation:
    ring = D1.ring.join(D2.ring)
    coeffs = [apply(D1, b) - apply(D2, a) for a, b in zip(D1.coeffs, D2.coeffs)]
    return Derivation(ring, coeffs, D1.frozen & D2.frozen)


def p_power(D: Derivation) -> Derivation:
    p = D.ring.p
    coeffs = []
    for i, n in enumerate(D.ring.names):
        # D(x_i) is coeffs[i]; apply p-1 more times
        f = D.coeffs[i]
        for _ in range(p - 1):
            if f.is_zero():
                break
            f = apply(D, f)
        coeffs.append(f)
    return Derivation(D.ring, coeffs, D.frozen)


ADDITIVE = "additive"
P_CLOSED = "p_closed"
NOT_P_CLOSED = "not_p_closed"


@dataclass(frozen=True)
class PClosure:
    status: str
    witness: Derivation
    a_num: Poly | None = None
    a_den: Poly | None = None

    @property
    def multiplier_is_polynomial(self) -> bool:
        return self.a_den is not None and self.a_den == 1


def _cross_products_vanish(D: Derivation, W: Derivation) -> bool:
    n = D.ring.nvars
    for i in range(n):
        for j in range(i + 1, n):
            if W.coeffs[i] * D.coeffs[j] != W.coeffs[j] * D.coeffs[i]:
                return False
    return True


def _reduce_pair(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    """Cancel the common monomial content and normalise den to be monic."""
    if not num.is_zero():
        m = monomial_content([num, den])
        e = next(iter(m.terms))
        if any(e):
            neg = tuple(-a for a in e)
            num, den = num.shift(neg), den.shift(neg)
    lead = den.leading()[1]
    inv = pow(lead, -1, den.ring.p)
    return num.scale(inv), den.scale(inv)


def classify(D: Derivation) -> PClosure:
    W = p_power(D)
    ring = D.ring
    if W.is_zero():
        return PClosure(ADDITIVE, W, ring.zero(), ring.one())
    if D.is_zero() or not _cross_products_vanish(D, W):
        return PClosure(NOT_P_CLOSED, W)
    idx = [i for i, c in enumerate(D.coeffs) if not c.is_zero()]
    if any(W.coeffs[i].is_zero() != D.coeffs[i].is_zero() for i in range(ring.nvars)):
        return PClosure(NOT_P_CLOSED, W)
    for i in sorted(idx, key=lambda i: len(D.coeffs[i])):
        try:
            a = exact_divide(W.coeffs[i], D.coeffs[i])
        except NotDivisible:
            continue
        return PClosure(P_CLOSED, W, a, ring.one())
    i = min(idx, key=lambda i: (len(D.coeffs[i]), D.coeffs[i].degree()))
    num, den = _reduce_pair(W.coeffs[i], D.coeffs[i])
    return PClosure(P_CLOSED, W, num, den)


def _order_at(f: Poly, point: Sequence[int]) -> int | float:
    return f.translate(point).order()


def is_multiplicative_at(D: Derivation, point: Sequence[int] | Mapping[str, int]) -> bool:
    """Whether D^{[p]} = aD with a a unit of the local ring at ``point``.

    When the stored denominator vanishes at the point (the multiplier is only
    known as a fraction of two functions that both vanish there), the test
    falls back to comparing orders of vanishing of numerator and
    denominator.  That comparison is exact when D is saturated at the point,
    because the multiplier then lies in the local ring.
    """
    if isinstance(point, Mapping):
        point = [point[n] for n in D.ring.names]
    pc = classify(D)
    if pc.status == NOT_P_CLOSED:
        raise PreconditionError("derivation is not p-closed")
    if pc.status == ADDITIVE:
        return False
    num, den = pc.a_num, pc.a_den
    if den.evaluate(point) != 0:
        return num.evaluate(point) != 0
    return _order_at(num, point) == _order_at(den, point)


def additive_rescale(D: Derivation, x: Poly) -> Derivation:
    """a*D with a = D(x)^(p-1); the result is additive."""
    dx = apply(D, x)
    if dx.is_zero():
        raise PreconditionError("D(x) = 0, rescaling is undefined")
    if classify(D).status == NOT_P_CLOSED:
        raise PreconditionError("derivation is not p-closed")
    out = D.scale(dx ** (D.ring.p - 1))
    if not p_power(out).is_zero():
        raise AssertionError("additive rescaling produced a non-additive derivation")
    return out


def hochschild_residual(a: Poly, D: Derivation) -> Derivation:
    """(aD)^[p] - a^p D^[p] - ((aD)^[p-1](a)) D; identically zero."""
    p = D.ring.p
    aD = D.scale(a)
    lhs = p_power(aD)
    tail = iterate(aD, a, p - 1)[-1]
    return lhs - p_power(D).scale(a ** p) - D.scale(tail)


def jacobson_commuting_residual(D1: Derivation, D2: Derivation) -> Derivation:
    """(D1+D2)^[p] - D1^[p] - D2^[p] for commuting D1, D2; identically zero."""
    if not lie_bracket(D1, D2).is_zero():
        raise PreconditionError("derivations do not commute")
    return p_power(D1 + D2) - p_power(D1) - p_power(D2)


ALPHA_P = "alpha_p"
MU_P = "mu_p"


def coaction_expand(D: Derivation, s: Poly, kind: str) -> list[Poly]:
    """Coefficients of the coaction of s in the basis 1, t, ..., t^(p-1).

    For ``alpha_p`` (D additive) the coaction is the truncated exponential
    sum_i D^i(s)/i! t^i in k[t]/(t^p).  For ``mu_p`` (D^[p] = D) the
    coefficient of t^j is the projection of s to the j-eigenspace of D,
    namely (1 - (D - j)^(p-1)) s, in k[t]/(t^p - 1).
    """
    p = D.ring.p
    W = p_power(D)
    seq = iterate(D, s, p - 1)
    if kind == ALPHA_P:
        if not W.is_zero():
            raise PreconditionError("alpha_p coaction needs an additive derivation")
        return [seq[i].scale(pow(math.factorial(i), -1, p)) for i in range(p)]
    if kind == MU_P:
        if W != D:
            raise PreconditionError("mu_p coaction needs D^[p] = D")
        out = []
        for j in range(p):
            # (D - j)^(p-1) = sum_k C(p-1,k) (-j)^(p-1-k) D^k
            acc = s.ring.zero()
            for k in range(p):
                c = math.comb(p - 1, k) * pow(-j, p - 1 - k, p)
                if c % p:
                    acc = acc + seq[k].scale(c)
            out.append(s - acc)
        return out
    raise PreconditionError(f"unknown coaction kind {kind!r}")


def coaction_product(u: Sequence[Poly], v: Sequence[Poly], kind: str) -> list[Poly]:
    """Multiply two coaction expansions in k[t]/(t^p) or k[t]/(t^p - 1)."""
    p = len(u)
    ring = u[0].ring
    out = [ring.zero() for _ in range(p)]
    for i in range(p):
        for j in range(p):
            k = i + j
            if k >= p:
                if kind == ALPHA_P:
                    continue
                k -= p
            out[k] = out[k] + u[i] * v[j]
    return out


def coaction_is_homomorphism(D: Derivation, f: Poly, g: Poly, kind: str) -> bool:
    lhs = coaction_expand(D, f * g, kind)
    rhs = coaction_product(coaction_expand(D, f, kind), coaction_expand(D, g, kind), kind)
    return lhs == rhs


def fixed_ideal_gens(D: Derivation) -> list[Poly]:
    return [c for n, c in zip(D.ring.names, D.coeffs) if n not in D.frozen and not c.is_zero()]
