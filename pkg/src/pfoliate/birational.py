"""Blow-up charts, pullback of derivations, saturation and discrepancies.

A chart is a monomial map x_i = m_i(y).  Writing E for the exponent matrix
(E[i][j] = exponent of y_j in m_i), a derivation D' on the chart satisfies
D'(m_i) = m_i * sum_j E[i][j] D'(y_j)/y_j, so matching D'(m_i) with
D(x_i) o pi gives

    D'(y_j) = y_j * sum_i Einv[j][i] * (D(x_i) o pi) / m_i,

with Einv the inverse of E modulo p.  Poles can only appear along the
exceptional coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .derivation import Derivation, apply
from .errors import (
    LaurentSlotError,
    NotDivisible,
    PreconditionError,
    SaturationUnsupported,
)
from .gfpoly import Exps, Poly, Ring, divides, exact_divide, monomial_content
from .linalg import mat_inverse


@dataclass(frozen=True)
class Chart:
    target: Ring  # x-variables
    source: Ring  # y-variables (polynomial ring of the chart)
    images: tuple[Exps, ...]  # images[i] = exponents over y of the image of x_i
    exceptional_var: str
    center: tuple[str, ...]
    chart_var: str
    weights: tuple[int, ...] | None = None

    @property
    def laurent_ring(self) -> Ring:
        return self.source.with_laurent(self.exceptional_var)

    def image(self, name: str) -> Poly:
        return self.source.monomial(self.images[self.target.index(name)])

    def pull_function(self, g: Poly) -> Poly:
        """g o pi."""
        return g.substitute({n: self.image(n) for n in self.target.names}, self.source)

    def describe(self) -> dict:
        return {
            "center": list(self.center),
            "chart": self.chart_var,
            "exceptional": self.exceptional_var,
            "map": {n: str(self.image(n)) for n in self.target.names},
            "weights": list(self.weights) if self.weights else None,
        }


def blowup_chart(
    ring: Ring,
    center: Sequence[str],
    chart_var: str,
    weights: Mapping[str, int] | None = None,
    new_names: Sequence[str] | None = None,
) -> Chart:
    """The ``chart_var`` chart of the blow-up of the coordinate ideal ``center``.

    Standard: x_c -> y_c, x_i -> y_c * y_i for i in center other than c.
    Weighted (the chart var must have weight 1): x_i -> y_c^(w_i) * y_i,
    e.g. weights {x1: 1, xn: p} give x1 -> y1, xn -> y1^p * yn.
    Variables outside the center are unchanged.  The chart variables reuse
    the source names unless ``new_names`` is given.
    """
    center = tuple(center)
    if not center:
        raise PreconditionError("empty center")
    for v in center:
        ring.index(v)
    if chart_var not in center:
        raise PreconditionError(f"chart variable {chart_var} is not in the center")
    w = {v: 1 for v in center}
    if weights:
        for v, k in weights.items():
            if v not in center:
                raise PreconditionError(f"weight given for {v}, which is not in the center")
            if k < 1:
                raise PreconditionError("weights must be positive")
            w[v] = k
    if w[chart_var] != 1:
        raise PreconditionError("the chart variable must have weight 1")
    names = tuple(new_names) if new_names is not None else ring.names
    if len(names) != ring.nvars:
        raise PreconditionError("new_names must match the number of variables")
    source = Ring(names, ring.p)
    c = ring.index(chart_var)
    images = []
    for i, v in enumerate(ring.names):
        e = [0] * ring.nvars
        e[i] = 1
        if v in center and i != c:
            e[c] += w[v]
        images.append(tuple(e))
    wt = tuple(w.get(v, 1) for v in ring.names) if weights else None
    return Chart(ring, source, tuple(images), names[c], center, chart_var, wt)


def pullback(D: Derivation, chart: Chart) -> Derivation:
    """The derivation D' on the chart with D'(g o pi) = D(g) o pi."""
    if not D.ring.compatible(chart.target):
        raise PreconditionError("derivation and chart live on different rings")
    p = D.ring.p
    n = D.ring.nvars
    E = [list(r) for r in chart.images]
    try:
        Einv = mat_inverse(E, p)
    except ValueError:
        raise PreconditionError("chart exponent matrix is singular mod p") from None
    L = chart.laurent_ring
    pulled = [chart.pull_function(c) for c in D.coeffs]
    # intermediate sums can have negative exponents anywhere; validate at the end
    acc: list[dict] = [{} for _ in range(n)]
    for i in range(n):
        if pulled[i].is_zero():
            continue
        for j in range(n):
            c = Einv[j][i]
            if not c:
                continue
            shift = [-a for a in chart.images[i]]
            shift[j] += 1
            for e, v in pulled[i].terms.items():
                k = tuple(a + b for a, b in zip(e, shift))
                s = (acc[j].get(k, 0) + c * v) % p
                if s:
                    acc[j][k] = s
                else:
                    acc[j].pop(k, None)
    try:
        coeffs = [Poly(L, a) for a in acc]
    except LaurentSlotError as exc:
        raise LaurentSlotError(f"pullback has poles outside the exceptional divisor: {exc}") from None
    out = Derivation(L, coeffs)
    # chain rule on coordinates
    for i, name in enumerate(D.ring.names):
        m = chart.image(name).in_ring(L)
        if apply(out, m) != pulled[i].in_ring(L):
            raise AssertionError(f"pullback chain rule fails on {name}")
    return out


def _plain(D: Derivation) -> Derivation:
    """Drop the Laurent designation when no pole is present."""
    if D.ring.laurent is None:
        return D
    return D.in_ring(D.ring.with_laurent(None))


def saturate_rank1(D: Derivation) -> tuple[Derivation, Poly]:
    """Divide out the monomial content of the coefficients.

    Returns the primitive derivation and the extracted monomial.  A
    non-monomial common factor is detected by a pairwise divisibility probe
    and reported as unsupported rather than silently ignored.
    """
    if D.is_zero():
        raise PreconditionError("cannot saturate the zero derivation")
    m = monomial_content(D.coeffs)
    e = next(iter(m.terms))
    neg = tuple(-a for a in e)
    coeffs = [c.shift(neg) if not c.is_zero() else c for c in D.coeffs]
    out = _plain(Derivation(D.ring, coeffs, D.frozen))
    post = monomial_content(out.coeffs)
    if any(next(iter(post.terms))):
        raise AssertionError("saturation left a monomial factor")
    nonzero = [c for c in out.coeffs if not c.is_zero()]
    for g in nonzero:
        if g.is_monomial():
            continue
        if all(divides(g, f) for f in nonzero):
            raise SaturationUnsupported(f"coefficients share the non-monomial factor {g}")
    return out, m


def is_invariant(D: Derivation, f: Poly) -> bool:
    """Whether the divisor (f = 0) is D-invariant, i.e. D(f) is in (f)."""
    if f.is_zero():
        raise PreconditionError("the divisor equation must be nonzero")
    D = _plain(D)
    f = f.in_ring(D.ring)
    try:
        exact_divide(apply(D, f), f)
    except NotDivisible:
        return False
    return True


def epsilon(D: Derivation, f: Poly) -> int:
    return 0 if is_invariant(D, f) else 1


@dataclass(frozen=True)
class DiscrepancyRecord:
    chart_path: tuple
    a_F: int
    epsilon: int
    saturated_pullback: Derivation
    content: Poly
    raw_pullback: Derivation

    @property
    def exceptional_var(self) -> str:
        return self.chart_path[-1].exceptional_var


def discrepancy_rank1(D: Derivation, chart: Chart, path: tuple = ()) -> DiscrepancyRecord:
    """Discrepancy a(E; F) and epsilon(E) of the exceptional divisor of ``chart``.

    D is saturated first, then pulled back; a(E; F) is minus the order of the
    pullback along E, and epsilon is tested on the saturated pullback.
    """
    Dsat, _ = saturate_rank1(D)
    raw = pullback(Dsat, chart)
    exc = chart.exceptional_var
    a_F = -min(c.valuation(exc) for c in raw.coeffs if not c.is_zero())
    sat, content = saturate_rank1(raw)
    eps = epsilon(sat, sat.ring.var(exc))
    return DiscrepancyRecord(tuple(path) + (chart,), a_F, eps, sat, content, raw)


@dataclass(frozen=True)
class SequenceReport:
    weights: tuple[int, int]
    records: tuple[DiscrepancyRecord, ...]
    reached_regular: bool
    exhausted: bool

    @property
    def steps(self) -> int:
        return len(self.records)


def toric_blowup_sequence(a: int, b: int, p: int, max_steps: int | None = None) -> SequenceReport:
    """Iterate the x-chart origin blow-up starting from a x d/dx + b y d/dy.

    Stops when the saturated pullback is regular at the chart origin (the
    weight on y has reached zero) or after ``max_steps`` steps.
    """
    if (a * b) % p == 0:
        raise PreconditionError("need ab != 0 mod p")
    ring = Ring(("x", "y"), p)
    D = Derivation.toric(ring, (a, b))
    limit = p if max_steps is None else max_steps
    records = []
    path: tuple = ()
    for _ in range(limit):
        chart = blowup_chart(ring, ("x", "y"), "x")
        rec = discrepancy_rank1(D, chart, path)
        records.append(rec)
        path = rec.chart_path
        D = rec.saturated_pullback
        if any(c.constant_term() for c in D.coeffs):
            return SequenceReport((a % p, b % p), tuple(records), True, False)
    return SequenceReport((a % p, b % p), tuple(records), False, True)
