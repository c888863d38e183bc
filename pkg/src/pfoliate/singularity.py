"""Pointwise classification of rank-one foliations on affine space.

The lc test looks at the endomorphism of m/m^2 induced by a generator
vanishing at the point: the foliation is lc there exactly when that linear
part is not nilpotent.  For nilpotent linear parts :func:`find_nonlc_divisor`
produces an explicit exceptional divisor violating the lc inequality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .birational import Chart, DiscrepancyRecord, blowup_chart, discrepancy_rank1
from .derivation import (
    NOT_P_CLOSED,
    Derivation,
    apply,
    classify,
    is_multiplicative_at,
    lie_bracket,
    p_power,
)
from .errors import MaxStepsExhausted, PreconditionError
from .gfpoly import Poly, Ring, divides, monomial_content, monomial_ideal_member
from .linalg import dense_nullspace, is_nilpotent, is_zero_matrix, mat_inverse, mat_pow, mat_vec

REGULAR_CANONICAL = "regular_canonical"
LC_MULTIPLICATIVE = "lc_multiplicative"
NOT_LC = "not_lc"

NEVER_TERMINAL_NOTE = "a nonzero rank-one foliation on a regular variety is never terminal"

Matrix = tuple[tuple[int, ...], ...]


def _point(ring: Ring, point: Sequence[int] | Mapping[str, int] | None) -> tuple[int, ...]:
    if point is None:
        return (0,) * ring.nvars
    if isinstance(point, Mapping):
        return tuple(point.get(n, 0) % ring.p for n in ring.names)
    if len(point) != ring.nvars:
        raise PreconditionError(f"point has {len(point)} coordinates, ring has {ring.nvars}")
    return tuple(c % ring.p for c in point)


@dataclass(frozen=True)
class LinearPart:
    matrix: Matrix

    @property
    def n(self) -> int:
        return len(self.matrix)

    def is_nilpotent(self, p: int) -> bool:
        return is_nilpotent(self.matrix, p)

    def is_zero(self) -> bool:
        return is_zero_matrix(self.matrix)


def linear_part(D: Derivation, point=None) -> LinearPart:
    """M[i][j] = coefficient of x_i in D(x_j), after moving the point to the origin."""
    ring = D.ring
    pt = _point(ring, point)
    T = D.translate(pt)
    n = ring.nvars
    for name, c in zip(ring.names, T.coeffs):
        if c.constant_term():
            raise PreconditionError(f"D(x_{name}) does not vanish at the point")
    M = [[0] * n for _ in range(n)]
    for j, c in enumerate(T.coeffs):
        for i in range(n):
            e = [0] * n
            e[i] = 1
            M[i][j] = c.coeff(e)
    return LinearPart(tuple(tuple(r) for r in M))


@dataclass(frozen=True)
class Rank1Verdict:
    status: str
    point: tuple[int, ...]
    linear_part: LinearPart | None = None
    witness_var: str | None = None
    multiplicative: bool | None = None
    notes: tuple[str, ...] = (NEVER_TERMINAL_NOTE,)

    @property
    def is_lc(self) -> bool:
        return self.status != NOT_LC

    @property
    def cross_check_ok(self) -> bool:
        """lc at a singular point must coincide with a multiplicative singularity."""
        if self.status == REGULAR_CANONICAL:
            return True
        return self.multiplicative == (self.status == LC_MULTIPLICATIVE)


def _has_monomial_factor_at(D: Derivation, pt: Sequence[int]) -> bool:
    T = D.translate(pt)
    m = monomial_content(T.coeffs)
    return any(next(iter(m.terms)))


def classify_rank1(D: Derivation, point=None) -> Rank1Verdict:
    ring = D.ring
    pt = _point(ring, point)
    if D.is_zero():
        raise PreconditionError("zero derivation")
    if classify(D).status == NOT_P_CLOSED:
        raise PreconditionError("derivation is not p-closed")
    T = D.translate(pt)
    for name, c in zip(ring.names, T.coeffs):
        if c.constant_term():
            return Rank1Verdict(REGULAR_CANONICAL, pt, witness_var=name)
    if _has_monomial_factor_at(D, pt):
        raise PreconditionError("derivation is not saturated at the point; saturate it first")
    M = linear_part(D, pt)
    status = NOT_LC if M.is_nilpotent(ring.p) else LC_MULTIPLICATIVE
    mult = is_multiplicative_at(D, pt)
    return Rank1Verdict(status, pt, M, multiplicative=mult)


@dataclass(frozen=True)
class LinearChange:
    """New coordinates z_k = sum_j rows[k][j] x_j (names are reused)."""

    ring: Ring
    rows: Matrix
    chain_length: int

    def apply(self, D: Derivation) -> Derivation:
        p = self.ring.p
        inv = mat_inverse(self.rows, p)
        names = self.ring.names
        # D(z_k) in old coordinates, then substitute x_j = sum_k inv[j][k] z_k
        subst = {}
        for j, n in enumerate(names):
            acc = self.ring.zero()
            for k, m in enumerate(names):
                if inv[j][k]:
                    acc = acc + self.ring.var(m).scale(inv[j][k])
            subst[n] = acc
        coeffs = []
        for row in self.rows:
            acc = self.ring.zero()
            for j, c in enumerate(row):
                if c:
                    acc = acc + D.coeffs[j].scale(c)
            coeffs.append(acc.substitute(subst, self.ring))
        return Derivation(self.ring, coeffs, D.frozen)

    def describe(self) -> dict:
        return {"linear_change": [list(r) for r in self.rows], "chain_length": self.chain_length}


def jordan_chain_coordinates(M: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], int]:
    """Coordinates adapted to a longest Jordan chain of the nilpotent operator M.

    M acts on coefficient vectors of linear forms.  Returns rows
    z_1, ..., z_r, u_1, ..., u_(n-r) where M z_(k+1) = z_k, M z_1 = 0 and the
    u's span an M-invariant complement, together with r.
    """
    n = len(M)
    r = 1
    while not is_zero_matrix(mat_pow(M, r, p)):
        r += 1
    top = mat_pow(M, r - 1, p)
    j = next(j for j in range(n) if any(top[i][j] for i in range(n)))
    v = [int(i == j) for i in range(n)]
    chain = [v]
    for _ in range(r - 1):
        chain.append(mat_vec(M, chain[-1], p))
    chain.reverse()  # chain[0] = z_1 = M^(r-1) v, chain[-1] = z_r = v
    i0 = next(i for i in range(n) if chain[0][i])
    # complement: {u : (M^k u)[i0] = 0 for k < r}, invariant under M
    conds = [list(mat_pow(M, k, p)[i0]) for k in range(r)]
    comp = dense_nullspace(conds, n, p)
    rows = chain + comp
    mat_inverse(rows, p)  # sanity: the rows form a basis
    return rows, r


@dataclass(frozen=True)
class NonLcCertificate:
    path: tuple
    record: DiscrepancyRecord
    order: int
    blowups: int
    intermediate: tuple[DiscrepancyRecord, ...] = ()

    @property
    def a_F(self) -> int:
        return self.record.a_F

    @property
    def epsilon(self) -> int:
        return self.record.epsilon


def _order(D: Derivation) -> int:
    return min(c.order() for c in D.coeffs if not c.is_zero())


def find_nonlc_divisor(D: Derivation, point=None, max_steps: int | None = None) -> NonLcCertificate:
    """Blow-up sequence ending in a divisor E with a(E; F) < -epsilon(E).

    While the linear part is nilpotent but nonzero, change coordinates to a
    longest Jordan chain z_1..z_r and blow up (z_1, ..., z_r) in the z_r
    chart; these steps have discrepancy 0 and keep working at the chart
    origin.  Once the linear part vanishes, blow up the point.  A Jordan
    centre that is not invariant raises PreconditionError.
    """
    ring = D.ring
    pt = _point(ring, point)
    verdict = classify_rank1(D, pt)
    if verdict.status != NOT_LC:
        raise PreconditionError(f"foliation is {verdict.status} at the point")
    n = ring.nvars
    limit = 2 * n if max_steps is None else max_steps
    cur = D.translate(pt)
    d = _order(cur)
    path: tuple = ()
    intermediate = []
    blowups = 0
    while blowups < limit:
        M = linear_part(cur)
        if M.is_zero():
            chart = blowup_chart(cur.ring, cur.ring.names, cur.ring.names[0])
            rec = discrepancy_rank1(cur, chart, path)
            blowups += 1
            if not rec.a_F < -rec.epsilon:
                raise AssertionError(f"point blow-up gave a_F={rec.a_F}, epsilon={rec.epsilon}")
            return NonLcCertificate(rec.chart_path, rec, d, blowups, tuple(intermediate))
        rows, r = jordan_chain_coordinates(M.matrix, ring.p)
        change = LinearChange(cur.ring, tuple(tuple(x) for x in rows), r)
        cur = change.apply(cur)
        path = path + (change,)
        names = cur.ring.names
        for k in range(r):
            if any(not any(e[:r]) for e in cur.coeffs[k].terms):
                raise PreconditionError(
                    f"Jordan centre ({', '.join(names[:r])}) is not invariant; no certificate strategy applies"
                )
        chart = blowup_chart(cur.ring, names[:r], names[r - 1])
        rec = discrepancy_rank1(cur, chart, path)
        blowups += 1
        if rec.a_F < -rec.epsilon:
            return NonLcCertificate(rec.chart_path, rec, d, blowups, tuple(intermediate))
        if rec.a_F != 0:
            raise AssertionError(f"Jordan-block blow-up had nontrivial content {rec.content}")
        intermediate.append(rec)
        path = rec.chart_path
        cur = rec.saturated_pullback
        if any(c.constant_term() for c in cur.coeffs):
            raise AssertionError("chart origin became regular during the Jordan reduction")
    raise MaxStepsExhausted(f"no violating divisor within {limit} blow-ups")


def fedder_f_pure(f: Poly) -> bool:
    """Fedder's criterion at the origin: F-pure iff f^(p-1) is not in (x_1^p, ..., x_n^p)."""
    if f.is_zero():
        raise PreconditionError("zero hypersurface")
    p = f.ring.p
    ideal = [f.ring.var(n) ** p for n in f.ring.names]
    return not monomial_ideal_member(f ** (p - 1), ideal)


def semisimple_linear_check(D: Derivation, point=None) -> bool:
    """For D with D^[p] = D, whether the linear part satisfies M^p = M."""
    if p_power(D) != D:
        raise PreconditionError("need D^[p] = D")
    M = linear_part(D, point)
    p = D.ring.p
    return mat_pow(M.matrix, p, p) == [list(r) for r in M.matrix]


def commuting_multiplicative_check(gens: Sequence[Derivation], point=None) -> bool:
    """Sufficient (not necessary) condition for an at-worst-multiplicative foliation.

    True when the generators pairwise commute and each is multiplicative at
    the point.
    """
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if not lie_bracket(a, b).is_zero():
                return False
    pt = _point(gens[0].ring, point)
    for g in gens:
        if classify(g).status == NOT_P_CLOSED or not is_multiplicative_at(g, pt):
            return False
    return True


def ann_foliation(s: Poly) -> list[Derivation]:
    """Generators s_i d/dx_1 - s_1 d/dx_i of the derivations killing s.

    The pivot is the first variable with a nonzero partial derivative.
    """
    ring = s.ring
    parts = [s.partial_index(i) for i in range(ring.nvars)]
    pivots = [i for i, d in enumerate(parts) if not d.is_zero()]
    if not pivots:
        raise PreconditionError(f"{s} is a p-th power")
    k = pivots[0]
    out = []
    for i in range(ring.nvars):
        if i == k:
            continue
        coeffs = [ring.zero()] * ring.nvars
        coeffs[k] = parts[i]
        coeffs[i] = -parts[k]
        g = Derivation(ring, coeffs)
        if not apply(g, s).is_zero():
            raise AssertionError("Ann generator does not annihilate s")
        out.append(g)
    return out


REGULAR = "regular"
STRICTLY_LC = "strictly_lc"


@dataclass(frozen=True)
class AnnVerdict:
    status: str
    point: tuple[int, ...]
    generator: Derivation
    matrix: Matrix | None
    cross_check: str | None
    agrees: bool


def ann_surface_classify(phi: Poly, point=None) -> AnnVerdict:
    """Classify the foliation Ann(phi) on a surface at a point.

    Regular when d(phi) does not vanish there; otherwise lc (strictly) iff
    [[phi_11, -2 phi_20], [2 phi_02, -phi_11]] is not nilpotent.  The answer
    is cross-checked with :func:`classify_rank1` on phi_y d/dx - phi_x d/dy.
    """
    ring = phi.ring
    if ring.nvars != 2:
        raise PreconditionError("surface classifier needs exactly two variables")
    pt = _point(ring, point)
    x, y = ring.names
    f = phi.translate(pt)
    fx, fy = f.partial(x), f.partial(y)
    gen = Derivation(ring, [fy, -fx])
    if gen.is_zero():
        raise PreconditionError("phi is a p-th power")
    # gcd hypothesis, heuristically: no monomial or single-polynomial common factor
    if any(next(iter(monomial_content([fx, fy]).terms))):
        raise PreconditionError("partials of phi share a monomial factor")
    for g in (fx, fy):
        if not g.is_zero() and not g.is_constant() and all(divides(g, h) for h in (fx, fy)):
            raise PreconditionError(f"partials of phi share the factor {g}")
    c = f.coeff
    p = ring.p
    if c((1, 0)) or c((0, 1)):
        status, M = REGULAR, None
    else:
        M = ((c((1, 1)) % p, (-2 * c((2, 0))) % p), ((2 * c((0, 2))) % p, (-c((1, 1))) % p))
        status = NOT_LC if is_nilpotent(M, p) else STRICTLY_LC
    cross = classify_rank1(gen).status  # gen is already centred at the origin
    expected = {REGULAR: REGULAR_CANONICAL, STRICTLY_LC: LC_MULTIPLICATIVE, NOT_LC: NOT_LC}[status]
    return AnnVerdict(status, pt, gen, M, cross, cross == expected)
