"""Rings of constants: exact toric monoids and degree-truncated kernels."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .derivation import Derivation, apply
from .errors import PreconditionError
from .gfpoly import Exps, Poly, Ring, grlex_key
from .linalg import SparseEchelon, rref


@dataclass(frozen=True)
class ToricMonoid:
    weights: tuple[int, ...]
    p: int
    minimal_gens: tuple[Exps, ...]

    def contains(self, e: Sequence[int]) -> bool:
        return sum(w * a for w, a in zip(self.weights, e)) % self.p == 0

    def as_polys(self, ring: Ring) -> list[Poly]:
        return [ring.monomial(e) for e in self.minimal_gens]


def toric_constants(weights: Sequence[int], p: int) -> ToricMonoid:
    """Minimal generators of {e >= 0 : weights . e = 0 mod p}.

    Every generator lies in the box [0, p]^n because x_i^p is always a
    constant, so a brute-force scan of the box is exact.
    """
    w = tuple(x % p for x in weights)
    n = len(w)
    members = [
        e for e in itertools.product(range(p + 1), repeat=n)
        if any(e) and sum(a * b for a, b in zip(w, e)) % p == 0
    ]
    members.sort(key=grlex_key)
    minimal: list[Exps] = []
    for e in members:
        # e decomposes iff some smaller nonzero member sits below it, and
        # every such member dominates a minimal one
        if not any(all(a <= b for a, b in zip(g, e)) for g in minimal):
            minimal.append(e)
    return ToricMonoid(w, p, tuple(minimal))


@dataclass(frozen=True)
class TruncatedKernel:
    degree: int
    basis: tuple[Poly, ...]
    touches_boundary: bool = False

    def contains(self, f: Poly) -> bool:
        if not self.basis:
            return f.is_zero()
        ech = SparseEchelon(f.ring.p, key=grlex_key)
        for b in self.basis:
            ech.insert(dict(b.terms))
        return ech.contains(dict(f.terms))


def _image_of_monomial(coeffs: Sequence[Poly], e: Exps, p: int, tag: int, out: dict) -> None:
    for i, c in enumerate(coeffs):
        a = e[i] % p
        if not a or c.is_zero():
            continue
        base = e[:i] + (e[i] - 1,) + e[i + 1:]
        for ce, cc in c.terms.items():
            k = (tag, tuple(x + y for x, y in zip(ce, base)))
            s = (out.get(k, 0) + a * cc) % p
            if s:
                out[k] = s
            else:
                out.pop(k, None)


def kernel_truncated(gens: Sequence[Derivation], d: int) -> TruncatedKernel:
    """F_p-basis of {f : deg f <= d, D(f) = 0 for all D in gens}.

    The basis is reduced row-echelon with respect to grlex and listed by
    ascending leading monomial.
    """
    if not gens:
        raise PreconditionError("need at least one derivation")
    ring = gens[0].ring
    for D in gens[1:]:
        ring = ring.join(D.ring)
    p = ring.p
    ech = SparseEchelon(p, track=True)
    relations = []
    for e in ring.monomials_up_to(d):
        img: dict = {}
        for t, D in enumerate(gens):
            _image_of_monomial(D.coeffs, e, p, t, img)
        if not img:
            relations.append({e: 1})
            continue
        rel = ech.insert(img, e)
        if rel is not None:
            relations.append(rel)
    rows = rref(relations, p, key=grlex_key)
    basis = tuple(Poly(ring, r) for r in rows)
    return TruncatedKernel(d, basis, _boundary_flag(basis, d))


def _boundary_flag(basis: Sequence[Poly], d: int) -> bool:
    """Heuristic: a top-degree leading monomial that is not a product of lower ones."""
    leads = {b.leading()[0] for b in basis}
    low = [e for e in leads if 0 < sum(e) < d]
    lowset = set(low)
    for e in leads:
        if sum(e) != d:
            continue
        if not any(tuple(a - b for a, b in zip(e, g)) in lowset for g in low):
            return True
    return False


def _products_up_to(gens: Sequence[Poly], d: int, ring: Ring) -> list[Poly]:
    gs = [g for g in gens if not g.is_zero() and g.degree() > 0]
    out = [ring.one()]
    # depth-first over non-decreasing index sequences, pruning by degree
    stack = [(0, ring.one(), 0)]
    while stack:
        start, prod, deg = stack.pop()
        for i in range(start, len(gs)):
            nd = deg + gs[i].degree()
            if nd <= d:
                q = prod * gs[i]
                out.append(q)
                stack.append((i, q, nd))
    return out


def subalgebra_member_truncated(f: Poly, gens: Sequence[Poly], d: int) -> bool:
    if f.degree() > d:
        raise PreconditionError(f"deg f = {f.degree()} exceeds bound {d}")
    ech = SparseEchelon(f.ring.p)
    for q in _products_up_to(gens, d, f.ring):
        ech.insert(dict(q.terms))
    return ech.contains(dict(f.terms))


@dataclass
class CertifyReport:
    passed: bool
    degree: int
    kernel_dimension: int
    first_failure: Poly | None = None
    touches_boundary: bool = False


def certify_generators(gens_D: Sequence[Derivation], claimed: Sequence[Poly], d: int) -> CertifyReport:
    """Check that every kernel element up to degree d is a polynomial in ``claimed``."""
    for g in claimed:
        for D in gens_D:
            if not apply(D, g).is_zero():
                raise PreconditionError(f"claimed generator {g} is not a constant of {D}")
    K = kernel_truncated(gens_D, d)
    ring = gens_D[0].ring
    ech = SparseEchelon(ring.p)
    for q in _products_up_to(claimed, d, ring):
        ech.insert(dict(q.terms))
    for b in K.basis:
        if not ech.contains(dict(b.terms)):
            return CertifyReport(False, d, len(K.basis), b, K.touches_boundary)
    return CertifyReport(True, d, len(K.basis), None, K.touches_boundary)


def check_relation(assignments: Mapping[str, Poly], relation: Poly) -> bool:
    """Substitute generator values into a relation and test for zero."""
    target = next(iter(assignments.values())).ring
    for g in assignments.values():
        target = target.join(g.ring)
    # unassigned names that also live in the target ring map to themselves
    missing = relation.variables() - set(assignments) - set(target.names)
    if missing:
        raise PreconditionError(f"no assignment for {sorted(missing)}")
    images = {
        n: assignments[n] if n in assignments else (target.var(n) if n in target.names else target.zero())
        for n in relation.ring.names
    }
    return relation.substitute(images, target).is_zero()
