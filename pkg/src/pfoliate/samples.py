"""Seeded random generators for property suites and the corpus."""
from __future__ import annotations

import random
from typing import Sequence

from .derivation import Derivation, apply, lie_bracket
from .gfpoly import Poly, Ring
from .linalg import mat_inverse


def random_poly(rng: random.Random, ring: Ring, degree: int, nterms: int, constant: bool = True) -> Poly:
    mons = ring.monomials_up_to(degree)
    if not constant:
        mons = [m for m in mons if any(m)]
    return Poly(ring, {rng.choice(mons): rng.randrange(1, ring.p) for _ in range(nterms)})


def random_derivation(rng: random.Random, ring: Ring, degree: int = 2, nterms: int = 3) -> Derivation:
    return Derivation(ring, [random_poly(rng, ring, degree, nterms) for _ in ring.names])


def random_invertible(rng: random.Random, n: int, p: int) -> list[list[int]]:
    while True:
        A = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        try:
            mat_inverse(A, p)
        except ValueError:
            continue
        return A


def linear_conjugate(D: Derivation, A: Sequence[Sequence[int]]) -> Derivation:
    """sigma o D o sigma^-1 for the linear automorphism sigma(x_i) = sum_j A[i][j] x_j."""
    ring = D.ring
    p = ring.p
    Ainv = mat_inverse(A, p)
    xs = ring.gens()

    def lin(M, i):
        acc = ring.zero()
        for j, c in enumerate(M[i]):
            if c:
                acc = acc + xs[j].scale(c)
        return acc

    sigma = {n: lin(A, i) for i, n in enumerate(ring.names)}
    tau = [lin(Ainv, i) for i in range(ring.nvars)]
    return Derivation(ring, [apply(D, t).substitute(sigma, ring) for t in tau], D.frozen)


def triangular_conjugate(D: Derivation, c: int) -> Derivation:
    """Conjugate by x_1 -> x_1, x_2 -> x_2 + c x_1^2 (inverse x_2 - c x_1^2)."""
    ring = D.ring
    x1, x2 = ring.names[0], ring.names[1]
    X1, X2 = ring.var(x1), ring.var(x2)
    sigma = {x2: X2 + (X1 ** 2).scale(c)}
    tau = {n: ring.var(n) for n in ring.names}
    tau[x2] = X2 - (X1 ** 2).scale(c)
    return Derivation(ring, [apply(D, tau[n]).substitute(sigma, ring) for n in ring.names], D.frozen)


def _multiplicative_seed(rng: random.Random, ring: Ring) -> Derivation:
    p, n = ring.p, ring.nvars
    while True:
        lam = [rng.randrange(p) for _ in range(n)]
        if sum(1 for v in lam if v) >= 2:
            return Derivation.toric(ring, lam)


def _additive_seeds(ring: Ring) -> list[Derivation]:
    p, n = ring.p, ring.nvars
    xs = ring.gens()
    z = ring.zero()
    seeds = []
    if n == 2:
        x, y = xs
        seeds += [Derivation(ring, [x ** p, y ** p]), Derivation(ring, [y ** p, x ** p])]
        if p >= 3:
            seeds.append(Derivation(ring, [y, x ** p]))
    else:
        x, y, w = xs[:3]
        seeds += [Derivation(ring, [x ** p, y ** p, w ** p] + [z] * (n - 3))]
        if p >= 3:
            seeds += [
                Derivation(ring, [y, w ** p, z] + [z] * (n - 3)),
                Derivation(ring, [y, w, z] + [z] * (n - 3)),
            ]
    return seeds


def random_pclosed_rank1(rng: random.Random, ring: Ring) -> tuple[Derivation, str]:
    """A p-closed derivation, saturated at and vanishing at the origin.

    Built from a multiplicative (diagonal) or additive seed, conjugated by a
    random linear automorphism (and, in two variables, sometimes a
    triangular quadratic one) and optionally scaled by a unit.  Returns the
    derivation and the seed kind.
    """
    if rng.random() < 0.5:
        D, kind = _multiplicative_seed(rng, ring), "multiplicative"
    else:
        D, kind = rng.choice(_additive_seeds(ring)), "additive"
    D = linear_conjugate(D, random_invertible(rng, ring.nvars, ring.p))
    if ring.nvars == 2 and kind == "multiplicative" and rng.random() < 0.5:
        D = triangular_conjugate(D, rng.randrange(1, ring.p))
    if rng.random() < 0.4:
        unit = random_poly(rng, ring, 1 if kind == "additive" else 2, 2, constant=False) + rng.randrange(1, ring.p)
        D = D.scale(unit)
    return D, kind


def random_commuting_pair(rng: random.Random, ring: Ring) -> tuple[Derivation, Derivation]:
    """Pairs with vanishing bracket, from a few constructions."""
    p = ring.p
    kind = rng.randrange(4 if ring.nvars >= 3 else 3)
    if kind == 3:
        # two fields along different directions whose coefficients depend on a third variable
        x, y, z = ring.names[:3]
        sub = Ring((x,), p)
        f, g = random_poly(rng, sub, 2, 2), random_poly(rng, sub, 2, 2)
        lift = lambda h: Poly(ring, {(e[0],) + (0,) * (ring.nvars - 1): c for e, c in h.terms.items()})
        D1 = Derivation(ring, {y: lift(f)})
        D2 = Derivation(ring, {z: lift(g)})
    elif kind == 0:
        # coefficients in disjoint variable sets
        x, y = ring.names[0], ring.names[1]
        sub_x = Ring((x,), p)
        sub_y = Ring((y,), p)
        f = random_poly(rng, sub_x, 2, 2)
        g = random_poly(rng, sub_y, 2, 2)
        fx = Poly(ring, {(e[0],) + (0,) * (ring.nvars - 1): c for e, c in f.terms.items()})
        gy = Poly(ring, {(0, e[0]) + (0,) * (ring.nvars - 2): c for e, c in g.terms.items()})
        D1 = Derivation(ring, {x: fx})
        D2 = Derivation(ring, {y: gy})
    elif kind == 1:
        # D and a scalar multiple of D
        D1 = random_derivation(rng, ring, 2, 3)
        D2 = D1.scale(rng.randrange(p))
    else:
        # two diagonal derivations
        D1 = Derivation.toric(ring, [rng.randrange(p) for _ in ring.names])
        D2 = Derivation.toric(ring, [rng.randrange(p) for _ in ring.names])
    if not lie_bracket(D1, D2).is_zero():
        raise AssertionError("commuting-pair generator produced a nonzero bracket")
    return D1, D2


def identity_sample(rng: random.Random, p: int, k: int):
    """(a, D, D1, D2) for the Hochschild and Jacobson suites, degrees <= 2.

    Every fifth sample lives in three variables (with sparser coefficients),
    the rest in two.
    """
    ring = Ring(("x", "y", "z"), p) if k % 5 == 0 else Ring(("x", "y"), p)
    nt = 2 if ring.nvars == 3 else 3
    a = random_poly(rng, ring, 2, nt)
    D = random_derivation(rng, ring, 2, nt)
    D1, D2 = random_commuting_pair(rng, ring)
    return a, D, D1, D2
