"""Sparse multivariate polynomials over a prime field F_p.

Terms are stored as a dict from exponent tuples to residues in ``[1, p)``.
One variable of a ring may be designated as a Laurent variable, in which
case it (and only it) may carry negative exponents.  This is what blow-up
pullbacks need: poles only ever appear along the exceptional coordinate.

Monomials are ordered graded-lexicographically by the ring's variable
order, which fixes both division and printing.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    DegreeCapExceeded,
    LaurentSlotError,
    NotDivisible,
    PreconditionError,
    RingMismatchError,
    UnknownVariableError,
)

Exps = tuple[int, ...]

DEGREE_CAP_ENV = "PFOLIATE_DEGREE_CAP"
_cap_override: contextvars.ContextVar[int | None] = contextvars.ContextVar("degree_cap", default=None)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % q for q in range(3, math.isqrt(n) + 1, 2))


def degree_cap(p: int) -> int:
    """Current total-degree cap: context override, then environment, then 10*p."""
    cap = _cap_override.get()
    if cap is not None:
        return cap
    env = os.environ.get(DEGREE_CAP_ENV)
    if env:
        return int(env)
    return 10 * p


@contextlib.contextmanager
def degree_cap_override(cap: int):
    token = _cap_override.set(cap)
    try:
        yield
    finally:
        _cap_override.reset(token)


def grlex_key(e: Exps) -> tuple:
    return (sum(e), e)


@dataclass(frozen=True)
class Ring:
    """Ordered variable names, a prime modulus and an optional Laurent variable."""

    names: tuple[str, ...]
    p: int
    laurent: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not is_prime(self.p):
            raise PreconditionError(f"modulus {self.p} is not prime")
        if self.p >= 2**31:
            raise PreconditionError("modulus must fit in 31 bits")
        if len(set(self.names)) != len(self.names):
            raise PreconditionError(f"duplicate variable names in {self.names}")
        if self.laurent is not None and self.laurent not in self.names:
            raise UnknownVariableError(self.laurent)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    @property
    def laurent_index(self) -> int | None:
        return None if self.laurent is None else self.names.index(self.laurent)

    def with_laurent(self, name: str | None) -> Ring:
        return Ring(self.names, self.p, name)

    def compatible(self, other: Ring) -> bool:
        return self.names == other.names and self.p == other.p

    def join(self, other: Ring) -> Ring:
        if self is other:
            return self
        if not self.compatible(other):
            raise RingMismatchError(f"{self.names} mod {self.p} vs {other.names} mod {other.p}")
        if self.laurent == other.laurent or other.laurent is None:
            return self
        if self.laurent is None:
            return other
        raise RingMismatchError(f"different Laurent variables {self.laurent} and {other.laurent}")

    # constructors
    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c: int) -> Poly:
        return Poly(self, {(0,) * self.nvars: c})

    def var(self, name: str) -> Poly:
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Poly(self, {tuple(e): 1})

    def gens(self) -> list[Poly]:
        return [self.var(n) for n in self.names]

    def monomial(self, exps: Sequence[int], coeff: int = 1) -> Poly:
        return Poly(self, {tuple(exps): coeff})

    def monomials_up_to(self, d: int) -> list[Exps]:
        """All exponent vectors of total degree <= d, ascending in grlex."""
        out: list[Exps] = []
        for k in range(d + 1):
            out.extend(sorted(_compositions(k, self.nvars), key=grlex_key))
        return out


def _compositions(k: int, n: int) -> Iterator[Exps]:
    if n == 0:
        if k == 0:
            yield ()
        return
    if n == 1:
        yield (k,)
        return
    for first in range(k, -1, -1):
        for rest in _compositions(k - first, n - 1):
            yield (first, *rest)


def _check_exps(ring: Ring, terms: Mapping[Exps, int]) -> None:
    li = ring.laurent_index
    for e in terms:
        if len(e) != ring.nvars:
            raise RingMismatchError(f"exponent vector {e} has wrong length for {ring.names}")
        for i, a in enumerate(e):
            if a < 0 and i != li:
                raise LaurentSlotError(f"negative exponent in {ring.names[i]!r}")


def _enforce_cap(ring: Ring, terms: Mapping[Exps, int]) -> None:
    if not terms:
        return
    cap = degree_cap(ring.p)
    top = max(sum(e) for e in terms)
    if top > cap:
        raise DegreeCapExceeded(f"total degree {top} exceeds cap {cap}")


class Poly:
    """Immutable sparse polynomial.  Build via :class:`Ring` helpers or the parser."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Exps, int], *, _trusted: bool = False):
        self.ring = ring
        if _trusted:
            self._terms = terms
        else:
            p = ring.p
            clean = {}
            for e, c in terms.items():
                c %= p
                if c:
                    clean[tuple(e)] = c
            _check_exps(ring, clean)
            self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> Poly:
        return cls(ring, terms, _trusted=True)

    # basic access
    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def terms(self) -> Mapping[Exps, int]:
        return self._terms

    def items(self) -> list[tuple[Exps, int]]:
        """Terms in descending grlex order (leading term first)."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def coeff(self, exps: Sequence[int]) -> int:
        return self._terms.get(tuple(exps), 0)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.ring.nvars, 0)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def order(self) -> int | float:
        """Lowest total degree of a term (order of vanishing at the origin)."""
        return min((sum(e) for e in self._terms), default=math.inf)

    def leading(self) -> tuple[Exps, int]:
        if not self._terms:
            raise PreconditionError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def homogeneous_part(self, k: int) -> Poly:
        return Poly._raw(self.ring, {e: c for e, c in self._terms.items() if sum(e) == k})

    def variables(self) -> set[str]:
        return {self.ring.names[i] for e in self._terms for i, a in enumerate(e) if a}

    # equality / hashing
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._terms == self.ring.const(other)._terms
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring.compatible(other.ring) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.names, self.ring.p, frozenset(self._terms.items())))
        return self._hash

    # arithmetic
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        ring = self.ring.join(other.ring)
        p = ring.p
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = (out.get(e, 0) + c) % p
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(ring, out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        p = self.ring.p
        return Poly._raw(self.ring, {e: p - c for e, c in self._terms.items()})

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) - self

    def scale(self, c: int) -> Poly:
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Poly._raw(self.ring, {e: (a * c) % p for e, a in self._terms.items()})

    def __mul__(self, other) -> Poly:
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        ring = self.ring.join(other.ring)
        a, b = self._terms, other._terms
        if not a or not b:
            return Poly._raw(ring, {})
        if len(a) < len(b):
            a, b = b, a
        out = _mul_packed(a, b, ring.nvars, ring.p)
        if out is None:
            out = _mul_tuples(a, b, ring.p)
        if out:
            cap = degree_cap(ring.p)
            if max(map(sum, a)) + max(map(sum, b)) > cap:
                _enforce_cap(ring, out)
        return Poly._raw(ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            if self.is_monomial():
                return self.monomial_inverse() ** (-k)
            raise PreconditionError("negative power of a non-monomial")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def monomial_inverse(self) -> Poly:
        if not self.is_monomial():
            raise NotDivisible("only monomials with unit coefficient are invertible")
        (e, c), = self._terms.items()
        return Poly(self.ring, {tuple(-a for a in e): pow(c, -1, self.ring.p)})

    def shift(self, exps: Sequence[int]) -> Poly:
        """Multiply by the (possibly Laurent) monomial with the given exponents."""
        exps = tuple(exps)
        out = {tuple(map(int.__add__, e, exps)): c for e, c in self._terms.items()}
        _check_exps(self.ring, out)
        return Poly._raw(self.ring, out)

    # calculus
    def partial(self, var: str) -> Poly:
        i = self.ring.index(var)
        return self.partial_index(i)

    def partial_index(self, i: int) -> Poly:
        p = self.ring.p
        out = {}
        for e, c in self._terms.items():
            a = e[i]
            c2 = (c * a) % p
            if c2:
                out[e[:i] + (a - 1,) + e[i + 1:]] = c2
        return Poly._raw(self.ring, out)

    def evaluate(self, point: Mapping[str, int] | Sequence[int]) -> int:
        if isinstance(point, Mapping):
            vals = [point[n] for n in self.ring.names]
        else:
            vals = list(point)
        p = self.ring.p
        total = 0
        for e, c in self._terms.items():
            t = c
            for v, a in zip(vals, e):
                if a:
                    if a < 0:
                        if v % p == 0:
                            raise PreconditionError("pole at evaluation point")
                        t = t * pow(v, a, p)
                    else:
                        t = t * pow(v, a, p)
            total += t
        return total % p

    def substitute(self, mapping: Mapping[str, Poly | int], target: Ring | None = None) -> Poly:
        """Ring homomorphism sending each mapped variable to its image.

        Unmapped variables are sent to the same-named variable of the target
        ring (which defaults to this ring).  Negative exponents require a
        monomial image.
        """
        if target is None:
            imgs = [mapping.get(n) for n in self.ring.names]
            target = next((g.ring for g in imgs if isinstance(g, Poly)), self.ring)
        images: list[Poly] = []
        for n in self.ring.names:
            g = mapping.get(n)
            if g is None:
                g = target.var(n)
            elif isinstance(g, int):
                g = target.const(g)
            images.append(g)
        ring = target
        for g in images:
            ring = ring.join(g.ring)
        cache: list[dict[int, Poly]] = [{} for _ in images]

        def power(i: int, a: int) -> Poly:
            got = cache[i].get(a)
            if got is None:
                if a < 0:
                    got = images[i].monomial_inverse() ** (-a)
                else:
                    got = images[i] ** a
                cache[i][a] = got
            return got

        acc: dict[Exps, int] = {}
        p = ring.p
        for e, c in self._terms.items():
            term = ring.const(c)
            for i, a in enumerate(e):
                if a:
                    term = term * power(i, a)
            for te, tc in term._terms.items():
                acc[te] = (acc.get(te, 0) + tc) % p
        out = {e: c for e, c in acc.items() if c}
        _check_exps(ring, out)
        return Poly._raw(ring, out)

    def translate(self, point: Mapping[str, int] | Sequence[int]) -> Poly:
        """f(x + point): moves ``point`` to the origin."""
        if not isinstance(point, Mapping):
            point = dict(zip(self.ring.names, point))
        if not any(v % self.ring.p for v in point.values()):
            return self
        return self.substitute({n: self.ring.var(n) + v for n, v in point.items() if v % self.ring.p})

    def valuation(self, var: str) -> int | float:
        i = self.ring.index(var)
        return min((e[i] for e in self._terms), default=math.inf)

    def in_ring(self, ring: Ring) -> Poly:
        """Reinterpret in a compatible ring (e.g. change the Laurent designation)."""
        if not ring.compatible(self.ring):
            raise RingMismatchError("incompatible rings")
        return Poly(ring, self._terms)

    # printing
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, p={self.ring.p})"

    def to_text(self, with_modulus: bool = True) -> str:
        s = format_poly(self)
        return f"{s} (mod {self.ring.p})" if with_modulus else s


_BITS = 16
_FIELD = (1 << _BITS) - 1
_LIMIT = 1 << (_BITS - 2)


def _mul_tuples(a: Mapping[Exps, int], b: Mapping[Exps, int], p: int) -> dict[Exps, int]:
    out: dict[Exps, int] = {}
    get = out.get
    for eb, cb in b.items():
        for ea, ca in a.items():
            e = tuple(map(int.__add__, ea, eb))
            out[e] = get(e, 0) + ca * cb
    return {e: c % p for e, c in out.items() if c % p}


def _mul_packed(a: Mapping[Exps, int], b: Mapping[Exps, int], n: int, p: int) -> dict[Exps, int] | None:
    """Multiply with exponent vectors packed into single integers.

    Returns None when some exponent is negative or too large to pack, in
    which case the caller falls back to tuple arithmetic.
    """
    shifts = [_BITS * i for i in range(n)]

    def pack(terms):
        out = []
        for e, c in terms.items():
            k = 0
            for x, s in zip(e, shifts):
                if x < 0 or x >= _LIMIT:
                    return None
                k |= x << s
            out.append((k, c))
        return out

    pa = pack(a)
    if pa is None:
        return None
    pb = pack(b)
    if pb is None:
        return None
    acc: dict[int, int] = {}
    get = acc.get
    for kb, cb in pb:
        for ka, ca in pa:
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb
    res = {}
    for k, c in acc.items():
        c %= p
        if c:
            res[tuple((k >> s) & _FIELD for s in shifts)] = c
    return res


def format_monomial(names: Sequence[str], e: Exps) -> str:
    parts = []
    for n, a in zip(names, e):
        if a == 1:
            parts.append(n)
        elif a:
            parts.append(f"{n}^{a}")
    return "*".join(parts)


def format_poly(f: Poly) -> str:
    if f.is_zero():
        return "0"
    chunks = []
    for e, c in f.items():
        mono = format_monomial(f.ring.names, e)
        if not mono:
            chunks.append(str(c))
        elif c == 1:
            chunks.append(mono)
        else:
            chunks.append(f"{c}*{mono}")
    return " + ".join(chunks)


# free functions mirroring the operation list

def add(f: Poly, g: Poly) -> Poly:
    return f + g


def mul(f: Poly, g: Poly) -> Poly:
    return f * g


def power(f: Poly, e: int) -> Poly:
    if e < 0:
        raise PreconditionError("exponent must be non-negative")
    return f ** e


def partial(f: Poly, var: str) -> Poly:
    return f.partial(var)


def substitute(f: Poly, mapping: Mapping[str, Poly | int], target: Ring | None = None) -> Poly:
    return f.substitute(mapping, target)


def var_valuation(f: Poly, var: str) -> int | float:
    return f.valuation(var)


def exact_divide(f: Poly, g: Poly) -> Poly:
    """Return q with f = q*g, or raise NotDivisible.

    Plain multivariate division by a single divisor in grlex order.  Since a
    single polynomial is a Groebner basis of the principal ideal it
    generates, the remainder is zero exactly when g divides f.  In a ring
    with a Laurent variable that variable is a unit, so its content is
    stripped from both sides before dividing.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    ring = f.ring.join(g.ring)
    if f.is_zero():
        return ring.zero()
    n = ring.nvars
    # The Laurent variable is a unit: strip its full content from both sides.
    li = ring.laurent_index
    fshift = [0] * n
    gshift = [0] * n
    if li is not None:
        fshift[li] = min(e[li] for e in f.terms)
        gshift[li] = min(e[li] for e in g.terms)
    F = {tuple(a - s for a, s in zip(e, fshift)): c for e, c in f.terms.items()}
    G = {tuple(a - s for a, s in zip(e, gshift)): c for e, c in g.terms.items()}
    p = ring.p
    lg = max(G, key=grlex_key)
    inv = pow(G[lg], -1, p)
    glist = list(G.items())
    q: dict[Exps, int] = {}
    rem = dict(F)
    while rem:
        lf = max(rem, key=grlex_key)
        diff = tuple(a - b for a, b in zip(lf, lg))
        if any(d < 0 for d in diff):
            raise NotDivisible(f"{f} is not divisible by {g}")
        c = (rem[lf] * inv) % p
        q[diff] = c
        for ge, gc in glist:
            e = tuple(a + b for a, b in zip(ge, diff))
            v = (rem.get(e, 0) - c * gc) % p
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
    # undo the shifts: q_true = q * x^(fshift - gshift)
    off = [a - b for a, b in zip(fshift, gshift)]
    out = {tuple(a + o for a, o in zip(e, off)): c for e, c in q.items()}
    return Poly._raw(ring, out)


def divides(g: Poly, f: Poly) -> bool:
    try:
        exact_divide(f, g)
    except NotDivisible:
        return False
    return True


def monomial_ideal_member(f: Poly, gens: Iterable[Poly]) -> bool:
    """True iff every term of f is divisible by some monomial generator."""
    gexps = []
    for g in gens:
        if not g.is_monomial():
            raise PreconditionError(f"generator {g} is not a monomial")
        gexps.append(next(iter(g.terms)))
    return all(any(all(a >= b for a, b in zip(e, ge)) for ge in gexps) for e in f.terms)


def monomial_content(coeffs: Sequence[Poly]) -> Poly:
    """Largest monomial dividing every term of every nonzero entry.

    Zero entries are ignored.  With Laurent inputs the content may have a
    negative exponent in the Laurent variable.
    """
    nonzero = [c for c in coeffs if not c.is_zero()]
    if not nonzero:
        raise PreconditionError("monomial content of all-zero input")
    ring = nonzero[0].ring
    for c in nonzero[1:]:
        ring = ring.join(c.ring)
    n = ring.nvars
    lows = [min(e[i] for c in nonzero for e in c.terms) for i in range(n)]
    return ring.monomial(lows)


def poly_from_terms(ring: Ring, terms: Iterable[tuple[Sequence[int], int]]) -> Poly:
    acc: dict[Exps, int] = {}
    for e, c in terms:
        e = tuple(e)
        acc[e] = acc.get(e, 0) + c
    return Poly(ring, acc)
