"""Sparse Gaussian elimination over F_p.

Vectors are dicts ``key -> residue``.  :class:`SparseEchelon` keeps a fully
reduced row-echelon basis and can optionally track, for every basis row,
which combination of inserted vectors produced it.  That tracking is what
turns row reduction into a nullspace computation: an inserted vector that
reduces to zero yields a kernel relation among the inputs.
"""
from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence

Vec = dict


def axpy(y: Vec, a: int, x: Vec, p: int) -> None:
    """In place y += a*x (mod p), dropping zeros."""
    if not a:
        return
    for k, v in x.items():
        s = (y.get(k, 0) + a * v) % p
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class SparseEchelon:
    def __init__(self, p: int, key: Callable[[Hashable], object] | None = None, track: bool = False):
        self.p = p
        self.key = key
        self.track = track
        self.rows: dict[Hashable, Vec] = {}  # pivot -> row (pivot entry is 1)
        self.combos: dict[Hashable, Vec] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def _pivot_of(self, v: Vec) -> Hashable:
        return max(v, key=self.key) if self.key else max(v)

    def reduce(self, v: Vec, combo: Vec | None = None) -> tuple[Vec, Vec | None]:
        v = dict(v)
        combo = dict(combo) if combo is not None else ({} if self.track else None)
        p = self.p
        for k in [k for k in v if k in self.rows]:
            c = v.get(k)
            if c:
                axpy(v, p - c, self.rows[k], p)
                if combo is not None:
                    axpy(combo, p - c, self.combos[k], p)
        return v, combo

    def insert(self, v: Vec, tag: Hashable | None = None) -> Vec | None:
        """Add v to the span.  Returns the kernel relation if v was dependent."""
        start = {tag: 1} if self.track else None
        r, combo = self.reduce(v, start)
        if not r:
            return combo if self.track else {}
        p = self.p
        piv = self._pivot_of(r)
        inv = pow(r[piv], -1, p)
        r = {k: (c * inv) % p for k, c in r.items()}
        if combo is not None:
            combo = {k: (c * inv) % p for k, c in combo.items()}
        for q, row in self.rows.items():
            c = row.get(piv)
            if c:
                axpy(row, p - c, r, p)
                if combo is not None:
                    axpy(self.combos[q], p - c, combo, p)
        self.rows[piv] = r
        if combo is not None:
            self.combos[piv] = combo
        return None

    def contains(self, v: Vec) -> bool:
        r, _ = self.reduce(v)
        return not r

    def express(self, v: Vec) -> Vec | None:
        """Coefficients over the inserted tags giving v, or None if v is not in the span."""
        if not self.track:
            raise ValueError("express requires tracking")
        r, combo = self.reduce(v, {})
        if r:
            return None
        return {k: (-c) % self.p for k, c in combo.items() if c % self.p}

    def basis(self) -> list[Vec]:
        return [dict(r) for r in self.rows.values()]


def rref(vectors: Iterable[Vec], p: int, key: Callable | None = None) -> list[Vec]:
    """Reduced echelon basis of the span, sorted by pivot (ascending under ``key``)."""
    ech = SparseEchelon(p, key)
    for v in vectors:
        if v:
            ech.insert(v)
    order = sorted(ech.rows, key=key) if key else sorted(ech.rows)
    return [ech.rows[k] for k in order]


def nullspace(columns: Sequence[Vec], p: int) -> list[Vec]:
    """Kernel of the map sending basis vector j to ``columns[j]``.

    Returned relations are dicts ``j -> coefficient``.
    """
    ech = SparseEchelon(p, track=True)
    rel = []
    for j, col in enumerate(columns):
        r = ech.insert(col, j)
        if r is not None:
            rel.append(r)
    return rel


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    n, m, k = len(a), len(b[0]) if b else 0, len(b)
    return [[sum(a[i][t] * b[t][j] for t in range(k)) % p for j in range(m)] for i in range(n)]


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int], p: int) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) % p for row in a]


def is_zero_matrix(a: Sequence[Sequence[int]]) -> bool:
    return all(not x for row in a for x in row)


def mat_pow(a: Sequence[Sequence[int]], k: int, p: int) -> list[list[int]]:
    n = len(a)
    result = [[int(i == j) for j in range(n)] for i in range(n)]
    base = [list(r) for r in a]
    while k:
        if k & 1:
            result = mat_mul(result, base, p)
        k >>= 1
        if k:
            base = mat_mul(base, base, p)
    return result


def is_nilpotent(a: Sequence[Sequence[int]], p: int) -> bool:
    return is_zero_matrix(mat_pow(a, len(a), p)) if a else True


def mat_inverse(a: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Inverse mod p by Gauss-Jordan; raises ValueError if singular."""
    n = len(a)
    m = [[x % p for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            raise ValueError("matrix is singular mod p")
        m[col], m[piv] = m[piv], m[col]
        inv = pow(m[col][col], -1, p)
        m[col] = [(x * inv) % p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                c = m[r][col]
                m[r] = [(x - c * y) % p for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def dense_nullspace(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[list[int]]:
    """Basis of {v : rows . v = 0} as dense vectors."""
    cols = [{i: rows[i][j] % p for i in range(len(rows)) if rows[i][j] % p} for j in range(ncols)]
    out = []
    for rel in nullspace(cols, p):
        v = [0] * ncols
        for j, c in rel.items():
            v[j] = c
        out.append(v)
    return out
