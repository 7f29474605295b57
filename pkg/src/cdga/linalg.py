"""Exact sparse linear algebra over Q.

Vectors are ``dict[int, Fraction]`` keyed by coordinate index.  Elimination
runs on primitive integer rows (fraction-free, content removed after every
step) and only the final reduced echelon form is converted back to
fractions.  Pivot columns are always the smallest available index, so the
reduced echelon form is canonical for the row space.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

Vector = dict  # dict[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _primitive(row: Mapping[int, Fraction | int]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row (same span)."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = _lcm(den, v.denominator)
    ints = {k: int(v * den) for k, v in row.items() if v}
    g = 0
    for v in ints.values():
        g = gcd(g, v)
    if g > 1:
        ints = {k: v // g for k, v in ints.items()}
    return ints


def _eliminate(row: dict[int, int], pivot: dict[int, int], col: int) -> dict[int, int]:
    a = pivot[col]
    b = row[col]
    g = gcd(a, b)
    ma, mb = a // g, b // g
    out: dict[int, int] = {k: v * ma for k, v in row.items()}
    for k, v in pivot.items():
        nv = out.get(k, 0) - mb * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    c = 0
    for v in out.values():
        c = gcd(c, v)
    if c > 1:
        out = {k: v // c for k, v in out.items()}
    return out


class Echelon:
    """Reduced row echelon form of a set of rows.

    ``rows[i]`` has leading entry 1 in column ``pivots[i]`` and zeros in all
    other pivot columns; pivots are increasing.
    """

    def __init__(self, rows: Iterable[Mapping[int, Fraction | int]] = ()):
        work = [r for r in (_primitive(r) for r in rows) if r]
        pivot_rows: list[tuple[int, dict[int, int]]] = []
        while work:
            col = min(min(r) for r in work)
            cands = [i for i, r in enumerate(work) if col in r]
            # partial pivoting: smallest pivot magnitude, then sparsest row
            best = min(cands, key=lambda i: (abs(work[i][col]), len(work[i])))
            prow = work[best]
            rest = []
            for i, r in enumerate(work):
                if i == best:
                    continue
                if col in r:
                    r = _eliminate(r, prow, col)
                if r:
                    rest.append(r)
            pivot_rows.append((col, prow))
            work = rest
        # back substitution
        for i in range(len(pivot_rows) - 1, -1, -1):
            col, prow = pivot_rows[i]
            for j in range(i):
                cj, rj = pivot_rows[j]
                if col in rj:
                    pivot_rows[j] = (cj, _eliminate(rj, prow, col))
        self.pivots: list[int] = [c for c, _ in pivot_rows]
        self.rows: list[Vector] = []
        for col, r in pivot_rows:
            lead = r[col]
            self.rows.append({k: Fraction(v, lead) for k, v in sorted(r.items())})
        self._pos = {c: i for i, c in enumerate(self.pivots)}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[int, Fraction | int]) -> Vector:
        """Remainder of vec after clearing all pivot columns."""
        out = {k: Fraction(v) for k, v in vec.items() if v}
        for col, row in zip(self.pivots, self.rows):
            c = out.get(col)
            if c:
                for k, v in row.items():
                    nv = out.get(k, 0) - c * v
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
        return out

    def contains(self, vec: Mapping[int, Fraction | int]) -> bool:
        return not self.reduce(vec)

    def coordinates(self, vec: Mapping[int, Fraction | int]) -> list[Fraction] | None:
        """Coefficients expressing vec in ``rows``, or None if not in the span."""
        if self.reduce(vec):
            return None
        return [Fraction(vec.get(c, 0)) for c in self.pivots]


def rank(rows: Iterable[Mapping[int, Fraction | int]]) -> int:
    return Echelon(rows).rank


def transpose(columns: Sequence[Mapping[int, Fraction | int]]) -> list[Vector]:
    rows: dict[int, Vector] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = v
    return [rows[i] for i in sorted(rows)]


def kernel(columns: Sequence[Mapping[int, Fraction | int]]) -> list[Vector]:
    """Basis (in reduced echelon form) of the null space of a column matrix.

    ``columns[j]`` is the image of the j-th basis vector.
    """
    n = len(columns)
    ech = Echelon(transpose(columns))
    pivset = set(ech.pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        v = {f: Fraction(1)}
        for col, row in zip(ech.pivots, ech.rows):
            c = row.get(f)
            if c:
                v[col] = -c
        basis.append(v)
    return Echelon(basis).rows


def solve(columns: Sequence[Mapping[int, Fraction | int]], target: Mapping[int, Fraction | int]) -> Vector | None:
    """Some x with sum_j x_j columns[j] = target (free variables zero), or None."""
    n = len(columns)
    aug = list(columns) + [dict(target)]
    ech = Echelon(transpose(aug))
    if n in ech.pivots:
        return None
    x: Vector = {}
    for col, row in zip(ech.pivots, ech.rows):
        c = row.get(n)
        if c:
            x[col] = c
    return x


def apply(columns: Sequence[Mapping[int, Fraction | int]], x: Mapping[int, Fraction | int]) -> Vector:
    out: Vector = {}
    for j, c in x.items():
        if not c:
            continue
        for i, v in columns[j].items():
            nv = out.get(i, 0) + c * v
            if nv:
                out[i] = nv
            else:
                out.pop(i, None)
    return out


def dense(vec: Mapping[int, Fraction], n: int) -> list[Fraction]:
    return [Fraction(vec.get(i, 0)) for i in range(n)]


def sparse(values: Iterable[Fraction | int]) -> Vector:
    return {i: Fraction(v) for i, v in enumerate(values) if v}


def same_span(a: Iterable[Mapping], b: Iterable[Mapping]) -> bool:
    ea, eb = Echelon(a), Echelon(b)
    return ea.pivots == eb.pivots and ea.rows == eb.rows
