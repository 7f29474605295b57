"""Per-degree cohomology of a DGAlgebra by exact linear algebra.

For each degree n the monomial basis of B^n is enumerated, d is written as a
sparse column matrix B^n -> B^{n+1}, and

* coboundaries im(d_{n-1}) are put in reduced echelon form,
* cocycles ker(d_n) are computed exactly,
* representatives are the reduced echelon basis of the cocycles that vanish
  on every coboundary pivot monomial (a canonical complement).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import linalg
from .algebra import DGAlgebra, Element, Monomial, Morphism, validate


class ValidationError(ValueError):
    """The algebra fails d∘d = 0 or degree homogeneity."""


@dataclass(frozen=True)
class DegreeBasis:
    degree: int
    monomials: tuple

    def __len__(self):
        return len(self.monomials)

    def index(self, m: Monomial) -> int:
        return self.monomials.index(m)


@dataclass(frozen=True)
class SparseMatrix:
    nrows: int
    ncols: int
    columns: tuple  # tuple[dict[int, Fraction], ...]

    def dense(self) -> list[list[Fraction]]:
        rows = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                rows[i][j] = v
        return rows

    def rank(self) -> int:
        return linalg.rank(linalg.transpose(self.columns))


@dataclass(frozen=True)
class CohomologyBasis:
    degree: int
    representatives: tuple
    dimension: int

    def __len__(self):
        return self.dimension

    def __iter__(self):
        return iter(self.representatives)

    def __getitem__(self, i):
        return self.representatives[i]


@dataclass(frozen=True)
class CohomologyClass:
    """A cohomology class given by a cocycle representative."""

    dga: DGAlgebra
    representative: Element
    degree: int

    @classmethod
    def of(cls, dga: DGAlgebra, rep, degree: int | None = None) -> CohomologyClass:
        rep = dga.element(rep)
        if degree is None:
            degree = rep.degree
            if degree is None:
                raise ValueError("degree required for the zero class")
        if rep and rep.degrees() != {degree}:
            raise ValueError(f"{rep} is not homogeneous of degree {degree}")
        if dga.d(rep):
            raise ValueError(f"{rep} is not a cocycle")
        return cls(dga, rep, degree)

    def is_zero(self) -> bool:
        return is_exact(self.dga, self.representative, self.degree) is not None

    def __str__(self):
        return f"[{self.representative}]"


def basis_of_degree(dga: DGAlgebra, n: int) -> DegreeBasis:
    return DegreeBasis(n, tuple(dga.basis(n)))


def _index(dga: DGAlgebra, n: int) -> dict:
    key = ("index", n)
    cache = dga._cache
    if key not in cache:
        cache[key] = {m: i for i, m in enumerate(dga.basis(n))}
    return cache[key]


def coordinates(dga: DGAlgebra, e: Element, n: int) -> dict[int, Fraction]:
    """Coordinates of a degree-n element in the monomial basis."""
    idx = _index(dga, n)
    e = dga.element(e)
    out = {}
    for m, c in e.terms.items():
        try:
            out[idx[m]] = c
        except KeyError:
            raise ValueError(f"{e} is not homogeneous of degree {n}") from None
    return out


def from_coordinates(dga: DGAlgebra, vec: dict, n: int) -> Element:
    basis = dga.basis(n)
    return Element(dga, {basis[i]: c for i, c in vec.items()})


def _columns(dga: DGAlgebra, n: int) -> tuple:
    key = ("dcols", n)
    cache = dga._cache
    if key not in cache:
        idx = _index(dga, n + 1)
        cols = []
        for m in dga.basis(n):
            col = {}
            for mm, c in dga.d_monomial(m).items():
                try:
                    col[idx[mm]] = c
                except KeyError:
                    raise ValidationError(f"d({m}) is not homogeneous of degree {n + 1}") from None
            cols.append(col)
        cache[key] = tuple(cols)
    return cache[key]


def differential_matrix(dga: DGAlgebra, n: int) -> SparseMatrix:
    """Matrix of d: B^n -> B^{n+1}; column j holds d of basis monomial j."""
    return SparseMatrix(len(dga.basis(n + 1)), len(dga.basis(n)), _columns(dga, n))


def _check(dga: DGAlgebra, cutoff: int):
    key = ("valid", cutoff)
    if key in dga._cache:
        return
    report = validate(dga, max(cutoff, 1))
    if not report.ok:
        raise ValidationError(f"invalid differential: {report.first}")
    dga._cache[key] = True


class _DegreeData:
    """Coboundary echelon, cocycle basis and canonical complement in degree n."""

    def __init__(self, dga: DGAlgebra, n: int):
        self.n = n
        self.boundaries = linalg.Echelon(_columns(dga, n - 1)) if n > 0 else linalg.Echelon()
        cocycles = linalg.kernel(_columns(dga, n))
        self.cocycles = linalg.Echelon(cocycles)
        complement = [self.boundaries.reduce(z) for z in cocycles]
        self.classes = linalg.Echelon(complement)
        self.reps = tuple(from_coordinates(dga, r, n) for r in self.classes.rows)


def _data(dga: DGAlgebra, n: int) -> _DegreeData:
    key = ("cohom", n)
    cache = dga._cache
    if key not in cache:
        _check(dga, n + 1)
        cache[key] = _DegreeData(dga, n)
    return cache[key]


def betti_number(dga: DGAlgebra, n: int) -> int:
    if n < 0:
        return 0
    return _data(dga, n).classes.rank


def betti(dga: DGAlgebra, max_degree: int, threads: int = 1) -> list[int]:
    """Betti numbers b_0..b_max; built through degree max+1 internally."""
    _check(dga, max_degree + 1)
    degrees = range(max_degree + 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(lambda n: betti_number(dga, n), degrees))
    return [betti_number(dga, n) for n in degrees]


def cohomology_basis(dga: DGAlgebra, n: int) -> CohomologyBasis:
    if n < 0:
        return CohomologyBasis(n, (), 0)
    data = _data(dga, n)
    return CohomologyBasis(n, data.reps, len(data.reps))


def _cocycle_vector(dga: DGAlgebra, z: Element, n: int) -> dict:
    vec = coordinates(dga, z, n)
    if linalg.apply(_columns(dga, n), vec):
        raise ValueError(f"{z} is not a cocycle")
    return vec


def _degree_of(z: Element, n: int | None) -> int | None:
    if n is not None:
        return n
    return z.degree


def is_exact(dga: DGAlgebra, z, n: int | None = None) -> Element | None:
    """A preimage θ with dθ = z, or None when z is not exact."""
    z = dga.element(z)
    n = _degree_of(z, n)
    if n is None or not z:
        return dga.zero
    _check(dga, n + 1)
    vec = _cocycle_vector(dga, z, n)
    if n == 0:
        return None
    x = linalg.solve(_columns(dga, n - 1), vec)
    if x is None:
        return None
    return from_coordinates(dga, x, n - 1)


def class_coordinates(dga: DGAlgebra, z, n: int | None = None) -> tuple[Fraction, ...]:
    """Coordinates of [z] in the basis of :func:`cohomology_basis`."""
    z = dga.element(z)
    n = _degree_of(z, n)
    if n is None:
        raise ValueError("degree required for the zero element")
    data = _data(dga, n)
    vec = _cocycle_vector(dga, z, n)
    w = data.boundaries.reduce(vec)
    coords = data.classes.coordinates(w)
    assert coords is not None, "cocycle outside the computed cocycle space"
    return tuple(coords)


def induced_map(f: Callable[[Element], Element] | Morphism, source: DGAlgebra, target: DGAlgebra, n: int) -> list[tuple[Fraction, ...]]:
    """Columns of f_*: H^n(source) -> H^n(target) in the chosen bases."""
    return [class_coordinates(target, f(r), n) for r in cohomology_basis(source, n)]


def columns_to_sparse(cols: Sequence[Sequence[Fraction]]) -> list[dict]:
    return [linalg.sparse(c) for c in cols]


def is_isomorphism(cols: Sequence[Sequence[Fraction]], target_dim: int) -> bool:
    return len(cols) == target_dim and linalg.rank(columns_to_sparse(cols)) == target_dim


def kernel_of(cols: Sequence[Sequence[Fraction]]) -> list[dict]:
    return linalg.kernel(columns_to_sparse(cols))


def combine(reps: Sequence[Element], coeffs, dga: DGAlgebra) -> Element:
    out = dga.zero
    items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
    for i, c in items:
        if c:
            out = out + reps[i] * c
    return dga.element(out)
