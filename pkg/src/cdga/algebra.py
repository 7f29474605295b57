"""Free graded-commutative algebras over Q, their differentials and morphisms.

Monomials are tuples ``((gen_id, exponent), ...)`` with strictly increasing
ids.  Odd generators appear with exponent 1 only.  Reordering two odd
factors costs a sign, everything else commutes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

Monomial = tuple  # tuple[tuple[int, int], ...]
UNIT: Monomial = ()

Scalar = Union[int, Fraction]


class Generator(NamedTuple):
    id: int
    name: str
    degree: int


def monomial_degree(m: Monomial, degrees: tuple[int, ...]) -> int:
    return sum(degrees[g] * e for g, e in m)


def monomial_length(m: Monomial) -> int:
    return sum(e for _, e in m)


def normalize(factors: Iterable[tuple[int, int]], degrees: tuple[int, ...]) -> tuple[int, Monomial | None]:
    """Bring an unordered product of generator powers into canonical form.

    Returns ``(sign, monomial)``; ``(0, None)`` when an odd generator would be
    squared.
    """
    factors = list(factors)
    for g, e in factors:
        if not 0 <= g < len(degrees):
            raise KeyError(f"unknown generator id {g}")
        if e < 1:
            raise ValueError(f"exponent must be positive, got {e}")
    odd = [g for g, e in factors if degrees[g] % 2 for _ in range(e)]
    inversions = sum(1 for i in range(len(odd)) for j in range(i + 1, len(odd)) if odd[i] > odd[j])
    merged: dict[int, int] = {}
    for g, e in factors:
        merged[g] = merged.get(g, 0) + e
    for g, e in merged.items():
        if degrees[g] % 2 and e > 1:
            return 0, None
    return (-1 if inversions % 2 else 1), tuple(sorted(merged.items()))


def multiply_monomials(m1: Monomial, m2: Monomial, degrees: tuple[int, ...]) -> tuple[int, Monomial | None]:
    """Product of two canonical monomials, with its Koszul sign."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    sign = 1
    odd1 = [g for g, _ in m1 if degrees[g] & 1]
    if odd1:
        for h, _ in m2:
            if degrees[h] & 1:
                for g in odd1:
                    if g == h:
                        return 0, None
                    if g > h:
                        sign = -sign
    out: list[tuple[int, int]] = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        g1, e1 = m1[i]
        g2, e2 = m2[j]
        if g1 < g2:
            out.append(m1[i])
            i += 1
        elif g2 < g1:
            out.append(m2[j])
            j += 1
        else:
            out.append((g1, e1 + e2))
            i += 1
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return sign, tuple(out)


class Element:
    """A finite Q-linear combination of canonical monomials."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra: DGAlgebra, terms: Mapping[Monomial, Scalar] | None = None):
        self.algebra = algebra
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms = clean
        self._hash = None

    # -- inspection --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {monomial_degree(m, self.algebra.degrees) for m in self.terms}

    @property
    def degree(self) -> int | None:
        """Degree of a homogeneous element; ``None`` for zero."""
        ds = self.degrees()
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError(f"element {self} is not homogeneous")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def support(self) -> set[int]:
        """Generator ids occurring in some monomial."""
        return {g for m in self.terms for g, _ in m}

    def coefficient(self, m: Monomial) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def linear_part(self) -> Element:
        return Element(self.algebra, {m: c for m, c in self.terms.items() if monomial_length(m) == 1})

    def is_decomposable(self) -> bool:
        return all(monomial_length(m) >= 2 for m in self.terms)

    # -- arithmetic --------------------------------------------------------
    def _coerce(self, other) -> Element:
        if isinstance(other, Element):
            return other
        if isinstance(other, (int, Fraction)):
            return Element(self.algebra, {UNIT: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        alg = common_algebra(self.algebra, other.algebra)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return Element(alg, terms)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Element(self.algebra, {m: c * other for m, c in self.terms.items()})
        if not isinstance(other, Element):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.algebra.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, Element):
            return NotImplemented
        if self.algebra is not other.algebra and not compatible(self.algebra, other.algebra):
            return False
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"Element({format_element(self)!r})"


def compatible(a: DGAlgebra, b: DGAlgebra) -> bool:
    """True when one generator list is a prefix of the other."""
    if a is b:
        return True
    ga, gb = a.generators, b.generators
    if len(ga) > len(gb):
        ga, gb = gb, ga
    return gb[: len(ga)] == ga


def common_algebra(a: DGAlgebra, b: DGAlgebra) -> DGAlgebra:
    if a is b:
        return a
    if not compatible(a, b):
        raise ValueError("elements belong to different algebras")
    return a if len(a.generators) >= len(b.generators) else b


def multiply(e1: Element, e2: Element) -> Element:
    alg = common_algebra(e1.algebra, e2.algebra)
    degrees = alg.degrees
    out: dict[Monomial, Fraction] = {}
    for m1, c1 in e1.terms.items():
        for m2, c2 in e2.terms.items():
            s, m = multiply_monomials(m1, m2, degrees)
            if s:
                out[m] = out.get(m, 0) + s * c1 * c2
    return Element(alg, out)


def _format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial, names: Iterable[str]) -> str:
    names = list(names)
    if not m:
        return "1"
    return "*".join(names[g] if e == 1 else f"{names[g]}^{e}" for g, e in m)


def format_element(e: Element) -> str:
    if not e.terms:
        return "0"
    names = [g.name for g in e.algebra.generators]
    parts = []
    for m in e.algebra.sort_monomials(e.terms):
        c = e.terms[m]
        mono = format_monomial(m, names)
        mag = abs(c)
        if not m:
            body = _format_coefficient(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coefficient(mag)}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


class DGAlgebra:
    """A free graded-commutative algebra with a differential on generators.

    ``generators`` is a sequence of ``(name, degree)`` pairs (or
    :class:`Generator`).  ``differential`` maps generator names or ids to an
    :class:`Element`, an expression string, or a raw ``{monomial: coeff}``
    mapping.  Missing generators get ``d = 0``.
    """

    def __init__(self, generators: Iterable = (), differential: Mapping | None = None):
        gens: list[Generator] = []
        seen: set[str] = set()
        for i, g in enumerate(generators):
            name, degree = (g.name, g.degree) if isinstance(g, Generator) else g
            degree = int(degree)
            if degree < 1:
                raise ValueError(f"generator {name!r} must have positive degree, got {degree}")
            if name in seen:
                raise ValueError(f"duplicate generator name {name!r}")
            seen.add(name)
            gens.append(Generator(i, name, degree))
        self.generators: tuple[Generator, ...] = tuple(gens)
        self.degrees: tuple[int, ...] = tuple(g.degree for g in gens)
        self._index = {g.name: g.id for g in gens}
        self._cache: dict = {}
        self._dmono: dict[Monomial, dict] = {}
        self._d: dict[int, Element] = {}
        for key, value in (differential or {}).items():
            gid = self.index(key)
            elt = self.element(value)
            if elt:
                self._d[gid] = elt

    # -- construction helpers ---------------------------------------------
    def index(self, key: int | str) -> int:
        if isinstance(key, str):
            try:
                return self._index[key]
            except KeyError:
                raise KeyError(f"unknown generator {key!r}") from None
        if not 0 <= key < len(self.generators):
            raise KeyError(f"unknown generator id {key}")
        return key

    def element(self, value) -> Element:
        """Coerce an Element, expression string, scalar or term mapping."""
        if isinstance(value, Element):
            if value.algebra is self:
                return value
            if not compatible(value.algebra, self):
                raise ValueError("element belongs to an incompatible algebra")
            if len(value.algebra.generators) > len(self.generators):
                if any(g >= len(self.generators) for g in value.support()):
                    raise ValueError(f"element {value} uses generators outside this algebra")
            return Element(self, value.terms)
        if isinstance(value, str):
            from .dgafile import parse_expression

            return parse_expression(value, self)
        if isinstance(value, (int, Fraction)):
            return Element(self, {UNIT: value})
        return Element(self, dict(value))

    def extend(self, generators: Iterable, differential: Mapping | None = None) -> DGAlgebra:
        """New algebra with extra generators appended after the existing ones."""
        d = {g.name: self._d[g.id] for g in self.generators if g.id in self._d}
        new = DGAlgebra(list(self.generators) + list(generators), None)
        for key, value in (differential or {}).items():
            if isinstance(key, int):
                key = new.generators[key].name
            d[key] = value
        return DGAlgebra(new.generators, {k: _rehome(v, new) for k, v in d.items()})

    def gen(self, key: int | str) -> Element:
        return Element(self, {((self.index(key), 1),): 1})

    __getitem__ = gen

    def generator(self, key: int | str) -> Generator:
        return self.generators[self.index(key)]

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.generators]

    @property
    def one(self) -> Element:
        return Element(self, {UNIT: 1})

    @property
    def zero(self) -> Element:
        return Element(self, {})

    def monomial(self, m: Monomial) -> Element:
        return Element(self, {m: 1})

    def is_odd(self, gid: int) -> bool:
        return bool(self.degrees[gid] & 1)

    # -- differential ------------------------------------------------------
    def dgen(self, key: int | str) -> Element:
        gid = self.index(key)
        e = self._d.get(gid)
        return Element(self, e.terms) if e is not None else self.zero

    @property
    def differential(self) -> dict[int, Element]:
        return {gid: Element(self, e.terms) for gid, e in self._d.items()}

    def d_monomial(self, m: Monomial) -> dict:
        """Graded Leibniz expansion of d on one canonical monomial."""
        cached = self._dmono.get(m)
        if cached is not None:
            return cached
        degrees = self.degrees
        out: dict[Monomial, Fraction] = {}
        prefix_parity = 0
        for i, (g, e) in enumerate(m):
            dg = self._d.get(g)
            if dg is not None:
                sign = -1 if prefix_parity else 1
                # d(g^e) = e*g^(e-1)*dg; g^(e-1) is even so it moves past dg
                prefix = m[:i]
                suffix = (((g, e - 1),) if e > 1 else ()) + m[i + 1:]
                for mg, cg in dg.terms.items():
                    s1, p = multiply_monomials(prefix, mg, degrees)
                    if not s1:
                        continue
                    s2, full = multiply_monomials(p, suffix, degrees)
                    if not s2:
                        continue
                    out[full] = out.get(full, 0) + sign * s1 * s2 * e * cg
            if degrees[g] & 1:
                prefix_parity ^= 1
        out = {k: v for k, v in out.items() if v}
        self._dmono[m] = out
        return out

    def d(self, e: Element) -> Element:
        """Apply the differential, extended as a derivation."""
        e = self.element(e)
        out: dict[Monomial, Fraction] = {}
        for m, c in e.terms.items():
            for mm, cc in self.d_monomial(m).items():
                out[mm] = out.get(mm, 0) + c * cc
        return Element(self, out)

    # -- bases -------------------------------------------------------------
    def monomial_key(self, m: Monomial) -> tuple:
        """Lexicographic order on exponent vectors (generator creation order)."""
        vec = [0] * len(self.generators)
        for g, e in m:
            vec[g] = e
        return tuple(vec)

    def sort_monomials(self, monomials: Iterable[Monomial]) -> list[Monomial]:
        return sorted(monomials, key=lambda m: (monomial_degree(m, self.degrees), self.monomial_key(m)))

    def basis(self, n: int) -> list[Monomial]:
        """All canonical monomials of degree n, in deterministic order."""
        key = ("basis", n)
        if key not in self._cache:
            self._cache[key] = _enumerate_monomials(self.degrees, n)
        return self._cache[key]

    # -- misc --------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, DGAlgebra):
            return NotImplemented
        return self.generators == other.generators and {
            k: v.terms for k, v in self._d.items()
        } == {k: v.terms for k, v in other._d.items()}

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        gens = ", ".join(f"{g.name}{_sub(g.degree)}" for g in self.generators)
        ds = "; ".join(f"d{self.generators[k].name} = {v}" for k, v in sorted(self._d.items()))
        return f"Λ({gens}{'; ' + ds if ds else ''})"


def _sub(n: int) -> str:
    return str(n).translate(str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉"))


def _rehome(value, algebra: DGAlgebra):
    if isinstance(value, Element):
        return Element(algebra, value.terms)
    return value


def _enumerate_monomials(degrees: tuple[int, ...], n: int) -> list[Monomial]:
    n_gen = len(degrees)
    out: list[tuple[int, ...]] = []

    # exponent vectors, filled from the last generator back so that the
    # output comes out in ascending lexicographic order of the vector
    vec = [0] * n_gen

    def rec(i: int, remaining: int):
        if i == n_gen:
            if remaining == 0:
                out.append(tuple(vec))
            return
        deg = degrees[i]
        top = 1 if deg & 1 else remaining // deg
        top = min(top, remaining // deg)
        for e in range(top + 1):
            vec[i] = e
            rec(i + 1, remaining - e * deg)
        vec[i] = 0

    if n < 0:
        return []
    rec(0, n)
    return [tuple((g, e) for g, e in enumerate(v) if e) for v in out]


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    @property
    def first(self) -> str | None:
        return self.violations[0] if self.violations else None

    def __bool__(self):
        return self.ok


def validate(dga: DGAlgebra, cutoff: int) -> ValidationReport:
    """Check degree homogeneity of d and d∘d = 0 on generators up to cutoff."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    violations = []
    for g in dga.generators:
        if g.degree > cutoff:
            continue
        dg = dga.dgen(g.id)
        if not dg:
            continue
        ds = dg.degrees()
        if ds != {g.degree + 1}:
            violations.append(
                f"d{g.name} = {dg} has degree {sorted(ds)}, expected {g.degree + 1}"
            )
            continue
        ddg = dga.d(dg)
        if ddg:
            violations.append(f"d(d{g.name}) = {ddg} != 0")
    return ValidationReport(not violations, violations)


class Morphism:
    """A degree-preserving algebra map determined by generator images."""

    def __init__(self, source: DGAlgebra, target: DGAlgebra, images: Mapping | None = None):
        self.source = source
        self.target = target
        self.images: dict[int, Element] = {}
        for key, value in (images or {}).items():
            gid = source.index(key)
            elt = target.element(value)
            if elt:
                self.images[gid] = elt
        self._cache: dict[Monomial, Element] = {}

    @classmethod
    def identity(cls, dga: DGAlgebra) -> Morphism:
        return cls(dga, dga, {g.id: dga.gen(g.id) for g in dga.generators})

    @classmethod
    def inclusion(cls, source: DGAlgebra, target: DGAlgebra) -> Morphism:
        """Inclusion of a prefix sub-algebra."""
        if not compatible(source, target) or len(source.generators) > len(target.generators):
            raise ValueError("source is not a prefix sub-algebra of target")
        return cls(source, target, {g.id: target.gen(g.id) for g in source.generators})

    def image(self, key: int | str) -> Element:
        gid = self.source.index(key)
        e = self.images.get(gid)
        return e if e is not None else self.target.zero

    def _apply_monomial(self, m: Monomial) -> Element:
        r = self._cache.get(m)
        if r is None:
            r = self.target.one
            for g, e in m:
                img = self.images.get(g)
                if img is None:
                    r = self.target.zero
                    break
                r = r * img**e
                if not r:
                    break
            r = Element(self.target, r.terms)
            self._cache[m] = r
        return r

    def __call__(self, e: Element) -> Element:
        e = self.source.element(e)
        out: dict[Monomial, Fraction] = {}
        for m, c in e.terms.items():
            for mm, cc in self._apply_monomial(m).terms.items():
                out[mm] = out.get(mm, 0) + c * cc
        return Element(self.target, out)

    apply = __call__

    def __repr__(self):
        body = ", ".join(f"{g.name} ↦ {self.image(g.id)}" for g in self.source.generators)
        return f"Morphism({body})"


def apply_morphism(f: Morphism, e: Element) -> Element:
    return f(e)


def validate_morphism(f: Morphism, cutoff: int) -> ValidationReport:
    """Degree preservation and f∘d = d∘f on source generators up to cutoff."""
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    violations = []
    for g in f.source.generators:
        if g.degree > cutoff:
            continue
        img = f.image(g.id)
        if img and img.degrees() != {g.degree}:
            violations.append(f"{g.name} ↦ {img} is not of degree {g.degree}")
            continue
        lhs = f(f.source.dgen(g.id))
        rhs = f.target.d(img)
        if lhs != rhs:
            violations.append(f"f(d{g.name}) = {lhs} but d f({g.name}) = {rhs}")
    return ValidationReport(not violations, violations)


TRIVIAL = DGAlgebra()


def augmentation(dga: DGAlgebra) -> Morphism:
    """The map to Q killing every positive-degree generator."""
    return Morphism(dga, DGAlgebra(), {})


def extend_derivation(dga: DGAlgebra, e: Element) -> Element:
    return dga.d(e)


def transport(e: Element, target: DGAlgebra) -> Element:
    """Re-express e in ``target`` by matching generator names."""
    if compatible(e.algebra, target) and len(e.algebra.generators) <= len(target.generators):
        return Element(target, e.terms)
    names = e.algebra.names
    out: dict[Monomial, Fraction] = {}
    for m, c in e.terms.items():
        factors = [(target.index(names[g]), k) for g, k in m]
        sign, mono = normalize(factors, target.degrees)
        if sign:
            out[mono] = out.get(mono, 0) + sign * c
    return Element(target, out)
