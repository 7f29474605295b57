"""Hypothesis strategies for small free graded-commutative algebras.

Random differentials are built so that d∘d = 0 holds by construction:
each generator is either closed, or its differential is a combination of
monomials in earlier closed generators (products of cocycles are cocycles).
"""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from cdga.algebra import DGAlgebra, Element
from cdga.cohomology import cohomology_basis


def exponent_vectors(degrees, allowed, deg, max_terms=None):
    """Exponent vectors of total degree ``deg`` supported on ``allowed``."""
    out = []

    def rec(i, left, acc):
        if i == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        if i not in allowed:
            rec(i + 1, left, acc + [0])
            return
        top = 1 if degrees[i] % 2 else left // degrees[i]
        for a in range(min(top, left // degrees[i]) + 1):
            rec(i + 1, left - a * degrees[i], acc + [a])

    rec(0, deg, [])
    return out


def to_monomial(e):
    return tuple((i, a) for i, a in enumerate(e) if a)


@st.composite
def algebra_specs(draw, max_gens=5, max_degree=4, closed_only=False):
    """(gens, diffs) with diffs {name: {exponent vector: int}}."""
    n = draw(st.integers(1, max_gens))
    degrees = [draw(st.integers(1, max_degree)) for _ in range(n)]
    gens = [(f"g{i}", d) for i, d in enumerate(degrees)]
    closed: set[int] = set()
    diffs: dict = {}
    for i, d in enumerate(degrees):
        if closed_only or not closed or draw(st.booleans()):
            closed.add(i)
            continue
        monos = exponent_vectors(degrees, closed, d + 1)
        if not monos:
            closed.add(i)
            continue
        terms = {}
        for m in monos:
            c = draw(st.integers(-2, 2))
            if c:
                terms[m] = c
        if terms:
            diffs[gens[i][0]] = terms
        else:
            closed.add(i)
    return gens, diffs


def build(gens, diffs) -> DGAlgebra:
    return DGAlgebra(gens, {k: {to_monomial(e): c for e, c in v.items()} for k, v in diffs.items()})


algebras = algebra_specs().map(lambda s: build(*s))


@st.composite
def elements(draw, dga: DGAlgebra, degree: int | None = None, max_terms=4):
    """A random element; homogeneous when ``degree`` is given."""
    if degree is None:
        degree = draw(st.integers(0, 6))
    basis = dga.basis(degree)
    if not basis:
        return dga.zero
    picks = draw(st.lists(st.sampled_from(basis), max_size=max_terms))
    terms = {}
    for m in picks:
        terms[m] = Fraction(draw(st.integers(-3, 3)), draw(st.integers(1, 2)))
    return Element(dga, terms)


@st.composite
def algebra_with_elements(draw, count=2, closed_only=False):
    dga = build(*draw(algebra_specs(closed_only=closed_only)))
    es = [draw(elements(dga)) for _ in range(count)]
    return (dga, *es)


def random_pure_base(rng, max_even=2, max_odd=2) -> DGAlgebra:
    """Even generators closed, odd generators with d a polynomial in the evens."""
    evens = [(f"a{i}", rng.choice([2, 2, 4])) for i in range(rng.randint(1, max_even))]
    odds = [(f"y{i}", rng.choice([3, 5, 7])) for i in range(rng.randint(0, max_odd))]
    gens = evens + odds
    degrees = [d for _, d in gens]
    even_ids = set(range(len(evens)))
    diffs = {}
    for j, (name, deg) in enumerate(odds):
        monos = exponent_vectors(degrees, even_ids, deg + 1)
        terms = {m: rng.randint(-2, 2) for m in monos}
        terms = {m: c for m, c in terms.items() if c}
        if terms:
            diffs[name] = terms
    return build(gens, diffs)


def random_even_class(rng, dga: DGAlgebra, degrees=(2, 4)):
    """A random cocycle representing a nonzero class of even degree, or None."""
    for deg in rng.sample(list(degrees), len(degrees)):
        reps = cohomology_basis(dga, deg).representatives
        if reps:
            z = dga.zero
            while not z:
                z = sum((r * rng.randint(-2, 2) for r in reps), dga.zero)
            return z
    return None
