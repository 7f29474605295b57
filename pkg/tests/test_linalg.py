from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import given, settings, strategies as st

from cdga import linalg

PROPERTY = settings(max_examples=1000, deadline=None)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    """Column lists of small rational matrices, biased towards sparsity."""
    nrows = draw(st.integers(0, max_rows))
    ncols = draw(st.integers(0, max_cols))
    entry = st.one_of(st.just(0), st.just(0), st.integers(-3, 3), st.fractions(-2, 2, max_denominator=3))
    cols = []
    for _ in range(ncols):
        cols.append({i: Fraction(v) for i in range(nrows) if (v := draw(entry))})
    return nrows, cols


def to_sympy(nrows, cols):
    m = sympy.zeros(nrows, len(cols))
    for j, col in enumerate(cols):
        for i, v in col.items():
            m[i, j] = sympy.Rational(v.numerator, v.denominator)
    return m


def sympy_rank(nrows, cols):
    return to_sympy(nrows, cols).rank() if nrows and cols else 0


def test_echelon_is_reduced():
    ech = linalg.Echelon([{0: 2, 1: 4}, {0: 1, 2: 1}, {1: 1}])
    assert ech.pivots == [0, 1, 2]
    assert ech.rows == [{0: 1}, {1: 1}, {2: 1}]


def test_kernel_of_simple_map():
    # columns: e0 -> e0, e1 -> e0, e2 -> 0
    ker = linalg.kernel([{0: 1}, {0: 1}, {}])
    assert linalg.same_span(ker, [{0: 1, 1: -1}, {2: 1}])


def test_solve_and_inconsistent():
    cols = [{0: 1, 1: 1}, {1: 2}]
    x = linalg.solve(cols, {0: 3, 1: 5})
    assert linalg.apply(cols, x) == {0: 3, 1: 5}
    assert linalg.solve([{0: 1}], {1: 1}) is None


def test_coordinates():
    ech = linalg.Echelon([{0: 1, 2: 1}, {1: 1, 2: -1}])
    assert ech.coordinates({0: 2, 1: 3, 2: -1}) == [2, 3]
    assert ech.coordinates({2: 1}) is None


def test_dense_sparse_roundtrip():
    assert linalg.dense(linalg.sparse([0, 1, Fraction(1, 2)]), 3) == [0, 1, Fraction(1, 2)]


@PROPERTY
@given(matrices())
def test_rank_matches_sympy(m):
    nrows, cols = m
    assert linalg.rank(linalg.transpose(cols)) == sympy_rank(nrows, cols)
    # row rank equals column rank
    assert linalg.rank(cols) == linalg.rank(linalg.transpose(cols))


@PROPERTY
@given(matrices())
def test_rank_nullity(m):
    nrows, cols = m
    ker = linalg.kernel(cols)
    r = linalg.rank(linalg.transpose(cols))
    assert len(ker) + r == len(cols)
    for v in ker:
        assert linalg.apply(cols, v) == {}
    assert linalg.rank(ker) == len(ker)


@PROPERTY
@given(matrices(), st.data())
def test_solve_hits_image(m, data):
    nrows, cols = m
    x = {j: Fraction(data.draw(st.integers(-2, 2))) for j in range(len(cols))}
    b = linalg.apply(cols, x)
    y = linalg.solve(cols, b)
    assert y is not None
    assert linalg.apply(cols, y) == b


@PROPERTY
@given(matrices(), st.permutations(range(6)))
def test_echelon_depends_only_on_span(m, perm):
    nrows, cols = m
    shuffled = [cols[i] for i in perm if i < len(cols)]
    scaled = [{k: v * 3 for k, v in c.items()} for c in shuffled]
    assert linalg.same_span(cols, scaled)
