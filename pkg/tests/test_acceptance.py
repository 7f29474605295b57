"""Acceptance criteria 1-11, one test group per criterion.

The terminal summary (see conftest.py) prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import random
import time

import pytest

import test_algebra
import test_cli
import test_cohomology
import test_dgafile
import test_linalg
from algebra_strategies import random_even_class, random_pure_base
from cdga import linalg
from cdga.algebra import DGAlgebra, validate_morphism
from cdga.cohomology import (
    CohomologyClass,
    betti,
    class_coordinates,
    cohomology_basis,
    combine,
    induced_map,
    is_exact,
)
from cdga.fibration import (
    Fibration,
    FiniteUpTo,
    NonzeroNearCutoff,
    attach_odd_sphere,
    build_tower,
    gysin_verify,
)
from cdga.minimal import (
    BouquetSpec,
    build_phi_k,
    free_lie_dimensions,
    generator_represented,
    truncation_gap_check,
    minimal_model,
    psi_to_sphere,
    truncate,
)
from cdga.verify import SearchSpace, search_killing_fibrations, sphere_engine
from dense_oracle import from_spec
from golden_cases import CASES


def hopf_spec():
    gens = [("a", 2), ("b", 3), ("x", 1)]
    return gens, {"b": {(2, 0, 0): 1}, "x": {(1, 0, 0): 1}}


def cp2_s5_spec():
    gens = [("a", 2), ("b", 5), ("x", 1)]
    return gens, {"b": {(3, 0, 0): 1}, "x": {(1, 0, 0): 1}}


def timed(fn, *args):
    start = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - start


# -- 1, 2: Betti numbers of the two attachments -----------------------------------------


@pytest.mark.criterion(1)
def test_criterion_01_hopf_betti():
    A = DGAlgebra([("a", 2), ("b", 3), ("x", 1)], {"b": "a^2", "x": "a"})
    b, elapsed = timed(betti, A, 12)
    assert b == [1 if n in (0, 3) else 0 for n in range(13)]
    assert elapsed < 1.0
    assert b == from_spec(*hopf_spec()).betti(12)


@pytest.mark.criterion(2)
def test_criterion_02_cp2_betti():
    A = DGAlgebra([("a", 2), ("b", 5), ("x", 1)], {"b": "a^3", "x": "a"})
    b, elapsed = timed(betti, A, 12)
    assert b == [1 if n in (0, 5) else 0 for n in range(13)]
    assert elapsed < 1.0
    assert b == from_spec(*cp2_s5_spec()).betti(12)


# -- 3, 4: kernel law and Gysin exactness ----------------------------------------------


def attachments():
    s2 = DGAlgebra([("a", 2), ("b", 3)], {"b": "a^2"})
    cp2 = DGAlgebra([("a", 2), ("b", 5)], {"b": "a^3"})
    out = [
        ("hopf", attach_odd_sphere(s2, CohomologyClass.of(s2, "a"))[0]),
        ("cp2", attach_odd_sphere(cp2, CohomologyClass.of(cp2, "a"))[0]),
    ]
    rng = random.Random(1729)
    while len(out) < 12:
        base = random_pure_base(rng)
        z = random_even_class(rng, base)
        if z is not None:
            out.append((f"random{len(out) - 2}", attach_odd_sphere(base, CohomologyClass.of(base, z))[0]))
    return out


ATTACHMENTS = attachments()
CUTOFF = 12


@pytest.mark.criterion(3)
@pytest.mark.parametrize("name, fib", ATTACHMENTS, ids=[n for n, _ in ATTACHMENTS])
def test_criterion_03_kernel_law(name, fib):
    report = gysin_verify(fib, CUTOFF)
    # one kernel-law node per i <= cutoff - 2k (negative i included as zero spaces)
    assert [n.degree for n in report.kernel_law] == list(range(1, CUTOFF + 1))
    bad = [n for n in report.kernel_law if not n.ok]
    assert not bad, bad


@pytest.mark.criterion(4)
@pytest.mark.parametrize("name, fib", ATTACHMENTS, ids=[n for n, _ in ATTACHMENTS])
def test_criterion_04_gysin_exactness(name, fib):
    report = gysin_verify(fib, CUTOFF)
    bad = [n for n in report.nodes if not n.ok]
    assert not bad, bad
    assert report.ok


# -- 5: the tower ------------------------------------------------------------------------


@pytest.mark.criterion(5)
def test_criterion_05_tower_s2():
    s2 = DGAlgebra([("a", 2), ("b", 3)], {"b": "a^2"})
    tower = build_tower(s2, 12)
    assert tower.converged
    b = betti(tower.last.total, 12)
    assert not any(b[n] for n in range(2, 13, 2))
    assert all(tower.zero_map_property())


@pytest.mark.criterion(5)
def test_criterion_05_tower_cp2():
    cp2 = DGAlgebra([("a", 2), ("b", 5)], {"b": "a^3"})
    tower = build_tower(cp2, 9, max_stages=6)
    assert tower.converged
    b = betti(tower.last.total, 9)
    assert not any(b[n] for n in range(2, 10, 2))
    assert all(tower.zero_map_property())


@pytest.mark.criterion(5)
def test_criterion_05_zero_map_without_convergence():
    cp2 = DGAlgebra([("a", 2), ("b", 5)], {"b": "a^3"})
    tower = build_tower(cp2, 12, max_stages=1)
    assert not tower.converged
    assert tower.zero_map_property() == [True]


# -- 6: bouquet model ------------------------------------------------------------------


@pytest.mark.criterion(6)
def test_criterion_06_bouquet_model():
    start = time.perf_counter()
    mm = minimal_model(BouquetSpec.from_degrees([3, 3]), 9)
    counts = mm.generator_counts(9)
    assert counts == {3: 2, 5: 1, 7: 2, 9: 3}
    witt = free_lie_dimensions([3, 3], 4)
    assert witt.by_length == [2, 1, 2, 3]
    assert counts == witt.by_model_degree
    assert not [g for g in mm.model.generators if g.degree % 2 == 0]
    assert mm.is_quasi_isomorphism()
    for n in range(1, 10):
        assert generator_represented(mm.model, n)
    for k in (1, 3, 5, 7, 9):
        report = truncation_gap_check(truncate(mm.model, k))
        assert report.h_k1 == 0 and report.h_k2 == 0, report
    assert time.perf_counter() - start < 30


# -- 7: phi_k and psi ------------------------------------------------------------------


B_EXAMPLE = DGAlgebra([("x", 3), ("y", 3), ("z", 5), ("a", 2), ("u", 1)], {"z": "x*y", "u": "a"})
HOPF = DGAlgebra([("a", 2), ("b", 3), ("x", 1)], {"b": "a^2", "x": "a"})


@pytest.mark.criterion(7)
@pytest.mark.parametrize("B, N, k", [(B_EXAMPLE, 3, 1), (B_EXAMPLE, 3, 3), (B_EXAMPLE, 3, 5), (HOPF, 4, 7)])
def test_criterion_07_phi_k(B, N, k):
    phi = build_phi_k(B, N, k)
    assert validate_morphism(phi.morphism, k + 1).ok
    assert all(phi.isomorphism_degrees().values())


@pytest.mark.criterion(7)
@pytest.mark.parametrize("B, rep", [(DGAlgebra([("x", 3), ("y", 3)]), "x + 2*y"), (B_EXAMPLE, "y"), (HOPF, "b - a*x")])
def test_criterion_07_psi(B, rep):
    alpha = CohomologyClass.of(B, rep)
    mm = minimal_model(B, 7)
    n = alpha.degree
    reps = list(cohomology_basis(mm.model, n))
    # pull alpha back to the minimal model through the quasi-isomorphism
    coords = [class_coordinates(B, mm.target_map(r), n) for r in reps]
    target = class_coordinates(B, alpha.representative, n)
    sol = linalg.solve([linalg.sparse(c) for c in coords], linalg.sparse(target))
    a_tilde = combine(reps, sol, mm.model)
    proj = psi_to_sphere(mm.model, CohomologyClass.of(mm.model, a_tilde, n))
    eta = proj.psi.target
    assert validate_morphism(proj.psi, n + 1).ok
    assert class_coordinates(eta, proj.psi(a_tilde), n) == (1,)
    image_rank = sum(1 for col in induced_map(proj.psi, mm.model, eta, n) if any(col))
    assert image_rank >= 1


# -- 8: the engine -----------------------------------------------------------------------


@pytest.mark.criterion(8)
def test_criterion_08_sphere_engine():
    base = DGAlgebra([("x", 3)])
    fib = Fibration.over(base, [("v", 2, 0)], {"v": "x"})
    report = sphere_engine(fib, 6)
    assert report.cutoff == 12
    assert report.v == fib.total.gen("v")
    assert [p.n for p in report.powers] == [1, 2, 3, 4, 5, 6]
    assert not any(p.exact for p in report.powers)
    assert report.first_exact_power is None
    assert all(report.fiber_betti[n] for n in range(0, 13, 2))


# -- 9: exhaustive search ----------------------------------------------------------------


@pytest.mark.criterion(9)
def test_criterion_09_search_sweep():
    base = DGAlgebra([("x", 3)])
    space = SearchSpace(base, (2, 3, 5), 2, (-2, 2), 12)
    res = search_killing_fibrations(space, CohomologyClass.of(base, "x"))
    assert not res.exceeded
    assert res.hits
    for hit in res.hits:
        assert is_exact(hit.fibration.total, "x") is not None
        assert isinstance(hit.verdict, NonzeroNearCutoff)
    assert not [h for h in res.hits if isinstance(h.verdict, FiniteUpTo)]


# -- 10: minimal model of the tower output ----------------------------------------------


@pytest.mark.criterion(10)
def test_criterion_10_tower_minimal_model():
    s2 = DGAlgebra([("a", 2), ("b", 3)], {"b": "a^2"})
    tower = build_tower(s2, 12)
    mm = minimal_model(tower.last.total, 9)
    assert all(g.degree % 2 for g in mm.model.generators)
    assert mm.is_quasi_isomorphism()
    bouquet = minimal_model(BouquetSpec.from_degrees([3]), 9)
    assert mm.generator_counts(9) == bouquet.generator_counts(9) == {3: 1}


# -- 11: property suites -------------------------------------------------------------------


PROPERTY_SUITES = {
    "koszul sign law": test_algebra.test_koszul_sign_law,
    "koszul sign against word sort": test_algebra.test_monomial_sign_matches_word_sort,
    "associativity": test_algebra.test_associativity,
    "leibniz rule": test_algebra.test_leibniz_rule,
    "d squared vanishes": test_algebra.test_d_squared_vanishes,
    "d raises degree by one": test_algebra.test_differential_raises_degree,
    "rank-nullity (matrices)": test_linalg.test_rank_nullity,
    "rank-nullity (differentials)": test_cohomology.test_rank_nullity_per_degree,
    "betti ordering invariance": test_cohomology.test_betti_invariant_under_generator_order,
    "parse/print round-trip": test_dgafile.test_print_parse_roundtrip,
    "fibration round-trip": test_dgafile.test_fibration_roundtrip,
    "json schema": test_cli.test_json_schema_and_values,
}


@pytest.mark.criterion(11)
@pytest.mark.parametrize("name", sorted(PROPERTY_SUITES))
def test_criterion_11_property_suite(name):
    suite = PROPERTY_SUITES[name]
    assert suite.hypothesis.inner_test is not None
    settings = getattr(suite, "_hypothesis_internal_use_settings")
    assert settings.max_examples >= 1000
    suite()


@pytest.mark.criterion(11)
@pytest.mark.parametrize("name", sorted(CASES))
def test_criterion_11_golden_files(name, monkeypatch):
    monkeypatch.chdir(test_cli.DATA)
    test_cli.test_golden_json(name, None)
