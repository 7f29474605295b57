"""Algebraic fibrations B -> B ⊗ ΛV, odd spherical attachments, the Gysin
sequence and the even-cohomology killing tower."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import linalg
from .algebra import DGAlgebra, Element, Generator, Morphism, compatible, validate, validate_morphism
from .cohomology import (
    CohomologyClass,
    ValidationError,
    betti,
    class_coordinates,
    cohomology_basis,
    induced_map,
    is_exact,
)


@dataclass(frozen=True)
class Fibration:
    """Base algebra plus filtered fiber generators forming ``total``.

    ``total`` lists the base generators first, then the fiber generators;
    ``stages[i]`` is the filtration stage of the i-th fiber generator.
    """

    base: DGAlgebra
    total: DGAlgebra
    stages: tuple

    def __post_init__(self):
        nb = len(self.base.generators)
        if not compatible(self.base, self.total) or len(self.total.generators) < nb:
            raise ValueError("base generators must be a prefix of the total generators")
        if len(self.stages) != len(self.total.generators) - nb:
            raise ValueError("one stage per fiber generator required")
        for g in self.base.generators:
            if self.base.dgen(g.id) != self.total.dgen(g.id):
                raise ValueError(f"differential of base generator {g.name} differs in total")
        object.__setattr__(self, "stages", tuple(int(s) for s in self.stages))

    @classmethod
    def over(cls, base: DGAlgebra, fiber: Iterable[tuple[str, int, int]], differential: Mapping | None = None) -> Fibration:
        fiber = list(fiber)
        total = base.extend([(n, deg) for n, deg, _ in fiber], differential)
        return cls(base, total, tuple(s for _, _, s in fiber))

    @classmethod
    def trivial(cls, base: DGAlgebra) -> Fibration:
        return cls(base, base, ())

    @property
    def fiber_ids(self) -> range:
        return range(len(self.base.generators), len(self.total.generators))

    @property
    def fiber_generators(self) -> list[tuple[Generator, int]]:
        return [(self.total.generators[i], s) for i, s in zip(self.fiber_ids, self.stages)]

    def stage_of(self, gid: int) -> int:
        return self.stages[gid - len(self.base.generators)]

    def inclusion(self) -> Morphism:
        return Morphism.inclusion(self.base, self.total)


@dataclass(frozen=True)
class EulerData:
    attached_generator: Generator
    euler_class: CohomologyClass


def _fresh_name(dga: DGAlgebra, stem: str) -> str:
    names = set(dga.names)
    if stem not in names:
        return stem
    i = 1
    while f"{stem}{i}" in names:
        i += 1
    return f"{stem}{i}"


def attach_odd_sphere(base: DGAlgebra, beta: CohomologyClass, name: str = "x") -> tuple[Fibration, EulerData]:
    """Adjoin x of degree 2k-1 with dx = the representative of beta."""
    n = beta.degree
    if n <= 0 or n % 2:
        raise ValueError(f"Euler class must have positive even degree, got {n}")
    if base.d(beta.representative):
        raise ValueError("Euler class representative is not a cocycle")
    name = _fresh_name(base, name)
    fib = Fibration.over(base, [(name, n - 1, 0)], {name: beta.representative})
    x = fib.total.generators[-1]
    return fib, EulerData(x, CohomologyClass(base, beta.representative, n))


# -- Gysin sequence ----------------------------------------------------------


@dataclass
class GysinNode:
    name: str
    degree: int
    ok: bool
    detail: str = ""


@dataclass
class GysinReport:
    ok: bool
    nodes: list = field(default_factory=list)
    kernel_law: list = field(default_factory=list)

    @property
    def first_failure(self) -> GysinNode | None:
        return next((n for n in self.nodes + self.kernel_law if not n.ok), None)

    def __bool__(self):
        return self.ok


def _image_equals_kernel(into: list, out: list, dim_mid: int) -> tuple[bool, str]:
    """im(into) == ker(out) inside a space of dimension dim_mid.

    ``into`` and ``out`` are lists of coordinate columns.
    """
    im_cols = [linalg.sparse(c) for c in into]
    r_in = linalg.rank(im_cols)
    out_cols = [linalg.sparse(c) for c in out]
    r_out = linalg.rank(out_cols) if out_cols else 0
    ker_dim = dim_mid - r_out
    composite_zero = not out_cols or all(not linalg.apply(out_cols, c) for c in im_cols)
    ok = composite_zero and r_in == ker_dim
    return ok, f"rank(in)={r_in}, dim ker(out)={ker_dim}, composite zero={composite_zero}"


def _cup_matrix(base: DGAlgebra, e: Element, i: int, k2: int) -> list:
    if i < 0:
        return []
    reps = cohomology_basis(base, i)
    return [class_coordinates(base, r * e, i + k2) for r in reps]


def _connecting_matrix(fib: Fibration, n: int) -> list:
    """∂: H^n(total) -> H^{n-2k+2}(base), [p + q·x] ↦ [q]."""
    total, base = fib.total, fib.base
    xid = len(base.generators)
    xdeg = total.degrees[xid]
    cols = []
    for z in cohomology_basis(total, n):
        q = {}
        for m, c in z.terms.items():
            if any(g == xid for g, _ in m):
                # canonical monomials list x last, so m = q_m * x
                q[tuple(f for f in m if f[0] != xid)] = c
        if n - xdeg < 0:
            cols.append(())
            continue
        qe = Element(base, q)
        cols.append(class_coordinates(base, qe, n - xdeg))
    return cols


def gysin_verify(fib: Fibration, cutoff: int) -> GysinReport:
    """Exactness of H^i(B) -e-> H^{i+2k}(B) -> H^{i+2k}(E) -∂-> H^{i+1}(B).

    Also checks that ker φ* on H^{i+2k}(B) equals H^i(B)·β as subspaces.
    """
    if len(fib.stages) != 1:
        raise ValueError("Gysin verification needs a single attached generator")
    base, total = fib.base, fib.total
    xid = len(base.generators)
    e = base.element(total.dgen(xid))
    if e and not e.support() <= set(range(xid)):
        raise ValueError("dx must lie in the base")
    k2 = total.degrees[xid] + 1
    if k2 % 2:
        raise ValueError("attached generator must have odd degree")
    incl = fib.inclusion()
    report = GysinReport(True)
    # i < 0 covers the nodes below degree 2k, where H^i(B) = 0
    for i in range(1 - k2, cutoff - k2 + 1):
        n = i + k2
        cup = _cup_matrix(base, e, i, k2)
        phi = induced_map(incl, base, total, n)
        dim_bn = cohomology_basis(base, n).dimension
        dim_tn = cohomology_basis(total, n).dimension
        dim_b1 = cohomology_basis(base, i + 1).dimension if i + 1 >= 0 else 0
        conn = _connecting_matrix(fib, n)
        cup_next = _cup_matrix(base, e, i + 1, k2)

        ok, detail = _image_equals_kernel(cup, phi, dim_bn)
        report.nodes.append(GysinNode("H^{i+2k}(B)", n, ok, detail))
        ok2, detail2 = _image_equals_kernel(phi, conn, dim_tn)
        report.nodes.append(GysinNode("H^{i+2k}(E)", n, ok2, detail2))
        ok3, detail3 = _image_equals_kernel(conn, cup_next, dim_b1)
        report.nodes.append(GysinNode("H^{i+1}(B)", i + 1, ok3, detail3))

        kernel = linalg.kernel([linalg.sparse(c) for c in phi])
        law = linalg.same_span(kernel, [linalg.sparse(c) for c in cup])
        report.kernel_law.append(
            GysinNode("ker φ* = H^i·β", n, law, f"dim ker φ*={len(kernel)}")
        )
        if not (ok and ok2 and ok3 and law):
            report.ok = False
    return report


# -- the killing tower ---------------------------------------------------------


@dataclass(frozen=True)
class KilledClass:
    degree: int
    representative: Element
    generator: str


def kill_even_stage(current: DGAlgebra, cutoff: int, stage: int = 1) -> Fibration:
    """Attach one generator of degree 2k-1 per basis class of H^{2k}, 0 < 2k <= cutoff.

    New generators are named ``s{stage}_{2k}_{i}``.
    """
    report = validate(current, cutoff + 1)
    if not report.ok:
        raise ValidationError(f"invalid differential: {report.first}")
    fiber = []
    d = {}
    for k2 in range(2, cutoff + 1, 2):
        for i, rep in enumerate(cohomology_basis(current, k2)):
            name = f"s{stage}_{k2}_{i}"
            fiber.append((name, k2 - 1, 0))
            d[name] = rep
    return Fibration.over(current, fiber, d)


@dataclass
class Tower:
    """Stages A_0 ⊂ A_1 ⊂ ... as fibrations over A_0.

    Generators added at step m carry filtration stage m-1 (they kill classes
    of A_{m-1}).
    """

    stages: list
    cutoff: int
    converged: bool
    killed: list = field(default_factory=list)
    residual_even_betti: dict = field(default_factory=dict)

    @property
    def base(self) -> DGAlgebra:
        return self.stages[0].base

    @property
    def last(self) -> Fibration:
        return self.stages[-1]

    @property
    def stage_count(self) -> int:
        return len(self.stages) - 1

    def zero_map_property(self) -> list[bool]:
        """For each step m: every killed representative of A_{m-1} is exact in A_m."""
        out = []
        for m, killed in enumerate(self.killed, 1):
            total = self.stages[m].total
            out.append(all(is_exact(total, kc.representative, kc.degree) is not None for kc in killed))
        return out


def _even_betti(dga: DGAlgebra, cutoff: int) -> dict[int, int]:
    b = betti(dga, cutoff)
    return {n: b[n] for n in range(2, cutoff + 1, 2) if b[n]}


def build_tower(a0: DGAlgebra, cutoff: int, max_stages: int = 8) -> Tower:
    """Iterate :func:`kill_even_stage` until H^{2k} = 0 for 0 < 2k <= cutoff."""
    stages = [Fibration.trivial(a0)]
    killed: list = []
    current = stages[0]
    while True:
        residual = _even_betti(current.total, cutoff)
        if not residual:
            return Tower(stages, cutoff, True, killed, {})
        if len(stages) - 1 >= max_stages:
            return Tower(stages, cutoff, False, killed, residual)
        m = len(stages)
        step = kill_even_stage(current.total, cutoff, m)
        nprev = len(current.total.generators)
        records = [
            KilledClass(g.degree + 1, step.total.dgen(g.id), g.name)
            for g in step.total.generators[nprev:]
        ]
        killed.append(records)
        current = Fibration(a0, step.total, current.stages + (m - 1,) * len(records))
        stages.append(current)


def _support_closure(fib: Fibration, seeds: Iterable[int]) -> set[int]:
    fiber = set(fib.fiber_ids)
    todo = [g for g in seeds if g in fiber]
    closed: set[int] = set()
    while todo:
        g = todo.pop()
        if g in closed:
            continue
        closed.add(g)
        todo.extend(h for h in fib.total.dgen(g).support() if h in fiber and h not in closed)
    return closed


def sub_fibration(fib: Fibration, keep: Iterable[int]) -> Fibration:
    """Restrict to the fiber generators in ``keep`` (must be d-closed)."""
    keep = set(keep)
    nb = len(fib.base.generators)
    chosen = [g for g in fib.fiber_ids if g in keep]
    old_to_new = {i: i for i in range(nb)}
    for j, g in enumerate(chosen):
        old_to_new[g] = nb + j
    shell = DGAlgebra(list(fib.base.generators) + [
        (fib.total.generators[g].name, fib.total.generators[g].degree) for g in chosen
    ])
    d = {}
    for g in chosen:
        dg = fib.total.dgen(g)
        if not dg.support() <= set(old_to_new):
            raise ValueError(f"{fib.total.generators[g].name} depends on dropped generators")
        d[fib.total.generators[g].name] = _reindex(dg, old_to_new, shell)
    for g in fib.base.generators:
        if fib.base.dgen(g.id):
            d[g.name] = fib.base.dgen(g.id).terms
    total = DGAlgebra(shell.generators, d)
    return Fibration(fib.base, total, tuple(fib.stage_of(g) for g in chosen))


def _reindex(e: Element, mapping: dict[int, int], target: DGAlgebra) -> Element:
    # order-preserving id maps keep monomials canonical
    return Element(target, {tuple((mapping[g], k) for g, k in m): c for m, c in e.terms.items()})


def finite_subtower(tower: Tower, alpha: CohomologyClass) -> Fibration:
    """A finitely iterated odd spherical fibration over A_0 in which alpha dies."""
    a0 = tower.base
    z = a0.element(alpha.representative)
    n = alpha.degree
    if is_exact(a0, z, n) is not None:
        return Fibration.trivial(a0)
    for m in range(1, len(tower.stages)):
        total = tower.stages[m].total
        if is_exact(total, z, n) is None:
            continue
        prev = tower.stages[m - 1].total
        coords = class_coordinates(prev, z, n)
        reps = cohomology_basis(prev, n)
        killers = {kc.representative: kc.generator for kc in tower.killed[m - 1] if kc.degree == n}
        seeds = []
        rest = prev.element(z)
        for c, rep in zip(coords, reps):
            if c:
                seeds.append(total.index(killers[rep]))
                rest = rest - rep * c
        w = is_exact(prev, rest, n)
        assert w is not None
        seeds.extend(w.support())
        last = tower.stages[m]
        keep = _support_closure(last, seeds)
        sub = sub_fibration(last, keep)
        if is_exact(sub.total, z, n) is None:
            raise AssertionError("support closure failed to kill the class")
        return sub
    raise ValueError(f"{alpha} does not die within the recorded stages")


# -- fibers and push-forwards ---------------------------------------------------


def fiber_projection(fib: Fibration) -> Morphism:
    """total -> ΛV sending base generators to 0 (the augmentation on B)."""
    nb = len(fib.base.generators)
    gens = [(fib.total.generators[g].name, fib.total.generators[g].degree) for g in fib.fiber_ids]
    shell = DGAlgebra(gens)
    images = {g: shell.gen(g - nb) for g in fib.fiber_ids}
    proj = Morphism(fib.total, shell, images)
    d = {shell.generators[g - nb].name: proj(fib.total.dgen(g)) for g in fib.fiber_ids}
    fiber = DGAlgebra(gens, d)
    return Morphism(fib.total, fiber, {g: fiber.gen(g - nb) for g in fib.fiber_ids})


def algebraic_fiber(fib: Fibration) -> DGAlgebra:
    """ΛV with d̄ obtained by setting every base generator to zero."""
    return fiber_projection(fib).target


@dataclass(frozen=True)
class FiniteUpTo:
    top_degree: int
    cutoff: int
    betti: tuple

    verdict = "FiniteUpTo"

    def __str__(self):
        return f"FiniteUpTo({self.top_degree})"


@dataclass(frozen=True)
class NonzeroNearCutoff:
    nonzero_degrees: tuple
    cutoff: int
    betti: tuple

    verdict = "NonzeroNearCutoff"

    def __str__(self):
        return f"NonzeroNearCutoff({list(self.nonzero_degrees)})"


def fiber_dimension_probe(fib: Fibration | DGAlgebra, cutoff: int, margin: int = 2):
    """Evidence verdict on finite cohomological dimension of the fiber.

    FiniteUpTo(d) when the top nonzero Betti degree d is at most
    cutoff - margin, otherwise NonzeroNearCutoff.
    """
    fiber = algebraic_fiber(fib) if isinstance(fib, Fibration) else fib
    b = tuple(betti(fiber, cutoff))
    nonzero = tuple(n for n, x in enumerate(b) if x)
    top = nonzero[-1]
    if top <= cutoff - margin:
        return FiniteUpTo(top, cutoff, b)
    return NonzeroNearCutoff(nonzero, cutoff, b)


def pushforward(fib: Fibration, psi: Morphism, cutoff: int | None = None) -> Fibration:
    """Same fiber generators over psi.target with differentials (psi ⊗ 1)(dv)."""
    if psi.source != fib.base:
        raise ValueError("psi must start at the fibration base")
    check_to = cutoff if cutoff is not None else max([g.degree for g in fib.base.generators] + [1])
    report = validate_morphism(psi, check_to)
    if not report.ok:
        raise ValueError(f"psi is not a DGA morphism: {report.first}")
    return psi_tensor_id(fib, psi)[1]


def psi_tensor_id(fib: Fibration, psi: Morphism) -> tuple[Morphism, Fibration]:
    """The map ψ ⊗ 1: B ⊗ ΛV -> C ⊗ ΛV together with the push-forward fibration."""
    c = psi.target
    nb, nc = len(fib.base.generators), len(c.generators)
    fgens = [(fib.total.generators[g].name, fib.total.generators[g].degree) for g in fib.fiber_ids]
    clash = set(c.names) & {n for n, _ in fgens}
    if clash:
        raise ValueError(f"fiber generator names clash with target: {sorted(clash)}")
    shell = DGAlgebra(list(c.generators) + fgens)
    images = {g: shell.element(psi.image(g)) for g in range(nb)}
    images.update({g: shell.gen(nc + g - nb) for g in fib.fiber_ids})
    pre = Morphism(fib.total, shell, images)
    d = {name: pre(fib.total.dgen(g)) for (name, _), g in zip(fgens, fib.fiber_ids)}
    for g in c.generators:
        if c.dgen(g.id):
            d[g.name] = c.dgen(g.id).terms
    total = DGAlgebra(shell.generators, d)
    tensor = Morphism(fib.total, total, {g: total.element(v) for g, v in images.items()})
    return tensor, Fibration(c, total, fib.stages)


@dataclass
class FibrationReport:
    filtration_ok: bool
    minimal: bool
    violations: list = field(default_factory=list)
    non_minimal: list = field(default_factory=list)

    def __bool__(self):
        return self.filtration_ok


def validate_fibration(fib: Fibration, cutoff: int | None = None) -> FibrationReport:
    """Stage filtration of each fiber differential; minimality reported separately."""
    nb = len(fib.base.generators)
    fiber = set(fib.fiber_ids)
    violations, non_minimal = [], []
    for g in fib.fiber_ids:
        gen = fib.total.generators[g]
        s = fib.stage_of(g)
        dg = fib.total.dgen(g)
        for h in dg.support():
            if h in fiber and fib.stage_of(h) >= s:
                violations.append(
                    f"d{gen.name} (stage {s}) uses {fib.total.generators[h].name} (stage {fib.stage_of(h)})"
                )
                break
        for m in dg.terms:
            # B⁺⊗ΛV + B⊗Λ^{≥2}V: forbidden are terms that are a single fiber generator
            if len(m) == 1 and m[0][1] == 1 and m[0][0] >= nb:
                non_minimal.append(f"d{gen.name} has linear fiber term {fib.total.generators[m[0][0]].name}")
                break
    top = cutoff if cutoff is not None else max([g.degree for g in fib.total.generators] + [1])
    dreport = validate(fib.total, top)
    violations.extend(dreport.violations)
    return FibrationReport(not violations, not non_minimal, violations, non_minimal)
