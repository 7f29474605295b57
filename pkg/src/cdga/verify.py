"""Harnesses for injectivity of H*(B) -> H*(E) below degree 2N: the
single-sphere engine, the reduction pipeline through minimal models, and
an exhaustive search over small fibrations."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import linalg
from .algebra import DGAlgebra, Element, Morphism, transport, validate, validate_morphism
from .cohomology import (
    CohomologyClass,
    betti,
    class_coordinates,
    cohomology_basis,
    combine,
    induced_map,
    is_exact,
    is_isomorphism,
)
from .fibration import (
    Fibration,
    FiniteUpTo,
    NonzeroNearCutoff,
    fiber_dimension_probe,
    fiber_projection,
    psi_tensor_id,
    sub_fibration,
    validate_fibration,
)
from .minimal import MinimalModel, PreconditionError, minimal_model, psi_to_sphere


# -- injectivity ------------------------------------------------------------------


@dataclass
class Witness:
    degree: int
    cls: Element  # base cocycle whose class dies
    preimage: Element  # element of the total algebra with d = cls


@dataclass
class InjectivityReport:
    N: int
    cutoff: int
    degrees: list
    kernel_dims: dict
    witnesses: list
    fiber_verdict: object
    precondition_ok: bool
    top_degree_kernel: int  # degree 2N, reported but not asserted

    @property
    def injective(self) -> bool:
        return not any(self.kernel_dims.values())


def _kernel_witnesses(fib: Fibration, n: int) -> list[Witness]:
    base, total = fib.base, fib.total
    reps = cohomology_basis(base, n)
    cols = [linalg.sparse(class_coordinates(total, total.element(r), n)) for r in reps]
    out = []
    for vec in linalg.kernel(cols):
        z = combine(reps.representatives, vec, base)
        pre = is_exact(total, z, n)
        out.append(Witness(n, z, pre))
    return out


def injectivity_check(fib: Fibration, N: int, cutoff: int | None = None, margin: int = 2) -> InjectivityReport:
    """Kernel of ι*: H^i(B) -> H^i(B ⊗ ΛV) for i < 2N, with the fiber probe."""
    cutoff = 2 * N if cutoff is None else cutoff
    b = betti(fib.base, 2 * N)
    pre_ok = not any(b[n] for n in range(2, 2 * N + 1, 2))
    if not pre_ok:
        warnings.warn(f"H^even(base) does not vanish through degree {2 * N}", stacklevel=2)
    degrees = list(range(2 * N))
    kernel_dims, witnesses = {}, []
    for n in degrees:
        w = _kernel_witnesses(fib, n)
        kernel_dims[n] = len(w)
        witnesses.extend(w)
    top = len(_kernel_witnesses(fib, 2 * N))
    verdict = fiber_dimension_probe(fib, cutoff, margin)
    return InjectivityReport(N, cutoff, degrees, kernel_dims, witnesses, verdict, pre_ok, top)


# -- the single odd sphere ---------------------------------------------------------


@dataclass
class PowerRecord:
    n: int
    degree: int
    exact: bool


@dataclass
class SphereEngineReport:
    cutoff: int
    trivial: bool = False
    v: Element | None = None
    injective: bool = True
    powers: list = field(default_factory=list)
    first_exact_power: int | None = None
    trace: list = field(default_factory=list)
    contradiction: bool = False
    fiber_betti: tuple = ()

    @property
    def persists(self) -> bool:
        """v exists and no power of v became exact within the bound."""
        return self.v is not None and self.first_exact_power is None


def _split_off(r: Element, xid: int, x: Element) -> Element | None:
    """u0 with u0·x = r, or None when some term of r lacks x."""
    alg = r.algebra
    terms = {}
    for m, c in r.terms.items():
        if not any(g == xid for g, _ in m):
            return None
        rest = tuple(f for f in m if f[0] != xid)
        terms[rest] = c
    u0 = Element(alg, terms)
    # fix signs term by term so that u0*x reproduces r
    fixed = {}
    for m, c in u0.terms.items():
        prod = Element(alg, {m: 1}) * x
        (pm, pc), = prod.terms.items()
        fixed[m] = r.terms[pm] / pc
    u0 = Element(alg, fixed)
    assert u0 * x == r
    return u0


def sphere_engine(fib: Fibration, N: int, power_bound: int | None = None) -> SphereEngineReport:
    """Run the v^n argument on a fibration over (Λ(x), 0) with |x| odd.

    Solves dv = x; if v exists, looks for the least n with [v̄^n] = 0 in the
    fiber and, if one is found, replays 0 = d²u = n v^{n-1}x - (du0)x to
    certify [v̄^{n-1}] = 0.
    """
    base = fib.base
    if len(base.generators) != 1 or base.degrees[0] % 2 == 0 or base.dgen(0):
        raise ValueError("base must be a single odd generator with zero differential")
    cutoff = 2 * N
    total = fib.total
    x = total.gen(0)
    xdeg = base.degrees[0]
    report = SphereEngineReport(cutoff)
    proj = fiber_projection(fib)
    fiber = proj.target
    report.fiber_betti = tuple(betti(fiber, cutoff))
    if xdeg == 1:
        report.trivial = True
        report.trace.append("degree of x is 1: injectivity is immediate")
        report.injective = is_exact(total, x, 1) is None
        return report
    v = is_exact(total, x, xdeg)
    if v is None:
        report.trace.append("x is not exact in the total algebra: ι* injective")
        return report
    if 0 in v.support():
        raise AssertionError("preimage of x involves x, impossible by degree")
    report.v = v
    report.injective = False
    report.trace.append(f"x = d({v}); the x-multiple w vanishes by degree")
    vbar = proj(v)
    if fiber.d(vbar):
        raise AssertionError("d̄v must vanish")
    vdeg = xdeg - 1
    bound = power_bound if power_bound is not None else cutoff // vdeg
    for n in range(1, bound + 1):
        p = vbar**n
        u = is_exact(fiber, p, n * vdeg)
        report.powers.append(PowerRecord(n, n * vdeg, u is not None))
        if u is None:
            continue
        report.first_exact_power = n
        report.trace.append(f"v^{n} = d̄({u}) in the fiber")
        nb = len(base.generators)
        lift = Morphism(fiber, total, {i: total.gen(nb + i) for i in range(len(fiber.generators))})
        r = v**n - total.d(lift(u))
        u0 = _split_off(r, 0, x)
        if u0 is None:
            raise AssertionError("v^n - du is not a multiple of x")
        ident = (v ** (n - 1)) * x * n - total.d(u0) * x
        report.trace.append(f"v^{n} = ({u0})·x + du; 0 = d²u = {n}·v^{n - 1}·x - d(u0)·x holds: {not ident}")
        cert = proj(u0) * Fraction(1, n)
        ok = fiber.d(cert) == vbar ** (n - 1)
        report.trace.append(f"hence v^{n - 1} = d̄({cert}) in the fiber: {ok}")
        report.contradiction = ok
        report.trace.append("contradiction with minimality of n" if ok else "certificate failed")
        break
    else:
        report.trace.append(f"no exact power v^n for n <= {bound}: fiber cohomology persists")
    return report


# -- lifting a fibration to the minimal model ------------------------------------------


@dataclass
class LiftResult:
    fibration: Fibration  # over the minimal model
    g: Morphism  # lifted total -> original total
    square_commutes: bool
    quasi_isomorphism: dict
    corrections: dict  # fiber generator name -> c with g(x) = x + c


def lift_fibration(fib: Fibration, mm: MinimalModel, N: int) -> LiftResult:
    """Lift B -> B⊗ΛV along f: M -> B to M -> M⊗ΛV with a comparison map g."""
    if mm.target != fib.base:
        raise ValueError("minimal model must be of the fibration base")
    M = mm.model
    f = mm.target_map
    fnames = [fib.total.generators[g].name for g in fib.fiber_ids]
    clash = set(M.names) & set(fnames)
    if clash:
        raise ValueError(f"fiber generator names clash with model generators: {sorted(clash)}")
    order = sorted(fib.fiber_ids, key=lambda g: (fib.stage_of(g), g))
    lifted = M
    g_images: dict[str, Element] = {}  # name -> element of fib.total
    for m in M.generators:
        g_images[m.name] = transport(f.image(m.id), fib.total)
    done: list[int] = []
    corrections = {}
    i = 0
    while i < len(order):
        stage = fib.stage_of(order[i])
        group = [gid for gid in order[i:] if fib.stage_of(gid) == stage]
        i += len(group)
        sub = sub_fibration(fib, done).total if done else fib.base
        gmap = Morphism(lifted, sub, {
            gen.id: transport(g_images[gen.name], sub) for gen in lifted.generators
        })
        new_gens, new_d = [], {}
        for gid in group:
            gen = fib.total.generators[gid]
            a = transport(fib.total.dgen(gid), sub)
            n = gen.degree + 1
            reps = cohomology_basis(lifted, n)
            cols = [linalg.sparse(class_coordinates(sub, gmap(r), n)) for r in reps]
            sol = linalg.solve(cols, linalg.sparse(class_coordinates(sub, a, n)))
            if sol is None:
                raise ValueError(f"cannot lift d{gen.name}: the model is not a quasi-isomorphism in degree {n}")
            a_tilde = combine(reps.representatives, sol, lifted)
            c = is_exact(sub, gmap(a_tilde) - a, n)
            if c is None:
                raise AssertionError("discrepancy is not exact")
            new_gens.append((gen.name, gen.degree))
            new_d[gen.name] = a_tilde
            corrections[gen.name] = transport(c, fib.total)
            g_images[gen.name] = fib.total.gen(gen.name) + transport(c, fib.total)
        lifted = lifted.extend(new_gens, new_d)
        done.extend(group)
    lifted_fib = Fibration(M, lifted, tuple(fib.stage_of(g) for g in done))
    g = Morphism(lifted, fib.total, {gen.id: g_images[gen.name] for gen in lifted.generators})
    incl = fib.inclusion()
    square = all(g(lifted.gen(m.id)) == incl(f.image(m.id)) for m in M.generators)
    qi = {
        n: is_isomorphism(induced_map(g, lifted, fib.total, n), cohomology_basis(fib.total, n).dimension)
        for n in range(N + 1)
    }
    return LiftResult(lifted_fib, g, square, qi, corrections)


# -- reduction to a single sphere -----------------------------------------------------


@dataclass
class PipelineReport:
    outcome: str  # "refuted" (alpha survives) or "reduced" (alpha dies, reduced to Λ(η))
    alpha: Element
    image_coordinates: tuple = ()
    model: MinimalModel | None = None
    lift: LiftResult | None = None
    alpha_tilde: Element | None = None
    psi_pivot: str | None = None
    pushforward: Fibration | None = None
    tau_eta_preimage: Element | None = None
    engine: SphereEngineReport | None = None
    trace: list = field(default_factory=list)


def injectivity_pipeline(B: DGAlgebra, fib: Fibration, alpha: CohomologyClass, N: int) -> PipelineReport:
    """Reduce a claimed ι*α = 0 to the single odd sphere case and run the engine."""
    if fib.base != B:
        raise ValueError("fibration must be over B")
    n = alpha.degree
    if n % 2 == 0 or n >= 2 * N:
        raise ValueError(f"alpha must have odd degree < 2N, got {n}")
    if alpha.is_zero():
        raise ValueError("alpha must be a nonzero class")
    b = betti(B, 2 * N)
    if any(b[k] for k in range(2, 2 * N + 1, 2)):
        raise PreconditionError(f"H^even(B) does not vanish through degree {2 * N}")
    report = PipelineReport("refuted", alpha.representative)
    image = class_coordinates(fib.total, fib.total.element(alpha.representative), n)
    report.image_coordinates = image
    if any(image):
        report.trace.append(f"ι*α has coordinates {list(image)}: α does not die")
        return report
    report.outcome = "reduced"
    report.trace.append("ι*α = 0 in the total algebra")
    top_fiber = max([g.degree for g, _ in fib.fiber_generators] + [0])
    mm = minimal_model(B, 2 * N + top_fiber + 1)
    report.model = mm
    lift = lift_fibration(fib, mm, 2 * N)
    report.lift = lift
    M = mm.model
    reps = cohomology_basis(M, n)
    cols = [linalg.sparse(class_coordinates(B, mm.target_map(r), n)) for r in reps]
    sol = linalg.solve(cols, linalg.sparse(class_coordinates(B, alpha.representative, n)))
    a_tilde = combine(reps.representatives, sol, M)
    report.alpha_tilde = a_tilde
    report.trace.append(f"α̃ = {a_tilde} in the minimal model, f_*α̃ = α")
    theta = is_exact(lift.fibration.total, a_tilde, n)
    if theta is None:
        raise AssertionError("lifted fibration does not kill α̃")
    report.trace.append("φ_*α̃ = 0 in the lifted fibration")
    proj = psi_to_sphere(M, CohomologyClass.of(M, a_tilde, n))
    report.psi_pivot = proj.pivot
    report.trace.append(f"ψ sends {proj.pivot} to η (α̃ represented by {proj.representative})")
    tensor, pushed = psi_tensor_id(lift.fibration, proj.psi)
    report.pushforward = pushed
    eta = pushed.total.gen(0)
    witness = tensor(theta)
    if pushed.total.d(witness) != eta:
        raise AssertionError("(ψ⊗1)θ does not bound η")
    report.tau_eta_preimage = witness
    report.trace.append(f"τ_*(η) = 0: η = d({witness})")
    engine = sphere_engine(pushed, N)
    report.engine = engine
    report.trace.extend(engine.trace)
    return report


# -- exhaustive search ------------------------------------------------------------------


@dataclass
class SearchSpace:
    base: DGAlgebra
    fiber_degrees: tuple
    max_generators: int = 2
    coeff_range: tuple = (-1, 1)
    cutoff: int = 12
    margin: int = 2
    cap: int = 200_000


@dataclass
class Hit:
    index: int
    fibration: Fibration
    verdict: object


@dataclass
class SearchResult:
    size: int
    evaluated: int
    hits: list
    exceeded: bool = False

    @property
    def finite_hits(self) -> list:
        return [h for h in self.hits if isinstance(h.verdict, FiniteUpTo)]


def _candidate_slots(space: SearchSpace):
    """(degree sequence, per-generator monomial supports) for every shape."""
    out = []
    for length in range(0, space.max_generators + 1):
        for seq in product(space.fiber_degrees, repeat=length):
            names = [f"v{i}" for i in range(length)]
            shell = space.base.extend(list(zip(names, seq)))
            nb = len(space.base.generators)
            supports = []
            for i, deg in enumerate(seq):
                allowed = nb + i
                monos = [m for m in shell.basis(deg + 1) if all(g < allowed for g, _ in m)]
                supports.append(monos)
            out.append((seq, names, shell, supports))
    return out


def search_space_size(space: SearchSpace) -> int:
    width = space.coeff_range[1] - space.coeff_range[0] + 1
    return sum(width ** sum(len(s) for s in supports) for _, _, _, supports in _candidate_slots(space))


def search_killing_fibrations(space: SearchSpace, target: CohomologyClass) -> SearchResult:
    """All small fibrations over ``space.base`` in which ``target`` dies."""
    size = search_space_size(space)
    if size > space.cap:
        return SearchResult(size, 0, [], exceeded=True)
    lo, hi = space.coeff_range
    coeffs = range(lo, hi + 1)
    nb = len(space.base.generators)
    hits, index, evaluated = [], 0, 0
    for seq, names, shell, supports in _candidate_slots(space):
        flat = [(i, m) for i, monos in enumerate(supports) for m in monos]
        for vec in product(coeffs, repeat=len(flat)):
            index += 1
            d: dict[str, dict] = {}
            for (i, m), c in zip(flat, vec):
                if c:
                    d.setdefault(names[i], {})[m] = c
            total = DGAlgebra(shell.generators, {**_base_diffs(space.base), **d})
            if not validate(total, space.cutoff + 1).ok:
                continue
            stages = []
            for i in range(len(seq)):
                used = {g - nb for m in d.get(names[i], {}) for g, _ in m if g >= nb}
                stages.append(1 + max(stages[j] for j in used) if used else 0)
            fib = Fibration(space.base, total, tuple(stages))
            evaluated += 1
            z = total.element(target.representative)
            if any(class_coordinates(total, z, target.degree)):
                continue
            hits.append(Hit(index, fib, fiber_dimension_probe(fib, space.cutoff, space.margin)))
    return SearchResult(size, evaluated, hits)


def _base_diffs(base: DGAlgebra) -> dict:
    return {base.generators[k].name: v.terms for k, v in base.differential.items()}
