"""Sullivan minimal models by degree induction, bouquets of odd spheres and
the comparison maps between their truncations and a target algebra."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, gcd
from typing import Sequence

from . import linalg
from .algebra import DGAlgebra, Element, Morphism, validate_morphism
from .cohomology import (
    CohomologyClass,
    betti,
    betti_number,
    class_coordinates,
    cohomology_basis,
    combine,
    induced_map,
    is_exact,
    is_isomorphism,
)


class UnsupportedTarget(ValueError):
    """Targets outside the finite degree-truncated setting (e.g. dim H^1 >= 2)."""


class PreconditionError(ValueError):
    pass


class ResourceBoundExceeded(RuntimeError):
    pass


# -- bouquets -----------------------------------------------------------------


@dataclass(frozen=True)
class BouquetSpec:
    """Labels ``(name, odd degree)`` of a bouquet of odd algebraic spheres.

    Only the cohomology table is stored: 1 in degree 0, one class per label,
    all products zero, d = 0.
    """

    labels: tuple

    def __post_init__(self):
        labels = tuple((str(n), int(d)) for n, d in self.labels)
        for name, deg in labels:
            if deg < 1 or deg % 2 == 0:
                raise ValueError(f"bouquet label {name!r} must have odd positive degree, got {deg}")
        if len({n for n, _ in labels}) != len(labels):
            raise ValueError("bouquet label names must be unique")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_degrees(cls, degrees: Sequence[int], prefix: str = "x") -> BouquetSpec:
        return cls(tuple((f"{prefix}{i}", d) for i, d in enumerate(degrees)))

    def in_degree(self, n: int) -> list[int]:
        return [i for i, (_, d) in enumerate(self.labels) if d == n]


def bouquet_cohomology(spec: BouquetSpec, n: int) -> tuple[int, list[str]]:
    """Dimension and label names of H^n of the bouquet."""
    if n == 0:
        return 1, []
    names = [spec.labels[i][0] for i in spec.in_degree(n)]
    return len(names), names


# -- target adaptors ------------------------------------------------------------
# The induction only needs three things from a target: its cohomology basis,
# the class of f(z) for a model cocycle z, and a preimage of an exact f(z).


class _AlgebraTarget:
    def __init__(self, dga: DGAlgebra):
        self.dga = dga

    def dim(self, n):
        return cohomology_basis(self.dga, n).dimension

    def new_image(self, n, j):
        return cohomology_basis(self.dga, n)[j]

    def map(self, model, images):
        return Morphism(model, self.dga, images)

    def coords(self, f, z, n):
        return class_coordinates(self.dga, f(z), n)

    def preimage(self, f, z, n):
        theta = is_exact(self.dga, f(z), n)
        if theta is None:
            raise AssertionError("kernel class does not map to an exact element")
        return theta

    def h1(self):
        return betti_number(self.dga, 1)


class _BouquetTarget:
    """Images are coordinate dicts over the labels of the generator's degree."""

    def __init__(self, spec: BouquetSpec):
        self.spec = spec

    def dim(self, n):
        return bouquet_cohomology(self.spec, n)[0]

    def new_image(self, n, j):
        return {j: Fraction(1)}

    def map(self, model, images):
        return images

    def coords(self, images, z, n):
        if n == 0:
            return (z.coefficient(()),)
        # products vanish in the bouquet, only the linear part survives
        out = [Fraction(0)] * self.dim(n)
        for m, c in z.terms.items():
            if len(m) == 1 and m[0][1] == 1:
                for j, v in images.get(m[0][0], {}).items():
                    out[j] += c * v
        return tuple(out)

    def preimage(self, images, z, n):
        return {}

    def h1(self):
        return len(self.spec.in_degree(1))


@dataclass
class MinimalModel:
    """A minimal algebra with a map to ``target`` inducing H-isomorphisms through ``cutoff``.

    For algebra targets ``images`` holds Elements of the target; for bouquet
    targets it holds coordinate dicts over the labels of each degree.
    """

    model: DGAlgebra
    target: object
    images: dict
    cutoff: int
    kinds: dict = field(default_factory=dict)

    @property
    def target_map(self) -> Morphism:
        if not isinstance(self.target, DGAlgebra):
            raise TypeError("bouquet targets carry label images, not a Morphism")
        return Morphism(self.model, self.target, self.images)

    def generator_counts(self, upto: int | None = None) -> dict[int, int]:
        counts: dict[int, int] = {}
        for g in self.model.generators:
            if upto is None or g.degree <= upto:
                counts[g.degree] = counts.get(g.degree, 0) + 1
        return dict(sorted(counts.items()))

    def is_minimal(self) -> bool:
        return is_minimal(self.model)

    def induced(self, n: int) -> list:
        adaptor = _adaptor(self.target)
        f = adaptor.map(self.model, self.images)
        return [adaptor.coords(f, r, n) for r in cohomology_basis(self.model, n)]

    def quasi_isomorphism_degrees(self, upto: int | None = None) -> dict[int, bool]:
        adaptor = _adaptor(self.target)
        top = self.cutoff if upto is None else upto
        return {n: is_isomorphism(self.induced(n), adaptor.dim(n)) for n in range(top + 1)}

    def is_quasi_isomorphism(self, upto: int | None = None) -> bool:
        return all(self.quasi_isomorphism_degrees(upto).values())


def _adaptor(target):
    if isinstance(target, DGAlgebra):
        return _AlgebraTarget(target)
    if isinstance(target, BouquetSpec):
        return _BouquetTarget(target)
    raise TypeError(f"unsupported target {type(target).__name__}")


def is_minimal(dga: DGAlgebra) -> bool:
    """No generator differential has a linear term."""
    return all(dga.dgen(g.id).is_decomposable() for g in dga.generators)


def minimal_model(target, cutoff: int, max_rounds: int = 25) -> MinimalModel:
    """Degree-by-degree minimal model of a DGAlgebra or a bouquet cohomology table.

    At each degree n: first adjoin closed generators (V1) hitting the
    cokernel of H^n(model) -> H^n(target), then repeatedly adjoin generators
    (V2) with dy = z killing the kernel on H^{n+1}.
    """
    if isinstance(target, (list, tuple)):
        target = BouquetSpec(tuple(target))
    adaptor = _adaptor(target)
    if adaptor.h1() >= 2:
        raise UnsupportedTarget("targets with dim H^1 >= 2 need infinitely many degree-1 generators")
    bouquet = isinstance(target, BouquetSpec)

    gens: list[tuple[str, int]] = []
    diffs: dict[str, Element] = {}
    images: dict = {}
    kinds: dict[int, str] = {}
    model = DGAlgebra()
    counter: dict[int, int] = {}

    def fresh(n):
        i = counter.get(n, 0)
        counter[n] = i + 1
        return f"z{n}_{i}" if bouquet else f"m{n}_{i}"

    def add(new, d, imgs, kind):
        nonlocal model
        base = len(gens)
        gens.extend(new)
        diffs.update(d)
        model = DGAlgebra(gens, {k: v.terms for k, v in diffs.items()})
        for j, img in enumerate(imgs):
            images[base + j] = img
            kinds[base + j] = kind

    for n in range(1, cutoff + 1):
        # V1: classes of the target not yet hit
        f = adaptor.map(model, images)
        hit = [linalg.sparse(adaptor.coords(f, r, n)) for r in cohomology_basis(model, n)]
        ech = linalg.Echelon(hit)
        missing = [j for j in range(adaptor.dim(n)) if j not in ech.pivots]
        if missing:
            if bouquet:
                names = [target.labels[target.in_degree(n)[j]][0] for j in missing]
            else:
                names = [fresh(n) for _ in missing]
            add([(nm, n) for nm in names], {}, [adaptor.new_image(n, j) for j in missing], "V1")
        # V2: kill the kernel on H^{n+1}, repeating while new kernel appears
        for _ in range(max_rounds):
            f = adaptor.map(model, images)
            reps = cohomology_basis(model, n + 1)
            cols = [linalg.sparse(adaptor.coords(f, r, n + 1)) for r in reps]
            kernel = linalg.kernel(cols)
            if not kernel:
                break
            new, d, imgs = [], {}, []
            for vec in kernel:
                z = combine(reps.representatives, vec, model)
                if not z.is_decomposable():
                    raise AssertionError(f"kernel cocycle {z} has a linear part")
                name = fresh(n)
                new.append((name, n))
                d[name] = z
                imgs.append(adaptor.preimage(f, z, n + 1))
            add(new, d, imgs, "V2")
        else:
            raise ResourceBoundExceeded(
                f"kernel on H^{n + 1} not exhausted after {max_rounds} rounds (non-nilpotent H^1 action?)"
            )
    mm = MinimalModel(model, target, {k: _rehome(v, target) for k, v in images.items()}, cutoff, kinds)
    return mm


def _rehome(img, target):
    if isinstance(target, DGAlgebra):
        return target.element(img)
    return dict(img)


# -- truncations ----------------------------------------------------------------


@dataclass(frozen=True)
class Truncation:
    parent: DGAlgebra
    k: int
    subalgebra: DGAlgebra
    ids: tuple  # parent ids of the kept generators, in order

    def inclusion(self) -> Morphism:
        return Morphism(self.subalgebra, self.parent, {i: self.parent.gen(p) for i, p in enumerate(self.ids)})


def truncate(model: DGAlgebra, k: int) -> Truncation:
    """Sub-algebra generated by the generators of degree <= k."""
    keep = [g.id for g in model.generators if g.degree <= k]
    pos = {p: i for i, p in enumerate(keep)}
    gens = [(model.generators[p].name, model.generators[p].degree) for p in keep]
    shell = DGAlgebra(gens)
    d = {}
    for p in keep:
        dg = model.dgen(p)
        if not dg.support() <= set(pos):
            raise ValueError(f"d{model.generators[p].name} leaves the truncation at degree {k}")
        d[model.generators[p].name] = {tuple((pos[g], e) for g, e in m): c for m, c in dg.terms.items()}
    sub = DGAlgebra(shell.generators, d)
    return Truncation(model, k, sub, tuple(keep))


@dataclass
class TruncationGapReport:
    k: int
    h_k1: int
    h_k2: int

    @property
    def ok(self) -> bool:
        return self.h_k1 == 0 and self.h_k2 == 0

    def __bool__(self):
        return self.ok


def truncation_gap_check(trunc: Truncation) -> TruncationGapReport:
    """H^{k+1}(M_k) and H^{k+2}(M_k) for odd k; both should vanish."""
    k = trunc.k
    if k % 2 == 0:
        raise ValueError("k must be odd")
    return TruncationGapReport(k, betti_number(trunc.subalgebra, k + 1), betti_number(trunc.subalgebra, k + 2))


# -- comparison with a target with vanishing even cohomology -----------------------


def even_cohomology_vanishes(dga: DGAlgebra, top: int) -> bool:
    b = betti(dga, top)
    return not any(b[n] for n in range(2, top + 1, 2))


def cohomology_labels(dga: DGAlgebra, lo: int, hi: int) -> tuple[BouquetSpec, dict]:
    """Bouquet labels for bases of H^lo..H^hi, with the cocycle of each label."""
    labels, reps = [], {}
    for i in range(lo, hi + 1):
        for j, r in enumerate(cohomology_basis(dga, i)):
            name = f"h{i}_{j}"
            labels.append((name, i))
            reps[name] = r
    return BouquetSpec(tuple(labels)), reps


@dataclass
class PhiK:
    """φ_k: M_k -> B with the bouquet model it was built from."""

    bouquet: MinimalModel
    truncation: Truncation
    morphism: Morphism
    k: int

    def isomorphism_degrees(self) -> dict[int, bool]:
        src, tgt = self.morphism.source, self.morphism.target
        return {
            i: is_isomorphism(induced_map(self.morphism, src, tgt, i), betti_number(tgt, i))
            for i in range(self.k + 1)
        }


def build_phi_k(B: DGAlgebra, N: int, k: int) -> PhiK:
    """Map the truncated bouquet model M_k into B, degree by degree.

    Closed generators go to the chosen cocycle of their label; a generator
    with dy = c goes to some θ with dθ = φ(c).
    """
    if k % 2 == 0 or k > 2 * N - 1 or k < 1:
        raise ValueError(f"k must be odd with 1 <= k <= 2N-1, got k={k}, N={N}")
    if not even_cohomology_vanishes(B, 2 * N):
        raise PreconditionError(f"H^even(B) does not vanish through degree {2 * N}")
    spec, reps = cohomology_labels(B, 1, 2 * N + 1)
    mm = minimal_model(spec, k)
    trunc = truncate(mm.model, k)
    sub = trunc.subalgebra
    label_names = [n for n, _ in spec.labels]
    images: dict[int, Element] = {}
    for i, p in enumerate(trunc.ids):
        g = sub.generators[i]
        dg = sub.dgen(i)
        if not dg:
            img = B.zero
            deg_labels = spec.in_degree(g.degree)
            for j, c in mm.images[p].items():
                img = img + reps[label_names[deg_labels[j]]] * c
            images[i] = B.element(img)
        else:
            z = Morphism(sub, B, images)(dg)
            theta = is_exact(B, z, g.degree + 1)
            if theta is None:
                raise PreconditionError(f"φ(d{g.name}) is not exact: H^{g.degree + 1}(B) != 0")
            images[i] = theta
    return PhiK(mm, trunc, Morphism(sub, B, images), k)


@dataclass
class ModelComparison:
    N: int
    target_counts: dict
    bouquet_counts: dict
    phi_isomorphisms: dict
    model_isomorphisms: dict
    phi_is_morphism: bool

    @property
    def counts_agree(self) -> bool:
        return self.target_counts == self.bouquet_counts

    @property
    def ok(self) -> bool:
        return (
            self.counts_agree
            and self.phi_is_morphism
            and all(self.phi_isomorphisms.values())
            and all(self.model_isomorphisms.values())
        )


def compare_models(B: DGAlgebra, N: int) -> ModelComparison:
    """Truncations of the minimal model of B and of its bouquet model, through 2N-1."""
    top = 2 * N - 1
    if not even_cohomology_vanishes(B, 2 * N):
        raise PreconditionError(f"H^even(B) does not vanish through degree {2 * N}")
    mb = minimal_model(B, top)
    phi = build_phi_k(B, N, top)
    return ModelComparison(
        N,
        mb.generator_counts(top),
        phi.bouquet.generator_counts(top),
        phi.isomorphism_degrees(),
        mb.quasi_isomorphism_degrees(top),
        validate_morphism(phi.morphism, top + 1).ok,
    )


# -- projection to a single odd sphere ---------------------------------------------


@dataclass
class SphereProjection:
    """ψ: mb -> (Λ(η), 0) with ψ_*(α) = [η].

    ``pivot`` is the generator rescaled onto η; ``representative`` is the new
    basis generator Σ c_i g_i representing α after the change of basis.
    """

    psi: Morphism
    pivot: str
    representative: Element
    coefficients: dict


def cocycle_generators(dga: DGAlgebra, n: int) -> list[int]:
    return [g.id for g in dga.generators if g.degree == n and not dga.dgen(g.id)]


def psi_to_sphere(mb: DGAlgebra, alpha: CohomologyClass, eta: str = "eta") -> SphereProjection:
    """Send a generator representing alpha to η and all others to 0."""
    n = alpha.degree
    if n % 2 == 0:
        raise ValueError("alpha must have odd degree")
    if alpha.is_zero():
        raise ValueError("alpha must be a nonzero class")
    if not is_minimal(mb):
        raise ValueError("source algebra is not minimal")
    gids = cocycle_generators(mb, n)
    cols = [linalg.sparse(class_coordinates(mb, mb.gen(g), n)) for g in gids]
    target = linalg.sparse(class_coordinates(mb, alpha.representative, n))
    sol = linalg.solve(cols, target)
    if sol is None:
        raise ValueError(f"{alpha} is not represented by generators of degree {n}")
    pivot = min(sol)
    sphere = DGAlgebra([(eta, n)])
    psi = Morphism(mb, sphere, {gids[pivot]: sphere.gen(0) * (1 / sol[pivot])})
    rep = combine([mb.gen(g) for g in gids], sol, mb)
    return SphereProjection(psi, mb.generators[gids[pivot]].name, rep, {mb.generators[gids[i]].name: c for i, c in sol.items()})


# -- the odd-cohomology proposition ----------------------------------------------------


@dataclass
class OddBouquetReport:
    cutoff: int
    model: MinimalModel
    even_generators: list
    unrepresented_degrees: list
    model_counts: dict
    bouquet_counts: dict

    @property
    def ok(self) -> bool:
        return not self.even_generators and not self.unrepresented_degrees and self.model_counts == self.bouquet_counts


def generator_represented(dga: DGAlgebra, n: int) -> bool:
    """Classes of closed degree-n generators span H^n."""
    cols = [linalg.sparse(class_coordinates(dga, dga.gen(g), n)) for g in cocycle_generators(dga, n)]
    return linalg.rank(cols) == betti_number(dga, n)


def verify_odd_bouquet_model(C: DGAlgebra, cutoff: int) -> OddBouquetReport:
    # generators of degree n depend on H^{n+1}, so check one degree past the cutoff
    if not even_cohomology_vanishes(C, cutoff + 1):
        raise PreconditionError(f"H^even(C) does not vanish through degree {cutoff + 1}")
    mm = minimal_model(C, cutoff)
    spec, _ = cohomology_labels(C, 1, cutoff)
    bouquet = minimal_model(spec, cutoff)
    even = [g.name for g in mm.model.generators if g.degree % 2 == 0 and g.degree <= cutoff]
    unrep = [n for n in range(1, cutoff + 1) if not generator_represented(mm.model, n)]
    return OddBouquetReport(cutoff, mm, even, unrep, mm.generator_counts(cutoff), bouquet.generator_counts(cutoff))


# -- free Lie algebra dimensions ---------------------------------------------------------


def mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


@dataclass
class LieDimensions:
    by_length: list  # dimension for word lengths 1..max
    by_model_degree: dict  # expected minimal-model generator count per degree


def free_lie_dimensions(degrees: Sequence[int], max_length: int) -> LieDimensions:
    """Generalised Witt formula for the free Lie algebra on desuspended labels.

    Each odd label of degree d is a letter of even degree d-1; a Lie word
    with letter counts β gives model generators in degree Σβ(d-1)+1.
    """
    for d in degrees:
        if d < 1 or d % 2 == 0:
            raise ValueError(f"unsupported grading: label degree {d} must be odd and positive")
    types: dict[int, int] = {}
    for d in degrees:
        types[d] = types.get(d, 0) + 1
    tdeg = sorted(types)
    counts = [types[d] for d in tdeg]
    by_length = []
    by_degree: dict[int, int] = {}
    for length in range(1, max_length + 1):
        total = 0
        for beta in product(range(length + 1), repeat=len(tdeg)):
            if sum(beta) != length:
                continue
            g = 0
            for b in beta:
                g = gcd(g, b)
            acc = 0
            for e in range(1, g + 1):
                if g % e:
                    continue
                mu = mobius(e)
                if not mu:
                    continue
                term = factorial(length // e)
                for b, q in zip(beta, counts):
                    term = term // factorial(b // e) * q ** (b // e)
                acc += mu * term
            dim = acc // length
            if dim:
                deg = sum(b * (d - 1) for b, d in zip(beta, tdeg)) + 1
                by_degree[deg] = by_degree.get(deg, 0) + dim
            total += dim
        by_length.append(total)
    return LieDimensions(by_length, dict(sorted(by_degree.items())))
