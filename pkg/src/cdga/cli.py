"""Command-line front end: ``cdga <command> FILE [options]``.

Exit codes: 0 success or property holds, 1 property violated, 2 invalid
input, 3 resource bound exceeded.  ``--json`` prints one object with keys
``command``, ``cutoff``, ``verdict`` and ``data``.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import dgafile, linalg, verify
from .algebra import DGAlgebra, Element, validate
from .cohomology import CohomologyClass, betti, class_coordinates, cohomology_basis, combine
from .dgafile import DgaError
from .fibration import (
    Fibration,
    algebraic_fiber,
    attach_odd_sphere,
    build_tower,
    fiber_dimension_probe,
    finite_subtower,
    gysin_verify,
    validate_fibration,
)
from .minimal import (
    BouquetSpec,
    PreconditionError,
    ResourceBoundExceeded,
    UnsupportedTarget,
    compare_models,
    minimal_model,
    psi_to_sphere,
)

OK, VIOLATED, BAD_INPUT, RESOURCE = 0, 1, 2, 3


class InputError(Exception):
    """Bad command-line input detected after parsing the file."""


class Result:
    def __init__(self, verdict: str, data: dict, lines: list[str], code: int = OK):
        self.verdict, self.data, self.lines, self.code = verdict, data, lines, code


# -- helpers ---------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, Element):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _load(path: str):
    try:
        return dgafile.parse_file(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _algebra(obj) -> DGAlgebra:
    return obj.total if isinstance(obj, Fibration) else obj


def _fibration(obj) -> Fibration:
    if not isinstance(obj, Fibration):
        raise InputError("this command needs a fibration file (with 'fiber' lines)")
    return obj


def _class(dga: DGAlgebra, text: str | None) -> CohomologyClass:
    if text is None:
        raise InputError("--class is required")
    try:
        return CohomologyClass.of(dga, dga.element(text))
    except DgaError:
        raise
    except ValueError as exc:
        raise InputError(f"--class: {exc}") from None


def _pairs(pairs) -> list[str]:
    return [f"  {k:>4}  {v}" for k, v in pairs]


def _betti_lines(b: list[int]) -> list[str]:
    return ["degree  dim"] + [f"{n:>6}  {x}" for n, x in enumerate(b)]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


# -- commands --------------------------------------------------------------------


def cmd_validate(args) -> Result:
    obj = _load(args.file)
    report = validate(_algebra(obj), args.max_degree)
    data = {"d_squared_zero": report.ok, "violations": [str(v) for v in report.violations]}
    lines = [f"d∘d = 0 through degree {args.max_degree}: {report.ok}"]
    ok = report.ok
    if isinstance(obj, Fibration) and ok:
        fr = validate_fibration(obj, args.max_degree)
        data.update(filtration_ok=fr.filtration_ok, minimal=fr.minimal, filtration_violations=[str(v) for v in fr.violations])
        lines += [f"filtration respected: {fr.filtration_ok}", f"fiber differentials decomposable: {fr.minimal}"]
        ok = fr.filtration_ok
    lines += [f"  {v}" for v in data["violations"]]
    return Result("valid" if ok else "invalid", data, lines, OK if ok else VIOLATED)


def cmd_cohomology(args) -> Result:
    dga = _algebra(_load(args.file))
    b = betti(dga, args.max_degree, threads=args.threads)
    reps = {n: [str(r) for r in cohomology_basis(dga, n)] for n in range(args.max_degree + 1) if b[n]}
    lines = ["degree  dim  representatives"]
    lines += [f"{n:>6}  {x:>3}  {', '.join(reps.get(n, []))}".rstrip() for n, x in enumerate(b)]
    return Result("ok", {"betti": b, "representatives": reps}, lines)


def cmd_attach(args) -> Result:
    dga = _algebra(_load(args.file))
    beta = _class(dga, args.cls)
    if beta.degree % 2:
        raise InputError("the attached class must have even degree")
    fib, euler = attach_odd_sphere(dga, beta, args.name)
    b = betti(fib.total, args.max_degree, threads=args.threads)
    text = dgafile.dumps(fib)
    if args.output:
        _write(args.output, text)
    lines = [f"attached {euler.attached_generator.name} of degree {euler.attached_generator.degree}, d{euler.attached_generator.name} = {beta.representative}"]
    lines += _betti_lines(b)
    return Result("ok", {"generator": euler.attached_generator.name, "betti": b, "fibration": text}, lines)


def cmd_gysin(args) -> Result:
    obj = _load(args.file)
    if args.cls is not None:
        dga = _algebra(obj)
        fib, _ = attach_odd_sphere(dga, _class(dga, args.cls))
    else:
        fib = _fibration(obj)
    report = gysin_verify(fib, args.max_degree)
    nodes = [{"node": n.name, "degree": n.degree, "ok": n.ok, "detail": n.detail} for n in report.nodes]
    law = [{"node": n.name, "degree": n.degree, "ok": n.ok, "detail": n.detail} for n in report.kernel_law]
    lines = [f"{n['node']:<28} {n['degree']:>4}  {'ok' if n['ok'] else 'FAIL'}" for n in nodes + law]
    lines.append(f"exact through degree {args.max_degree}: {report.ok}")
    return Result("exact" if report.ok else "not exact", {"nodes": nodes, "kernel_law": law}, lines, OK if report.ok else VIOLATED)


def cmd_kill_even(args) -> Result:
    dga = _algebra(_load(args.file))
    tower = build_tower(dga, args.max_degree, args.max_stages)
    zero_map = tower.zero_map_property()
    lines = []
    stages = []
    for m, killed in enumerate(tower.killed, 1):
        names = [f"{k.generator} (d = {k.representative})" for k in killed]
        stages.append({"stage": m, "killed": [{"generator": k.generator, "degree": k.degree, "class": str(k.representative)} for k in killed]})
        lines.append(f"stage {m}: {len(killed)} generator(s)" + ("" if not names else ": " + "; ".join(names)))
    lines.append(f"zero-map property per stage: {zero_map}")
    lines.append(f"converged: {tower.converged}")
    text = dgafile.dumps(tower.last)
    if args.output:
        _write(args.output, text)
    data = {"stages": stages, "zero_map": zero_map, "converged": tower.converged,
            "residual_even_betti": tower.residual_even_betti, "fibration": text}
    if not all(zero_map):
        return Result("zero-map property violated", data, lines, VIOLATED)
    if not tower.converged:
        return Result("stage bound reached", data, lines, RESOURCE)
    return Result("converged", data, lines)


def cmd_subtower(args) -> Result:
    dga = _algebra(_load(args.file))
    alpha = _class(dga, args.cls)
    tower = build_tower(dga, args.max_degree, args.max_stages)
    try:
        sub = finite_subtower(tower, alpha)
    except ValueError as exc:
        code = RESOURCE if not tower.converged else VIOLATED
        return Result("class survives", {"reason": str(exc)}, [str(exc)], code)
    gens = [{"generator": g.name, "degree": g.degree, "stage": s, "d": str(sub.total.dgen(g.id))} for g, s in sub.fiber_generators]
    lines = [f"{x['generator']:<10} deg {x['degree']:>2}  stage {x['stage']}  d = {x['d']}" for x in gens]
    lines.append(f"{alpha} dies after {len(gens)} fiber generator(s)")
    return Result("class dies", {"generators": gens, "fibration": dgafile.dumps(sub)}, lines)


def cmd_fiber(args) -> Result:
    fib = _fibration(_load(args.file))
    fiber = algebraic_fiber(fib)
    b = betti(fiber, args.max_degree, threads=args.threads)
    text = dgafile.dumps(fiber)
    return Result("ok", {"fiber": text, "betti": b}, text.rstrip("\n").splitlines() + _betti_lines(b))


def _verdict_data(v) -> dict:
    return {"verdict": v.verdict, "betti": list(v.betti), "cutoff": v.cutoff}


def cmd_probe(args) -> Result:
    obj = _load(args.file)
    v = fiber_dimension_probe(obj, args.max_degree, args.margin)
    return Result(v.verdict, _verdict_data(v), [f"{v} at cutoff {args.max_degree}", *_betti_lines(list(v.betti))])


def cmd_minimal_model(args) -> Result:
    if args.bouquet:
        target = BouquetSpec.from_degrees(_ints(args.bouquet))
    elif args.file:
        target = _algebra(_load(args.file))
    else:
        raise InputError("give a file or --bouquet degrees")
    mm = minimal_model(target, args.max_degree, args.max_rounds)
    gens = []
    for g in mm.model.generators:
        img = mm.images.get(g.id)
        gens.append({"generator": g.name, "degree": g.degree, "d": str(mm.model.dgen(g.id)), "image": _jsonable(img)})
    qi = mm.quasi_isomorphism_degrees()
    lines = [f"{x['generator']:<10} deg {x['degree']:>2}  d = {x['d']:<20} -> {x['image']}" for x in gens]
    lines.append(f"generator counts: {mm.generator_counts(args.max_degree)}")
    ok = all(qi.values())
    lines.append(f"quasi-isomorphism through {args.max_degree}: {ok}")
    data = {"generators": gens, "counts": mm.generator_counts(args.max_degree), "quasi_isomorphism": qi}
    return Result("quasi-isomorphism" if ok else "not a quasi-isomorphism", data, lines, OK if ok else VIOLATED)


def cmd_compare_models(args) -> Result:
    dga = _algebra(_load(args.file))
    N = args.N if args.N is not None else args.max_degree // 2
    cmp = compare_models(dga, N)
    data = {"N": N, "model_counts": cmp.target_counts, "bouquet_counts": cmp.bouquet_counts,
            "phi_isomorphisms": cmp.phi_isomorphisms, "phi_is_morphism": cmp.phi_is_morphism}
    lines = [f"minimal model counts through {2 * N - 1}: {cmp.target_counts}",
             f"bouquet model counts through {2 * N - 1}: {cmp.bouquet_counts}",
             f"φ is a DGA morphism: {cmp.phi_is_morphism}",
             f"φ_* isomorphisms: {cmp.phi_isomorphisms}"]
    return Result("agree" if cmp.ok else "differ", data, lines, OK if cmp.ok else VIOLATED)


def cmd_psi(args) -> Result:
    dga = _algebra(_load(args.file))
    mm = minimal_model(dga, args.max_degree)
    alpha = _class(dga, args.cls)
    n = alpha.degree
    reps = cohomology_basis(mm.model, n)
    cols = [linalg.sparse(class_coordinates(dga, mm.target_map(r), n)) for r in reps]
    sol = linalg.solve(cols, linalg.sparse(class_coordinates(dga, alpha.representative, n)))
    a_tilde = combine(reps.representatives, sol, mm.model)
    proj = psi_to_sphere(mm.model, CohomologyClass.of(mm.model, a_tilde, n))
    images = {g.name: str(proj.psi.image(g.id)) for g in mm.model.generators}
    lines = [f"class in the minimal model: {a_tilde}", f"pivot generator: {proj.pivot}"]
    lines += [f"  ψ({k}) = {v}" for k, v in images.items()]
    return Result("ok", {"alpha_tilde": str(a_tilde), "pivot": proj.pivot, "images": images,
                         "coefficients": _jsonable(proj.coefficients)}, lines)


def cmd_injectivity(args) -> Result:
    fib = _fibration(_load(args.file))
    N = args.max_degree // 2
    report = verify.injectivity_check(fib, N, args.max_degree, args.margin)
    wit = [{"degree": w.degree, "class": str(w.cls), "preimage": str(w.preimage)} for w in report.witnesses]
    data = {"N": N, "kernel_dims": report.kernel_dims, "witnesses": wit, "degree_2N_kernel": report.top_degree_kernel,
            "fiber": _verdict_data(report.fiber_verdict), "even_cohomology_vanishes": report.precondition_ok}
    lines = [f"ker ι* in degrees < {2 * N}: {[d for d, k in report.kernel_dims.items() if k] or 'none'}"]
    lines += [f"  [{w['class']}] = d({w['preimage']}) in degree {w['degree']}" for w in wit]
    lines.append(f"degree {2 * N} kernel dimension (reported only): {report.top_degree_kernel}")
    lines.append(f"fiber verdict: {report.fiber_verdict}")
    if not report.precondition_ok:
        lines.append("warning: even cohomology of the base does not vanish")
    ok = report.injective
    return Result("injective" if ok else "not injective", data, lines, OK if ok else VIOLATED)


def cmd_sphere_engine(args) -> Result:
    fib = _fibration(_load(args.file))
    rep = verify.sphere_engine(fib, args.max_degree // 2, args.power_bound)
    data = {"trivial": rep.trivial, "v": None if rep.v is None else str(rep.v),
            "powers": [{"n": p.n, "degree": p.degree, "exact": p.exact} for p in rep.powers],
            "first_exact_power": rep.first_exact_power, "contradiction": rep.contradiction,
            "fiber_betti": list(rep.fiber_betti), "trace": rep.trace}
    lines = list(rep.trace) + [f"  [v^{p.n}] in degree {p.degree}: {'zero' if p.exact else 'nonzero'}" for p in rep.powers]
    if rep.v is None or rep.trivial:
        verdict = "injective"
    elif rep.persists:
        verdict = "fiber cohomology persists"
    else:
        verdict = "contradiction" if rep.contradiction else "inconsistent"
    return Result(verdict, data, lines, VIOLATED if verdict == "inconsistent" else OK)


def cmd_search(args) -> Result:
    dga = _algebra(_load(args.file))
    target = _class(dga, args.cls)
    lo, hi = _ints(args.coeff_range) if "," in args.coeff_range else (-int(args.coeff_range), int(args.coeff_range))
    space = verify.SearchSpace(dga, tuple(_ints(args.fiber_degrees)), args.max_generators, (lo, hi),
                               args.max_degree, args.margin, args.cap)
    res = verify.search_killing_fibrations(space, target)
    if res.exceeded:
        return Result("enumeration cap exceeded", {"size": res.size, "cap": args.cap},
                      [f"search space has {res.size} candidates, cap is {args.cap}"], RESOURCE)
    hits = [{"index": h.index, "verdict": h.verdict.verdict,
             "differentials": {g.name: str(h.fibration.total.dgen(g.id)) for g, _ in h.fibration.fiber_generators}}
            for h in res.hits]
    finite = len(res.finite_hits)
    lines = [f"candidates {res.size}, valid {res.evaluated}, killing {len(hits)}, with finite fiber {finite}"]
    lines += [f"  #{h['index']:<6} {h['verdict']:<18} {h['differentials']}" for h in hits]
    data = {"size": res.size, "evaluated": res.evaluated, "hits": hits, "finite_hits": finite}
    return Result("no counterexample" if not finite else "counterexample", data, lines, OK if not finite else VIOLATED)


def cmd_lift(args) -> Result:
    fib = _fibration(_load(args.file))
    top = max([g.degree for g, _ in fib.fiber_generators] + [0])
    mm = minimal_model(fib.base, args.max_degree + top + 1)
    res = verify.lift_fibration(fib, mm, args.max_degree)
    text = dgafile.dumps(res.fibration)
    ok = res.square_commutes and all(res.quasi_isomorphism.values())
    data = {"fibration": text, "corrections": _jsonable(res.corrections),
            "square_commutes": res.square_commutes, "quasi_isomorphism": res.quasi_isomorphism}
    lines = text.rstrip("\n").splitlines()
    lines += [f"g({k}) = {k} + ({v})" for k, v in res.corrections.items() if v]
    lines += [f"square commutes: {res.square_commutes}", f"g quasi-isomorphism through {args.max_degree}: {all(res.quasi_isomorphism.values())}"]
    return Result("lifted" if ok else "lift check failed", data, lines, OK if ok else VIOLATED)


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


# -- argument parsing ---------------------------------------------------------------

COMMANDS = {
    "validate": (cmd_validate, "check d∘d = 0 (and the filtration for fibrations)"),
    "cohomology": (cmd_cohomology, "Betti numbers and canonical representatives"),
    "attach": (cmd_attach, "attach an odd sphere killing an even class"),
    "gysin": (cmd_gysin, "verify Gysin exactness and the kernel law"),
    "kill-even": (cmd_kill_even, "build the tower killing even cohomology"),
    "subtower": (cmd_subtower, "finite sub-tower in which a class dies"),
    "fiber": (cmd_fiber, "algebraic fiber of a fibration"),
    "probe": (cmd_probe, "finite-dimension evidence for the fiber cohomology"),
    "minimal-model": (cmd_minimal_model, "minimal model of an algebra or an odd bouquet"),
    "compare-models": (cmd_compare_models, "compare the minimal and bouquet models"),
    "psi": (cmd_psi, "projection of the minimal model onto one odd sphere"),
    "injectivity": (cmd_injectivity, "kernel of H(base) -> H(total) below 2N"),
    "sphere-engine": (cmd_sphere_engine, "the v^n argument over a single odd sphere"),
    "search": (cmd_search, "enumerate small fibrations killing a class"),
    "lift": (cmd_lift, "lift a fibration to the minimal model of its base"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-degree", type=int, default=12, help="degree cutoff (default 12)")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--threads", type=int, default=1, help="worker threads for per-degree work")

    parser = argparse.ArgumentParser(prog="cdga", description="Exact CDGA computations over Q.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = {}
    for name, (_, help_) in COMMANDS.items():
        p[name] = sub.add_parser(name, parents=[common], help=help_)
        p[name].add_argument("file", nargs="?" if name == "minimal-model" else None)
    for name in ("attach", "gysin", "subtower", "psi", "search"):
        p[name].add_argument("--class", dest="cls", help="class representative, e.g. 'a^2'")
    p["attach"].add_argument("--name", default="x")
    for name in ("attach", "kill-even"):
        p[name].add_argument("-o", "--output")
    for name in ("kill-even", "subtower"):
        p[name].add_argument("--max-stages", type=int, default=8)
    for name in ("probe", "injectivity", "search"):
        p[name].add_argument("--margin", type=int, default=2)
    p["minimal-model"].add_argument("--bouquet", help="comma-separated odd label degrees")
    p["minimal-model"].add_argument("--max-rounds", type=int, default=25)
    p["compare-models"].add_argument("-N", type=int)
    p["sphere-engine"].add_argument("--power-bound", type=int)
    p["search"].add_argument("--fiber-degrees", default="2,3,5")
    p["search"].add_argument("--max-generators", type=int, default=2)
    p["search"].add_argument("--coeff-range", default="-1,1", help="'lo,hi' or a bound b for -b..b")
    p["search"].add_argument("--cap", type=int, default=200_000)
    return parser


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    func = COMMANDS[args.command][0]
    try:
        if args.max_degree < 0:
            raise InputError("--max-degree must be non-negative")
        res = func(args)
    except ResourceBoundExceeded as exc:
        res = Result("resource bound exceeded", {"error": str(exc)}, [f"error: {exc}"], RESOURCE)
    except (DgaError, InputError, PreconditionError, UnsupportedTarget, ValueError) as exc:
        res = Result("invalid input", {"error": str(exc)}, [f"error: {exc}"], BAD_INPUT)
    if args.json:
        report = {"command": args.command, "cutoff": args.max_degree, "verdict": res.verdict, "data": _jsonable(res.data)}
        print(json.dumps(report, indent=2, sort_keys=True), file=out)
    else:
        print("\n".join(res.lines), file=out)
        print(f"verdict: {res.verdict}", file=out)
    return res.code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
