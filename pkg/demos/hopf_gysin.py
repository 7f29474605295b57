"""Attach an odd sphere to S^2 and CP^2 and check the Gysin sequence.

Run: python demos/hopf_gysin.py
"""

from __future__ import annotations

from pathlib import Path

from cdga.cohomology import CohomologyClass, betti, cohomology_basis
from cdga.dgafile import parse_file
from cdga.fibration import attach_odd_sphere, gysin_verify

DATA = Path(__file__).parent / "data"
CUTOFF = 12


def show(name: str):
    base = parse_file(DATA / f"{name}.dga")
    fib, euler = attach_odd_sphere(base, CohomologyClass.of(base, "a"))
    total = fib.total
    print(f"{name}: attached {euler.attached_generator.name} with d = a")
    print(f"  betti(base)  {betti(base, CUTOFF)}")
    print(f"  betti(total) {betti(total, CUTOFF)}")
    for n, b in enumerate(betti(total, CUTOFF)):
        if n and b:
            print(f"  H^{n} spanned by {[str(r) for r in cohomology_basis(total, n)]}")
    report = gysin_verify(fib, CUTOFF)
    print(f"  Gysin sequence exact through {CUTOFF}: {report.ok} ({len(report.nodes)} nodes)")
    print(f"  kernel of pullback equals the Euler multiples: {all(n.ok for n in report.kernel_law)}")


if __name__ == "__main__":
    show("s2")
    show("cp2")
