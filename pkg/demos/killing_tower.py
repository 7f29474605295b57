"""Kill all even cohomology of S^2 and CP^2 by a tower of odd spheres.

Run: python demos/killing_tower.py
"""

from __future__ import annotations

from pathlib import Path

from cdga.cohomology import betti
from cdga.dgafile import parse_file
from cdga.fibration import build_tower
from cdga.minimal import BouquetSpec, minimal_model

DATA = Path(__file__).parent / "data"


def show(name: str, cutoff: int):
    tower = build_tower(parse_file(DATA / f"{name}.dga"), cutoff)
    print(f"{name} through degree {cutoff}: {tower.stage_count} step(s), converged {tower.converged}")
    for m, killed in enumerate(tower.killed, 1):
        for kc in killed:
            print(f"  step {m}: {kc.generator} kills [{kc.representative}] in degree {kc.degree}")
    print(f"  killed classes exact one step later: {tower.zero_map_property()}")
    print(f"  betti(top) {betti(tower.last.total, cutoff)}")
    return tower


if __name__ == "__main__":
    tower = show("s2", 12)
    show("cp2", 9)
    mm = minimal_model(tower.last.total, 9)
    sphere = minimal_model(BouquetSpec.from_degrees([3]), 9)
    print(f"minimal model of the S^2 tower: {mm.generator_counts(9)}, S^3: {sphere.generator_counts(9)}")
