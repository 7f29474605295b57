"""Minimal models of bouquets of odd spheres against the Witt formula.

Run: python demos/bouquet_models.py
"""

from __future__ import annotations

from cdga.minimal import BouquetSpec, free_lie_dimensions, minimal_model, truncate, truncation_gap_check

TOP = 9

if __name__ == "__main__":
    for degrees in ([3], [3, 3], [3, 5], [3, 3, 3]):
        mm = minimal_model(BouquetSpec.from_degrees(degrees), TOP)
        witt = free_lie_dimensions(degrees, TOP).by_model_degree
        witt = {d: c for d, c in witt.items() if d <= TOP}
        print(f"spheres {degrees}: model {mm.generator_counts(TOP)} Witt {witt}")
    mm = minimal_model(BouquetSpec.from_degrees([3, 3]), TOP)
    for g in mm.model.generators:
        print(f"  d {g.name} = {mm.model.dgen(g.name)}")
    for k in (3, 5, 7):
        r = truncation_gap_check(truncate(mm.model, k))
        print(f"  generators up to degree {k}: H^{k + 1} = {r.h_k1}, H^{k + 2} = {r.h_k2}")
