"""Search small fibrations over S^3 whose total space kills [x].

Every such fibration should have a fiber with cohomology that does not stop
below the cutoff: the powers of the degree-2 generator keep surviving.

Run: python demos/injectivity_sweep.py
"""

from __future__ import annotations

from pathlib import Path

from cdga.cohomology import CohomologyClass
from cdga.dgafile import parse_file
from cdga.verify import SearchSpace, search_killing_fibrations, sphere_engine

DATA = Path(__file__).parent / "data"

if __name__ == "__main__":
    fib = parse_file(DATA / "kill_x.dga")
    report = sphere_engine(fib, 6)
    for line in report.trace:
        print(line)
    base = fib.base
    space = SearchSpace(base, (2, 3, 5), 2, (-2, 2), 12)
    res = search_killing_fibrations(space, CohomologyClass.of(base, "x"))
    print(f"search space {res.size}, evaluated {res.evaluated}, killing fibrations {len(res.hits)}")
    verdicts = {}
    for hit in res.hits:
        verdicts[hit.verdict.verdict] = verdicts.get(hit.verdict.verdict, 0) + 1
    print(f"fiber verdicts {verdicts}")
    for hit in res.hits[:3]:
        fib = hit.fibration
        diffs = {g.name: str(fib.total.dgen(g.name)) for g in fib.total.generators[len(base.generators):]}
        print(f"  #{hit.index}: {diffs} -> {hit.verdict}")
