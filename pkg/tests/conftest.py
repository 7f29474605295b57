from __future__ import annotations

import pytest

CRITERIA = {
    1: "rational Hopf S^3 Betti numbers through degree 12",
    2: "rational S^5 over CP^2 Betti numbers through degree 12",
    3: "kernel law ker(phi*) = H^i * beta on all attachments",
    4: "Gysin exactness at every node below the cutoff",
    5: "even-cohomology killing tower on S^2 and CP^2, zero-map property",
    6: "bouquet model of two 3-spheres against the Witt counts",
    7: "phi_k and psi morphisms and their induced maps",
    8: "single odd sphere engine on dv = x",
    9: "exhaustive search over small fibrations of S^3",
    10: "minimal model of the converged S^2 tower",
    11: "library property suites and JSON golden files",
}

_results: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _results.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, desc in CRITERIA.items():
        runs = _results.get(n)
        if runs is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2} {status:<7} {desc}")
