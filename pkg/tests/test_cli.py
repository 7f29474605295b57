from __future__ import annotations

import io
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import pytest
from hypothesis import given, settings

from algebra_strategies import algebra_specs, build
from cdga.cli import run
from cdga.cohomology import betti
from cdga.dgafile import dumps, parse_file
from golden_cases import CASES

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"
KEYS = {"command", "cutoff", "verdict", "data"}


@pytest.fixture
def in_data(monkeypatch):
    monkeypatch.chdir(DATA)


def cli(argv) -> tuple[int, str]:
    buf = io.StringIO()
    code = run([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


def cli_json(argv) -> tuple[int, dict]:
    code, text = cli(list(argv) + ["--json"])
    return code, json.loads(text)


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_json(name, in_data):
    code, report = cli_json(CASES[name])
    expected = json.loads((GOLDEN / f"{name}.json").read_text())
    assert report == expected
    assert set(report) == KEYS
    assert report["command"] == CASES[name][0]


def test_cohomology_table(in_data):
    code, text = cli(["cohomology", "hopf.dga", "--max-degree", "10"])
    assert code == 0
    rows = [line.split() for line in text.splitlines()[1:12]]
    dims = {int(r[0]): int(r[1]) for r in rows}
    assert {d for d, x in dims.items() if x} == {0, 3}
    assert "b - a*x" in text


def test_kill_even_writes_reparsable_tower(in_data, tmp_path):
    out = tmp_path / "tower.dga"
    code, text = cli(["kill-even", "cp2.dga", "--max-degree", "9", "--max-stages", "6", "-o", out])
    assert code == 0
    assert "stage 1" in text and "stage 2" in text
    tower = parse_file(out)
    assert tower.stages == (0, 0, 1)
    b = betti(tower.total, 9)
    assert not any(b[n] for n in range(2, 10, 2))


def test_injectivity_reports_kernel(in_data):
    code, report = cli_json(["injectivity", "kill_x.dga", "--max-degree", "12"])
    assert code == 1
    assert report["verdict"] == "not injective"
    assert report["data"]["witnesses"] == [{"class": "x", "degree": 3, "preimage": "v"}]
    assert report["data"]["fiber"]["verdict"] == "NonzeroNearCutoff"


def test_exit_code_property_violated(in_data, tmp_path):
    bad = tmp_path / "bad.dga"
    bad.write_text("gen x 3\ngen v 2\ngen w 3\nd v = x\nd w = v^2\n")
    code, report = cli_json(["validate", bad])
    assert code == 1 and report["verdict"] == "invalid"
    # an invalid differential is invalid input for any computation
    assert cli(["cohomology", bad])[0] == 2


def test_exit_code_invalid_input(in_data, tmp_path):
    assert cli(["cohomology", "missing.dga"])[0] == 2
    bad = tmp_path / "mismatch.dga"
    bad.write_text("gen a 2\ngen b 3\nd b = a\n")
    code, report = cli_json(["cohomology", bad])
    assert code == 2
    assert "degree mismatch" in report["data"]["error"]
    syntax = tmp_path / "syntax.dga"
    syntax.write_text("gen a 2\nd a = (\n")
    code, report = cli_json(["cohomology", syntax])
    assert code == 2 and "line 2" in report["data"]["error"]
    assert cli(["attach", "s2.dga", "--class", "b"])[0] == 2
    assert cli(["attach", "s3.dga", "--class", "x"])[0] == 2
    assert cli(["no-such-command"])[0] == 2
    assert cli(["fiber", "hopf.dga"])[0] == 2
    assert cli(["minimal-model", "--bouquet", "1,1"])[0] == 2


def test_exit_code_resource_bound(in_data):
    assert cli(["kill-even", "cp2.dga", "--max-degree", "12", "--max-stages", "1"])[0] == 3
    code, report = cli_json(["search", "s3.dga", "--class", "x", "--coeff-range", "2", "--cap", "5"])
    assert code == 3 and report["data"]["cap"] == 5
    assert cli(["minimal-model", "--bouquet", "1,3", "--max-degree", "7", "--max-rounds", "3"])[0] == 3


def test_search_full_sweep(in_data):
    code, report = cli_json(["search", "s3.dga", "--class", "x", "--coeff-range=-2,2", "--fiber-degrees", "2,3,5"])
    assert code == 0
    assert report["data"]["finite_hits"] == 0
    assert all(h["verdict"] == "NonzeroNearCutoff" for h in report["data"]["hits"])


def test_threads_do_not_change_output(in_data):
    one = cli(["cohomology", "bouquet_b.dga", "--max-degree", "12"])
    four = cli(["cohomology", "bouquet_b.dga", "--max-degree", "12", "--threads", "4"])
    assert one == four


def test_sphere_engine_power_bound(in_data):
    code, report = cli_json(["sphere-engine", "kill_x.dga", "--power-bound", "3"])
    assert code == 0
    assert [p["n"] for p in report["data"]["powers"]] == [1, 2, 3]


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cdga.cli", "probe", str(DATA / "hopf.dga"), "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "FiniteUpTo"


@settings(max_examples=1000, deadline=None)
@given(algebra_specs())
def test_json_schema_and_values(spec):
    dga = build(*spec)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "a.dga")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(dumps(dga))
        code, report = cli_json(["cohomology", path, "--max-degree", "6"])
        assert code == 0
        assert set(report) == KEYS
        assert report["command"] == "cohomology" and report["cutoff"] == 6
        assert report["data"]["betti"] == betti(dga, 6)
        code, report = cli_json(["validate", path, "--max-degree", "6"])
        assert code == 0 and set(report) == KEYS and report["verdict"] == "valid"
