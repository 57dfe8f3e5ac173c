import json
import subprocess
import sys

import pytest

from robba_lab.cli import main, run, to_jsonable
from robba_lab.mw import MWElement
from robba_lab.nabla import NablaModule, trivial_module
from robba_lab.padic import PadicScalar
from robba_lab.robba import RobbaElement

P = 5


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


def test_hensel_int(files):
    poly = files("P.json", {"coeffs": [RobbaElement(P, {(1, -1): P}).to_json()]})
    status, doc = run(["hensel-int", "--poly", poly, "--prec", "12"])
    assert status == 0
    assert doc["command"] == "hensel-int"
    assert all(entry["ok"] for entry in doc["log"])
    root = RobbaElement.from_json(doc["result"]["root"])
    assert root.poly[(0, 0)] == 1 and root.poly[(1, -1)] == -P


def test_wdiv(files):
    f = files("f.json", MWElement.x_poly([0, 0, 1], P).to_json())
    g = files("g.json", MWElement.x_poly([P, 1], P).to_json())
    status, doc = run(["wdiv", "--f", f, "--g", g])
    assert status == 0
    assert MWElement.from_json(doc["result"]["q"]) == MWElement.x_poly([-P, 1], P)
    assert MWElement.from_json(doc["result"]["r"]) == MWElement.x_poly([P * P], P)


def test_cohomology_trivial(files):
    mod = files("trivial-rank1.json", trivial_module("robba-E†", P).to_json())
    status, doc = run(["cohomology", "--module", mod])
    assert status == 0
    assert (doc["result"]["h0"], doc["result"]["h1"]) == (1, 1)


def test_mw_cohomology_dispatch(files):
    mod = files("mw.json", trivial_module("mw-E†", P).to_json())
    status, doc = run(["cohomology", "--module", mod])
    assert (doc["result"]["h0"], doc["result"]["h1"]) == (1, 0)


def test_exit_codes(files, capsys):
    assert main(["wdiv", "--f", "missing.json", "--g", "missing.json"]) == 1
    bad = files("bad.json", {"imax": 0, "coeffs": [], "cert": {}})
    assert main(["order", "--f", bad]) == 1
    assert main(["no-such-command"]) == 1
    zero = files("z.json", PadicScalar.zero(P, 3).to_json())
    assert main(["scalar-inv", "--a", zero]) == 2
    non_unip = files("nu.json", NablaModule("robba-E†", [[RobbaElement(P, {(0, 0): 1})]]).to_json())
    assert main(["reduce", "--module", non_unip]) == 2


def test_unknown_module_field_rejected(files):
    doc = trivial_module("robba-E†", P).to_json()
    doc["seed"] = 3
    assert main(["cohomology", "--module", files("m.json", doc)]) == 1


def test_result_payload_round_trips(files):
    f = files("f.json", RobbaElement(P, {(1, 0): 2, (-1, 3): 1}).to_json())
    g = files("g.json", RobbaElement(P, {(2, -1): 5}).to_json())
    _, doc = run(["robba-mul", "--f", f, "--g", g])
    back = RobbaElement.from_json(doc["result"])
    assert to_jsonable(back) == doc["result"]


def test_deterministic_suite(capsys):
    outs = []
    for _ in range(2):
        assert main(["suite", "--count", "4", "--seed", "9"]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["result"]["all_equal"]


def test_emit_log_lines(files, capsys):
    poly = files("P.json", {"coeffs": [RobbaElement(P, {(1, -1): P}).to_json()]})
    assert main(["--emit", "log", "hensel-int", "--poly", poly]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) >= 2
    assert all("w" in json.loads(line) for line in lines)


def test_console_script_entry(files):
    mod = files("trivial.json", trivial_module("robba-E†", P).to_json())
    proc = subprocess.run([sys.executable, "-m", "robba_lab.cli", "cohomology", "--module", mod],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["h0"] == 1
