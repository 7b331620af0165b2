from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

from planebranch import cli
from planebranch.formats import REPORT_SCHEMA

G0 = {"n": 6, "y": [[7, "1"], [10, "1"], [11, "1"]], "trunc": 40}
CUSP = {"n": 2, "y": [[3, "1"]], "trunc": 12}
X_DY = {"A": [], "B": [[1, 0, "1"]]}
REFLECT = {"x": [[1, 0, "1"], [2, 0, "1"], [0, 2, "1"]], "y": [[0, 1, "-1"]], "order": 2}
ROTATE = {"x": [[1, 0, "z^4"], [0, 2, "1"]], "y": [[0, 1, "z^8"], [2, 0, "1"]], "order": 2}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return write


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, json.loads(out.out) if out.out else None, out.err


def test_invariants_on_g0(capsys, files):
    code, rep, _ = run(capsys, "invariants", files("g0.json", G0))
    assert code == 0 and rep["schema"] == REPORT_SCHEMA
    r = rep["result"]
    assert (r["lambda"], r["conductor"], r["generators"]) == (10, 30, [6, 7])
    assert 11 not in r["contact_set_to_conductor"]
    assert r["multiplicity_sequence"] == [6, 1]


def test_contact_cusp(capsys, files):
    code, rep, _ = run(capsys, "contact", files("c.json", CUSP), files("x.json", X_DY))
    r = rep["result"]
    assert code == 0
    assert (r["upsilon"], r["contact_exponent"], r["tangency_order"]) == (4, 2, 5)
    assert r["iterated_tangency"][:2] == [5, 4]
    assert r["shared_path"]["mults"] == [2, 1] and r["noether"] == 4


def test_contact_invariant_branch(capsys, files):
    euler = {"A": [[1, 0, "2"]], "B": [[0, 1, "3"]]}
    code, rep, _ = run(capsys, "contact", files("c.json", CUSP), files("e.json", euler))
    assert code == 0 and rep["result"]["invariant"]
    assert "invariant_up_to" in rep["result"]["contact_exponent"]


def test_deform_and_shared_path(capsys, files):
    c, x = files("c.json", CUSP), files("x.json", X_DY)
    code, rep, _ = run(capsys, "deform", c, x, "--trunc-eps", "1")
    assert code == 0 and rep["result"]["first_moving_exponent"] == 2
    assert [2, ["0", "1"]] in rep["result"]["y"]
    code, rep, _ = run(capsys, "shared-path", c, x)
    assert code == 0 and rep["result"]["shared_path"]["N"] == 1


def test_normal_form_transcript_and_verify(capsys, files, tmp_path):
    src = files("b.json", {"n": 2, "y": [[3, "1"], [4, "1"], [5, "1"]], "trunc": 12})
    out = str(tmp_path / "nf.json")
    code, rep, _ = run(capsys, "normal-form", src, "--out", out)
    assert code == 0 and rep is None
    rep = json.loads(open(out).read())
    r = rep["result"]
    assert r["output"]["y"] == [[3, "1"]]
    assert [s["j"] for s in r["steps"] if s["s0"] != "0"] == [4, 5]
    code, ver, _ = run(capsys, "verify", out)
    assert code == 0 and ver["result"]["verified"]


def test_verify_detects_tampering(capsys, files, tmp_path):
    src = files("b.json", {"n": 2, "y": [[3, "1"], [4, "1"]], "trunc": 12})
    out = str(tmp_path / "nf.json")
    run(capsys, "normal-form", src, "--out", out)
    rep = json.loads(open(out).read())
    rep["result"]["output"]["y"] = [[3, "1"], [4, "1"]]
    bad = files("bad.json", rep)
    code, err, _ = run(capsys, "verify", bad)
    assert code == 4 and err["error"] == "cross-check"


def test_equivalence_and_stabilizer(capsys, files):
    g0 = files("g0.json", G0)
    other = files("o.json", {"n": 6, "y": [[7, "1"], [10, "1"], [11, "-1"]], "trunc": 40})
    code, rep, _ = run(capsys, "equivalence", g0, other)
    assert code == 0 and rep["result"]["equivalent"] is False
    code, rep, _ = run(capsys, "equivalence", g0, g0)
    assert rep["result"]["equivalent"] is True
    code, rep, _ = run(capsys, "stabilizer", g0)
    assert code == 0 and rep["result"]["stabilizer_jet2"]["dimension"] == 0


def test_embeddability(capsys, files):
    g0 = files("g0.json", G0)
    for jet in (REFLECT, ROTATE):
        code, rep, _ = run(capsys, "embeddability", files("j.json", jet), g0)
        cert = rep["result"]["certificate"]
        assert code == 0 and cert["certified"]
        assert cert["resonance"]["verdict"] == "Obstructed"
    code, rep, _ = run(capsys, "embeddability", files("j.json", REFLECT))
    assert rep["result"]["certificate"]["verdict"] == "Obstructed"


def test_parse_errors_exit_2(capsys, files):
    code, rep, err = run(capsys, "invariants", files("bad.json", "{not json"))
    assert code == 2 and rep["error"] == "parse" and "invalid JSON" in err
    code, rep, _ = run(capsys, "invariants", files("bad2.json", {"n": 2, "y": [[1, "1"]]}))
    assert code == 2
    code, rep, _ = run(capsys, "invariants", files("bad3.json", {"n": 2, "y": [[3, "1/0x"]]}))
    assert code == 2
    code, rep, _ = run(capsys, "invariants", str(files("ok.json", CUSP)) + ".missing")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2
    capsys.readouterr()
    code, rep, _ = run(capsys, "invariants", files("c.json", CUSP), "--trunc-t", "0")
    assert code == 2


def test_math_errors_exit_3(capsys, files):
    scaled = files("s.json", {"n": 6, "y": [[7, "1"], [10, "2"], [11, "1"]], "trunc": 40})
    code, rep, _ = run(capsys, "normal-form", scaled)
    assert code == 3 and rep["error"] == "not-representable"
    code, rep, _ = run(capsys, "normal-form", scaled, "--scale", "skip")
    assert code == 0 and rep["result"]["scaling"]["constraints"]["u^(lambda-m)"] == "2"
    code, rep, _ = run(capsys, "invariants", files("t.json", {"n": 4, "y": [[6, "1"], [9, "1"]]}),
                       "--trunc-t", "9")
    assert code == 3 and rep["error"] == "truncation"
    regular = files("r.json", {"A": [[0, 0, "1"]], "B": []})
    code, rep, _ = run(capsys, "contact", files("c.json", CUSP), regular)
    assert code == 3 and rep["error"] == "not-singular"


def test_cross_check_mismatch_exit_4(capsys, files, monkeypatch):
    monkeypatch.setattr(cli, "contact_exponent_deformation", lambda *a, **k: 99)
    code, rep, _ = run(capsys, "contact", files("c.json", CUSP), files("x.json", X_DY))
    assert code == 4 and rep["error"] == "cross-check"


def test_reports_are_deterministic(capsys, files):
    src = files("b.json", {"n": 4, "y": [[6, "1"], [7, "1"], [9, "3"]], "trunc": 40})
    first = run(capsys, "normal-form", src)[1]
    second = run(capsys, "normal-form", src)[1]
    assert first == second


def test_several_inputs_in_parallel(capsys, files):
    paths = [files("a.json", G0), files("b.json", CUSP)]
    code, seq, _ = run(capsys, "invariants", *paths)
    code2, par, _ = run(capsys, "invariants", *paths, "--jobs", "2")
    assert code == code2 == 0
    assert seq["result"] == par["result"]
    assert [j["result"]["n"] for j in par["result"]["jobs"]] == [6, 2]


def test_atomic_write_leaves_no_temporaries(capsys, files, tmp_path):
    out = tmp_path / "r.json"
    out.write_text("old")
    cli.main(["invariants", files("c.json", CUSP), "--out", str(out)])
    assert json.loads(out.read_text())["status"] == "ok"
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "planebranch", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "planebranch" in proc.stdout
