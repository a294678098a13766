import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dwshell import cli

from conftest import example2_systems


def write_matrix(path, m, name="m"):
    m = np.asarray(m, dtype=complex)
    doc = {"schema": cli.SCHEMA, "name": name, "dim": m.shape[0],
           "entries": [[float(v.real), float(v.imag)] for v in m.ravel()]}
    path.write_text(json.dumps(doc))
    return str(path)


def write_system(path, sys_obj, name="sys"):
    def block(mat):
        mat = np.atleast_2d(np.asarray(mat, dtype=float))
        return {"shape": list(mat.shape), "data": [float(v) for v in mat.ravel()]}

    doc = {"schema": cli.SCHEMA, "name": name,
           "state_space": {"A": block(sys_obj.A), "B": block(sys_obj.B),
                           "C": block(sys_obj.C), "D": block(sys_obj.D)}}
    path.write_text(json.dumps(doc))
    return str(path)


def test_cmd_shell_identity(tmp_path, capsys):
    p = write_matrix(tmp_path / "a.json", np.eye(2))
    out = tmp_path / "res.json"
    code = cli.main(["shell", p, "--points", "100", "--output", str(out),
                     "--csv", str(tmp_path / "pts.csv"), "--svg", str(tmp_path / "p.svg")])
    assert code == cli.EXIT_OK
    res = json.loads(out.read_text())
    pts = np.array(res["points"])
    assert np.allclose(pts[:, 0], 1.0) and np.allclose(pts[:, 1], 0.0)
    assert np.allclose(pts[:, 2], 1.0)
    assert (tmp_path / "pts.csv").read_text().startswith("z_re,z_im,nu")
    assert "<svg" in (tmp_path / "p.svg").read_text()


def test_cmd_shell_nilpotent_sphere(tmp_path):
    p = write_matrix(tmp_path / "n.json", [[0, 1], [0, 0]])
    out = tmp_path / "res.json"
    assert cli.main(["shell", p, "--output", str(out)]) == cli.EXIT_OK
    pts = np.array(json.loads(out.read_text())["points"])
    resid = np.abs(pts[:, 0] ** 2 + pts[:, 1] ** 2 + (pts[:, 2] - 0.5) ** 2 - 0.25)
    assert resid.max() < 1e-8


def test_cmd_shell_inverse(tmp_path):
    p = write_matrix(tmp_path / "d.json", np.diag([1.0, 2.0]))
    out = tmp_path / "res.json"
    assert cli.main(["shell", p, "--inverse", "--output", str(out)]) == cli.EXIT_OK
    res = json.loads(out.read_text())
    pts = np.array(res["points"])
    # inverse shell of diag(1,2) = shell of diag(1, 1/2): gains within [1/4, 1]
    assert pts[:, 2].min() >= 0.25 - 1e-9
    assert pts[:, 2].max() <= 1.0 + 1e-9
    assert res["truncated"] is False


def test_cmd_shell_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["shell", str(bad)]) == cli.EXIT_INPUT
    bad2 = tmp_path / "bad2.json"
    bad2.write_text(json.dumps({"dim": 2, "entries": [[0, 0]]}))
    assert cli.main(["shell", str(bad2)]) == cli.EXIT_INPUT


def test_cmd_srg_example1_phases(tmp_path):
    a = np.diag([-1j, 1.0])
    p = write_matrix(tmp_path / "a.json", a)
    out = tmp_path / "res.json"
    code = cli.main(["srg", p, "--theta", "-0.7853981633974483",
                     "--output", str(out)])
    assert code == cli.EXIT_OK
    res = json.loads(out.read_text())
    assert res["phase_interval"]["lo"] == pytest.approx(math.pi / 4, abs=1e-6)
    assert res["phase_interval"]["hi"] == pytest.approx(math.pi / 4, abs=1e-6)


def test_cmd_srg_nilpotent_phases(tmp_path):
    p = write_matrix(tmp_path / "n.json", [[0, 1], [0, 0]])
    out = tmp_path / "res.json"
    assert cli.main(["srg", p, "--output", str(out)]) == cli.EXIT_OK
    res = json.loads(out.read_text())
    assert res["phase_interval"]["lo"] == 0.0
    assert res["phase_interval"]["hi"] == pytest.approx(math.pi)


def test_cmd_srg_ssg(tmp_path):
    p = write_matrix(tmp_path / "i.json", [[1j]])
    out = tmp_path / "res.json"
    assert cli.main(["srg", p, "--ssg", "--output", str(out)]) == cli.EXIT_OK
    res = json.loads(out.read_text())
    up = np.array([complex(re, im) for re, im in res["upper"]["vertices"]])
    assert np.max(np.abs(up - 1j)) < 1e-9
    assert res["lower"]["vertices"] == []


def test_cmd_separate_example1(tmp_path):
    a = write_matrix(tmp_path / "a.json", np.diag([-1j, 1.0]))
    b = write_matrix(tmp_path / "b.json", np.exp(-1j * 3 * math.pi / 4) * np.eye(2))
    out = tmp_path / "r1.json"
    code = cli.main(["separate", a, b, "--condition", "theta_srg_phase",
                     "--output", str(out)])
    assert code == cli.EXIT_OK
    res = json.loads(out.read_text())
    assert res["verdict"]["witness_theta"] == pytest.approx(math.pi / 4, abs=0.02)
    code2 = cli.main(["separate", a, b, "--condition", "sectorial_phase",
                      "--output", str(tmp_path / "r2.json")])
    assert code2 == cli.EXIT_FAIL


def test_cmd_separate_identity_conflict(tmp_path):
    a = write_matrix(tmp_path / "a.json", np.eye(2))
    b = write_matrix(tmp_path / "b.json", -np.eye(2))
    out = tmp_path / "res.json"
    code = cli.main(["separate", a, b, "--condition", "dw_separation",
                     "--output", str(out)])
    assert code == cli.EXIT_FAIL
    res = json.loads(out.read_text())
    assert res["verdict"]["status"] == "intersecting"
    assert res["verdict"]["witness_point"]["nu"] == pytest.approx(1.0, abs=1e-6)


def test_cmd_separate_dim_mismatch(tmp_path):
    a = write_matrix(tmp_path / "a.json", np.eye(2))
    b = write_matrix(tmp_path / "b.json", np.eye(3))
    assert cli.main(["separate", a, b]) == cli.EXIT_INPUT


def test_cmd_separate_all_runs_audit(tmp_path):
    a = write_matrix(tmp_path / "a.json", 0.2 * np.eye(2))
    b = write_matrix(tmp_path / "b.json", 0.2 * np.eye(2))
    out = tmp_path / "res.json"
    code = cli.main(["separate", a, b, "--condition", "all", "--output", str(out)])
    assert code == cli.EXIT_OK
    res = json.loads(out.read_text())
    assert res["implication_violations"] == []
    assert res["verdicts"]["small_gain"]["status"] == "separated"


def test_cmd_stability_example2(tmp_path):
    g, h = example2_systems()
    gp = write_system(tmp_path / "g.json", g)
    hp = write_system(tmp_path / "h.json", h)
    out = tmp_path / "res.json"
    grid = [str(w) for w in np.logspace(-1, 1, 4)]
    code = cli.main(["stability", gp, hp, "--method", "dw", "--mu", "7",
                     "--grid", *grid, "--output", str(out)])
    assert code == cli.EXIT_OK
    res = json.loads(out.read_text())
    assert res["overall"] == "certified"
    code2 = cli.main(["stability", gp, hp, "--method", "gain_phase",
                      "--output", str(tmp_path / "r2.json")])
    assert code2 == cli.EXIT_FAIL
    code3 = cli.main(["stability", gp, hp, "--method", "nyquist",
                      "--csv", str(tmp_path / "loci.csv"),
                      "--output", str(tmp_path / "r3.json")])
    assert code3 == cli.EXIT_OK
    assert (tmp_path / "loci.csv").read_text().startswith("omega,")


def test_cmd_stability_counterexample(tmp_path):
    from dwshell.stability import StateSpaceSystem

    eye = StateSpaceSystem(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((2, 0)), np.eye(2))
    neg = StateSpaceSystem(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((2, 0)), -np.eye(2))
    gp = write_system(tmp_path / "g.json", eye)
    hp = write_system(tmp_path / "h.json", neg)
    out = tmp_path / "res.json"
    code = cli.main(["stability", gp, hp, "--method", "dw", "--grid", "1.0",
                     "--mu", "5", "--output", str(out)])
    assert code == cli.EXIT_FAIL
    res = json.loads(out.read_text())
    assert res["overall"] == "counterexample"


def test_cmd_stability_unstable_rejected(tmp_path):
    from dwshell.stability import StateSpaceSystem

    bad = StateSpaceSystem(A=[[0.2]], B=[[1.0]], C=[[1.0]], D=[[0.0]])
    gp = write_system(tmp_path / "g.json", bad)
    hp = write_system(tmp_path / "h.json", bad)
    assert cli.main(["stability", gp, hp]) == cli.EXIT_INPUT


def test_result_roundtrip_deterministic(tmp_path):
    a = write_matrix(tmp_path / "a.json", np.diag([-1j, 1.0]))
    b = write_matrix(tmp_path / "b.json", np.exp(-1j * 3 * math.pi / 4) * np.eye(2))
    o1, o2 = tmp_path / "r1.json", tmp_path / "r2.json"
    cli.main(["separate", a, b, "--condition", "srg_standard", "--output", str(o1)])
    cli.main(["separate", a, b, "--condition", "srg_standard", "--output", str(o2)])
    assert o1.read_text() == o2.read_text()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dwshell.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "separate" in proc.stdout
