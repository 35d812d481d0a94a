import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from reeb_lab import io
from reeb_lab.cli import main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out), out


def strip_timestamp(text):
    d = json.loads(text)
    d["header"].pop("timestamp")
    return io.dumps(d)


def test_realize_feasible(capsys):
    code, rep, _ = run_json(capsys, ["realize", "--n", "2", "--k", "45"])
    assert code == 0
    assert (rep["b"], rep["c"], rep["plugs"]) == (6, 0, 0)
    assert rep["trace"][-1] == 45
    assert rep["schema_version"] == "1" and rep["seed"] == 0


def test_realize_infeasible(capsys):
    code, rep, _ = run_json(capsys, ["realize", "--n", "1", "--k", "1"])
    assert code == 1 and rep["feasible"] is False


def test_realize_reeb(capsys):
    code, rep, _ = run_json(capsys, ["realize", "--reeb", "--n", "2", "--k", "7"])
    assert code == 0 and rep["a"] == 4


def test_reports_are_deterministic(capsys):
    a = run_json(capsys, ["verify", "--suite", "pullback"])[2]
    b = run_json(capsys, ["verify", "--suite", "pullback"])[2]
    assert strip_timestamp(a) == strip_timestamp(b)


def test_verify_suites(capsys):
    code, rep, _ = run_json(capsys, ["verify", "--suite", "structure-equations", "--suite", "pullback"])
    assert code == 0 and rep["passed"]
    assert [s["suite"] for s in rep["suites"]] == ["structure-equations", "pullback"]
    assert all("value" in c and "bound" in c for s in rep["suites"] for c in s["checks"])


def test_verify_unknown_suite(capsys):
    assert main(["verify", "--suite", "nonsense"]) == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["flow", "--theta", "1"])  # no flow kind
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["realize", "--n", "two", "--k", "3"])
    assert info.value.code == 2
    assert main(["flow", "--deformed", "--eps", "1.0"]) == 2
    assert main(["flow", "--reeb", "--eps", "0.3"]) == 2
    assert main(["orbits", "--grid", "10"]) == 2


def test_flow_csv_layout(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["flow", "--reeb", "--theta", "1.0472", "--t", "12.5664", "--dt", "0.001", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# flow=contact ")
    assert lines[1] == "t,u0,u1,u2,u3,constraint_drift,energy_drift"
    assert lines[-1].startswith("# closure ")
    with out.open() as fh:
        meta, cols, data = io.read_trajectory_csv(fh)
    assert data.shape == (12567, 7)
    assert float(meta["closure"]["distance"]) < 1e-8
    assert float(meta["closure"]["period"]) == pytest.approx(4 * np.pi, abs=1e-9)


def test_deformed_eps_zero_equals_reeb_theta_zero(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["flow", "--deformed", "--eps", "0", "--t", "3", "--out", str(a)])
    main(["flow", "--reeb", "--theta", "0", "--t", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_deg_flag(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["flow", "--reeb", "--theta", "90", "--deg", "--t", "1", "--out", str(a)])
    main(["flow", "--reeb", "--theta", str(np.pi / 2), "--t", "1", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_magnetic_energy_column(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["flow", "--magnetic", "--s", "1.0", "--t", "3", "--out", str(out)]) == 0
    with out.open() as fh:
        _, cols, data = io.read_trajectory_csv(fh)
    assert cols[1:7] == ["x0", "x1", "x2", "p0", "p1", "p2"]
    assert data[:, -1].max() < 1e-8


def test_project_from_trajectory(tmp_path, capsys):
    out = tmp_path / "r.csv"
    main(["flow", "--reeb", "--theta", "1.0", "--out", str(out)])
    code, rep, _ = run_json(capsys, ["project", "--in", str(out)])
    assert code == 0
    assert rep["latitude_fit"]["winding"] == 2
    assert rep["latitude_fit"]["angle"] == pytest.approx(1.0, abs=1e-9)


def test_project_point(capsys):
    code, rep, _ = run_json(capsys, ["project", "--u0", "1,0,0,0"])
    assert code == 0 and rep["points"][0]["stereo"] == [0.0, 0.0]


def test_holonomy(capsys):
    code, rep, _ = run_json(capsys, ["holonomy", "--theta", "60", "--deg", "--axis", "k"])
    assert code == 0 and rep["distance"] < 1e-5


def test_orbits_ellipsoid(capsys):
    code, rep, _ = run_json(capsys, ["orbits", "--weights", "1,1.4142135623730951,1.7320508075688772"])
    assert code == 0 and rep["count"] == 3
    code, rep, _ = run_json(capsys, ["orbits", "--weights", "2,3"])
    assert rep["verdict"] == "resonant family detected"


def test_orbits_scan(capsys):
    code, rep, _ = run_json(capsys, ["orbits", "--eps", "0.70710678", "--grid", "1000"])
    assert code == 0 and rep["count"] == 2


def test_finsler_check(capsys):
    code, rep, _ = run_json(capsys, ["finsler-check", "--fibres", "20", "--samples", "1000"])
    assert code == 0 and rep["convex"]
    assert len(rep["per_fibre_min_eigenvalues"]) == 20
    assert rep["residuals"]["randers_identity"] < 1e-13


@pytest.mark.skipif(shutil.which("reeb-lab") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["reeb-lab", "realize", "--n", "1", "--k", "1"], capture_output=True, text=True)
    assert r.returncode == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "reeb_lab", "verify", "--suite", "nonsense"],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "unknown suite" in r.stderr
