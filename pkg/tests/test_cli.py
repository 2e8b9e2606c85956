import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from curvspec import __version__, builtin, dump_metric
from curvspec.cli import main

GOLDEN = Path(__file__).parent / "golden"
SCHW_ARGS = ["--builtin", "schwarzschild", "--param", "rs=2", "--at", "t=0,r=3,theta=1.2,phi=0"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def normalize(value, floor=1e-12):
    """Round floats to 10 significant digits; roundoff-sized values become 0."""
    if isinstance(value, float):
        if abs(value) < floor:
            return 0.0
        return float(f"{value:.10g}")
    if isinstance(value, list):
        return [normalize(v, floor) for v in value]
    if isinstance(value, dict):
        return {k: normalize(v, floor) for k, v in value.items()}
    return value


def test_curvature_schwarzschild(capsys):
    doc = run_json(capsys, "curvature", *SCHW_ARGS)
    assert set(doc) == {"command", "metric", "point", "results", "residuals", "version"}
    assert doc["command"] == "curvature"
    assert doc["version"] == __version__
    assert doc["point"] == {"t": 0.0, "r": 3.0, "theta": 1.2, "phi": 0.0}
    assert doc["results"]["kretschmann"] == pytest.approx(48 / 729, abs=1e-10)
    assert doc["results"]["ricci_max_abs"] < 1e-8
    assert max(doc["residuals"].values()) < 1e-10


def test_meig_sphere(capsys):
    doc = run_json(capsys, "meig", "--builtin", "sphere2", "--param", "a=1", "--at", "theta=1.0,phi=0", "--modified")
    assert any(abs(t - 1.0) < 1e-8 for t in doc["results"]["theta"])
    assert doc["results"]["count"] == len(doc["results"]["pairs"]) > 0
    assert doc["residuals"]["max_residual"] < 1e-10


def test_meig_unmodified_includes_zero(capsys):
    doc = run_json(capsys, "meig", "--builtin", "sphere2", "--param", "a=1", "--at", "theta=1.0,phi=0")
    assert doc["results"]["modified"] is False
    assert any(abs(t) < 1e-8 for t in doc["results"]["theta"])
    assert any(abs(t - 1.0) < 1e-8 for t in doc["results"]["theta"])


def test_check_euclidean(capsys):
    code, out, err = run_cli(capsys, "check", "--builtin", "euclidean", "--param", "n=3", "--at", "x=0,y=0,z=0")
    assert code == 0, err
    assert "ok: true" in out
    doc = run_json(capsys, "check", "--builtin", "euclidean", "--param", "n=3", "--at", "x=0,y=0,z=0")
    rows = doc["results"]["rows"]
    assert rows
    assert all(abs(r["computed"]) < 1e-30 and r["abs_dev"] < 1e-30 for r in rows)


def test_check_defaults_to_catalog_point(capsys):
    doc = run_json(capsys, "check", "--builtin", "schwarzschild")
    assert doc["point"]["r"] == 3.0
    assert doc["results"]["ok"] is True


def test_classical_vacuum_block(capsys):
    doc = run_json(capsys, "classical", *SCHW_ARGS)
    zetas = sorted(z[0] for z in doc["results"]["zeta"])
    assert zetas == pytest.approx([-2 / 27] * 4 + [4 / 27] * 2, abs=1e-10)
    assert all(abs(z[1]) < 1e-12 for z in doc["results"]["zeta"])
    assert doc["results"]["pairs"] == [[1, 0], [2, 0], [3, 0], [2, 3], [3, 1], [1, 2]]
    res = doc["residuals"]
    assert res["structure"] < 1e-8 and abs(res["trace_n"]) < 1e-8 and abs(res["trace_m_plus_kappa"]) < 1e-8


def test_sectional(capsys):
    doc = run_json(capsys, "sectional", "--builtin", "sphere2", "--param", "a=2", "--at", "theta=0.7,phi=1", "--u", "1,0", "--v", "0.3,1")
    assert doc["results"]["sectional"] == pytest.approx(0.25, abs=1e-12)


def test_jacobi_command(capsys, tmp_path):
    csv_path = tmp_path / "field.csv"
    half_pi = repr(math.pi / 2)
    doc = run_json(
        capsys,
        "jacobi", "--builtin", "sphere2", "--at", f"theta={half_pi},phi=0",
        "--u0", "0,1", "--v0", "0,0", "--w0", "1,0",
        "--t-max", half_pi, "--steps", "2000", "--csv", str(csv_path),
    )
    assert doc["results"]["norm_v_final"] == pytest.approx(1.0, abs=1e-6)
    assert doc["residuals"]["tangent_norm_drift"] < 1e-10
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,x0,x1,u0,u1,v0,v1,norm_v"
    assert len(lines) == 2002


def test_text_format_uses_12_digits(capsys):
    code, out, _ = run_cli(capsys, "curvature", *SCHW_ARGS)
    assert code == 0
    assert "kretschmann: 0.0658436213992" in out
    assert out.startswith("curvature: schwarzschild at t=0, r=3, theta=1.2, phi=0")


def test_metric_file(capsys, tmp_path):
    path = tmp_path / "schw.json"
    dump_metric(builtin("schwarzschild", {"rs": 2.0}).spec, path)
    from_file = run_json(capsys, "curvature", "--metric", str(path), "--at", "t=0,r=3,theta=1.2,phi=0")
    from_builtin = run_json(capsys, "curvature", *SCHW_ARGS)
    assert from_file["results"] == from_builtin["results"]
    assert from_file["metric"]["source"] == "file"
    rescaled = run_json(capsys, "curvature", "--metric", str(path), "--param", "rs=1", "--at", "t=0,r=3,theta=1.2,phi=0")
    # K1 = 12 rs^2 / r^6
    assert rescaled["results"]["kretschmann"] == pytest.approx(12 / 729, abs=1e-12)


def test_seed_determinism(capsys):
    argv = ["meig", "--builtin", "perturbed3", "--at", "r=1,theta=1.0471975511965976,phi=0", "--seed", "5", "--starts", "12"]
    first = run_json(capsys, *argv)
    second = run_json(capsys, *argv)
    assert first == second
    other = run_json(capsys, *argv[:-4], "--seed", "6", "--starts", "12")
    assert other["results"]["pairs"] != first["results"]["pairs"]


def test_starts_env(capsys, monkeypatch):
    argv = ["meig", "--builtin", "sphere2", "--at", "theta=1,phi=0", "--modified"]
    monkeypatch.setenv("CURVSPEC_STARTS", "3")
    assert run_json(capsys, *argv)["results"]["count"] <= 3
    assert run_json(capsys, *argv, "--starts", "7")["results"]["count"] <= 7
    monkeypatch.setenv("CURVSPEC_STARTS", "many")
    code, _, err = run_cli(capsys, *argv)
    assert code == 2 and "CURVSPEC_STARTS" in err


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["curvature", "--builtin", "sphere2", "--at", "theta=1"], "phi"),
        (["curvature", "--builtin", "sphere2", "--at", "theta=1,phi=0,psi=2"], "psi"),
        (["curvature", "--builtin", "sphere2", "--at", "theta=x,phi=0"], "theta"),
        (["curvature", "--builtin", "sphere2", "--param", "a", "--at", "theta=1,phi=0"], "--param"),
        (["curvature", "--builtin", "sphere2", "--param", "a=-1", "--at", "theta=1,phi=0"], "a"),
        (["curvature", "--builtin", "kerr", "--at", "t=0"], "kerr"),
        (["curvature", "--builtin", "sphere2"], "--at"),
        (["sectional", "--builtin", "sphere2", "--at", "theta=1,phi=0", "--u", "1,0,0", "--v", "0,1"], "--u"),
        (["curvature", "--metric", "/nonexistent/metric.json", "--at", "x=0"], "metric.json"),
    ],
)
def test_input_errors_exit_2(capsys, argv, fragment):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2
    assert out == ""
    assert fragment in err


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["curvature", "--frobnicate"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["curvature", "--builtin", "sphere2", "--metric", "m.json", "--at", "theta=1,phi=0"])
    assert info.value.code == 2


def test_numerical_failure_exit_3(capsys):
    code, out, err = run_cli(capsys, "curvature", "--builtin", "schwarzschild", "--at", "t=0,r=2,theta=1,phi=0")
    assert code == 3
    assert "SingularPoint" in err
    code, _, err = run_cli(capsys, "curvature", "--builtin", "sphere2", "--at", "theta=0,phi=0")
    assert code == 3


def test_bad_metric_file_exit_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"coords": ["x", "y"], "components": {"0,0": "1 +", "1,1": "1"}}))
    code, _, err = run_cli(capsys, "curvature", "--metric", str(path), "--at", "x=0,y=0")
    assert code == 2
    assert "0,0" in err


@pytest.mark.parametrize(
    "name, argv",
    [
        ("curvature_schwarzschild", ["curvature", *SCHW_ARGS]),
        ("classical_sphere3", ["classical", "--builtin", "sphere3", "--param", "a=2", "--at", "chi=1,theta=0.8,phi=0.1"]),
        ("check_sphere2", ["check", "--builtin", "sphere2", "--param", "a=1", "--at", "theta=1.0471975511965976,phi=0"]),
    ],
)
def test_golden_json(capsys, name, argv):
    doc = run_json(capsys, *argv)
    expected = json.loads((GOLDEN / f"{name}.json").read_text())
    assert normalize(doc) == normalize(expected)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "curvspec", "curvature", *SCHW_ARGS, "--format", "json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["results"]["kretschmann"] == pytest.approx(48 / 729, abs=1e-10)


DEMOS = sorted((Path(__file__).parent.parent / "demos").glob("*.py"))


@pytest.mark.parametrize("script", DEMOS, ids=[p.stem for p in DEMOS])
def test_demo_scripts_run(script):
    proc = subprocess.run([sys.executable, str(script)], capture_output=True, text=True, check=False, timeout=300)
    assert proc.returncode == 0, proc.stderr
