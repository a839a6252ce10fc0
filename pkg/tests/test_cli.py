import json

import numpy as np
import pytest

from blaschke_crit.cli import BadInput, main, resolve_config


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def cplx(pairs):
    return np.array([complex(*p) for p in pairs])


def test_solve_plus(tmp_path, capsys):
    req = write(tmp_path, "r.json", {"critical_points": [0, 0], "normalization": "plus"})
    code, rep, _ = run(capsys, "solve", "--input", req)
    assert code == 0 and rep["status"] == "ok"
    assert np.max(np.abs(cplx(rep["blaschke_zeros"]))) < 1e-10
    num = cplx(rep["numerator"])
    assert np.max(np.abs(num - [0, 0, 0, 1])) < 1e-10
    assert set(rep["halfplane"]) == {"t", "s", "a", "b"}
    d = rep["diagnostics"]
    assert d["roundtrip_error"] <= 1e-8 and d["ode_residual"] <= 1e-9
    samples = rep["boundary_samples"]
    assert len(samples["tau"]) == len(samples["arg_B"])
    # the argument of z^3 winds three times
    assert samples["arg_B"][-1] - samples["arg_B"][0] == pytest.approx(3 * samples["tau"][-1], abs=1e-9)


def test_solve_minus(tmp_path, capsys):
    req = write(tmp_path, "r.json", {"critical_points": [0], "normalization": {"minus": -1}})
    code, rep, _ = run(capsys, "solve", "--input", req)
    assert code == 0
    num, den = cplx(rep["numerator"]), cplx(rep["denominator"])
    assert np.allclose(num / den[0], [-1 / 3, 0, -1], atol=1e-14)
    assert np.allclose(den / den[0], [1, 0, 1 / 3], atol=1e-14)
    assert rep["halfplane"]["x"] == pytest.approx([-1, 1])
    assert rep["halfplane"]["r"] == pytest.approx([0.5, 0.5])


def test_solve_writes_output_file(tmp_path, capsys):
    req = write(tmp_path, "r.json", {"critical_points": [[0.2, 0.1]]})
    out = tmp_path / "rep.json"
    code, printed, _ = run(capsys, "solve", "--input", req, "--output", str(out))
    assert code == 0 and printed is None
    assert json.loads(out.read_text())["status"] == "ok"


@pytest.mark.parametrize("doc, fragment", [
    ({"critical_points": [1.5]}, "InvalidDiscPoint"),
    ({"critical_points": []}, "nonempty"),
    ({"critical_points": ["x"]}, "[re, im]"),
    ({"critical_points": [0], "normalization": "sideways"}, "normalization"),
    ({"critical_points": [0], "bogus": 1}, "unknown"),
    ("{not json", "invalid JSON"),
])
def test_solve_malformed(tmp_path, capsys, doc, fragment):
    code, out, err = run(capsys, "solve", "--input", write(tmp_path, "r.json", doc))
    assert code == 2 and out is None and fragment in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", "--input", "/nonexistent/req.json")
    assert code == 2 and "cannot read" in err


def test_bad_arguments(capsys):
    assert main(["solve"]) == 2
    assert main(["frobnicate"]) == 2


def test_equilibrium(tmp_path, capsys):
    code, out, _ = run(capsys, "equilibrium", "--zeta", write(tmp_path, "z.json", [[0, 1]]))
    assert code == 0 and out["t"] == [0.0] and out["s"] == [1.0]
    code, out, _ = run(capsys, "equilibrium", "--zeta", write(tmp_path, "z.json", [[0, 1], [0, 1]]))
    assert out["t"] == pytest.approx([-0.5773502691896258, 0.5773502691896258], abs=2e-16)
    code, out, _ = run(capsys, "equilibrium", "--zeta", write(tmp_path, "z.json", {"zeta": [[0, 1]]}),
                       "--anchor-index", "1", "--anchor-value", "-1")
    assert out["x"] == pytest.approx([-1, 1]) and out["r"] == pytest.approx([0.5, 0.5])
    code, _, err = run(capsys, "equilibrium", "--zeta", write(tmp_path, "z.json", [[0, 1]]),
                       "--anchor-index", "1")
    assert code == 2
    code, _, err = run(capsys, "equilibrium", "--zeta", write(tmp_path, "z.json", [[0, -1]]))
    assert code == 2 and "InvalidHalfPlanePoint" in err


def test_moments(tmp_path, capsys):
    code, out, _ = run(capsys, "moments", "nesterov", "--input", write(tmp_path, "c.json", {"c": [1, 0, 1]}))
    assert code == 0 and out["p"] == pytest.approx([1, 0, 1])
    code, out, _ = run(capsys, "moments", "lower", "--input", write(tmp_path, "c.json", {"c": [2, 0, 2, 0, 6]}))
    assert out["t"] == pytest.approx([-1, 1]) and out["sigma"] == pytest.approx([1, 1])
    assert out["lambda"] == pytest.approx(4)
    code, out, _ = run(capsys, "moments", "upper", "--input",
                       write(tmp_path, "c.json", {"c": [1, 0, 1], "anchor": -2}))
    assert out["x"] == pytest.approx([-2, 0.5]) and out["rho"] == pytest.approx([0.2, 0.8])
    code, out, _ = run(capsys, "moments", "factorize", "--input",
                       write(tmp_path, "c.json", {"c": [1, 0, 1], "anchor": -1}))
    assert out["deviation"] == 0
    code, out, _ = run(capsys, "moments", "inverse", "--input",
                       write(tmp_path, "c.json", {"zeta": [[0, 1]], "leading": 2}))
    assert out["c"] == pytest.approx([0.5, 0, 0.5])


def test_moments_failures(tmp_path, capsys):
    code, out, err = run(capsys, "moments", "nesterov", "--input", write(tmp_path, "c.json", {"c": [1, 2, 3]}))
    assert code == 1 and out["status"] == "failed" and out["error"] == "HankelNotPositiveDefinite"
    code, _, _ = run(capsys, "moments", "nesterov", "--input", write(tmp_path, "c.json", {"c": [1, 2]}))
    assert code == 2
    code, _, _ = run(capsys, "moments", "upper", "--input", write(tmp_path, "c.json", {"c": [1, 0, 1]}))
    assert code == 2


def test_verify_z_cubed(tmp_path, capsys):
    doc = {"numerator": [0, 0, 0, 1], "critical_points": [0, 0]}
    code, out, _ = run(capsys, "verify", "--input", write(tmp_path, "v.json", doc))
    assert code == 0 and out["diagnostics"]["roundtrip_error"] == 0


def test_verify_solve_output_and_tampering(tmp_path, capsys):
    req = write(tmp_path, "r.json", {"critical_points": [[0.3, 0.2], [0, -0.1], [-0.5, 0.4]],
                                     "normalization": {"minus": 0.25}})
    out_path = tmp_path / "rep.json"
    assert main(["solve", "--input", req, "--output", str(out_path)]) == 0
    code, out, _ = run(capsys, "verify", "--input", str(out_path))
    assert code == 0
    d = out["diagnostics"]
    assert d["roundtrip_error"] <= 1e-8 and d["ode_residual"] <= 1e-9
    rep = json.loads(out_path.read_text())
    rep["blaschke_zeros"][0][0] += 0.05
    code, out, _ = run(capsys, "verify", "--input", write(tmp_path, "t.json", rep))
    assert code == 1 and out["status"] == "failed"
    assert out["diagnostics"]["roundtrip_error"] > 1e-3


def test_verify_wrong_count(tmp_path, capsys):
    doc = {"blaschke_zeros": [0, 0, 0], "critical_points": [0]}
    code, out, _ = run(capsys, "verify", "--input", write(tmp_path, "v.json", doc))
    assert code == 1 and out["failed_checks"][0] == "critical_point_count"


def test_config_precedence():
    env = {"BLASCHKE_TOL": "1e-6", "BLASCHKE_SEED": "4", "BLASCHKE_MAX_ITER": "50"}
    assert resolve_config({}, None, {}) == {"tol": 1e-8, "seed": 0, "max_iter": 200}
    assert resolve_config({}, None, env) == {"tol": 1e-6, "seed": 4, "max_iter": 50}
    cfg = resolve_config({"seed": 9}, {"seed": 7, "tolerances": {"tol": 1e-7}}, env)
    assert cfg == {"tol": 1e-7, "seed": 9, "max_iter": 50}
    with pytest.raises(BadInput):
        resolve_config({}, None, {"BLASCHKE_SEED": "abc"})
    with pytest.raises(BadInput):
        resolve_config({"tol": -1.0}, None, {})


def test_tolerance_flag_can_force_failure(tmp_path, capsys):
    req = write(tmp_path, "r.json", {"critical_points": [[0.3, 0.2], [0.3, 0.2], [0.1, -0.6]]})
    code, out, _ = run(capsys, "solve", "--input", req, "--tol", "1e-300")
    assert code == 1 and out["status"] == "failed" and "roundtrip_error" in out["failed_checks"]
