import json
import math

import numpy as np
import pytest

from sigmasurf import cli, io
from sigmasurf.config import ConfigError, Tolerances, parse_config


def test_defaults():
    cfg = parse_config("")
    assert cfg.family == "tanh" and cfg.grid == (201, 201) and cfg.mode == "analytic"
    tol = cfg.tolerances.resolved("fd")
    assert tol.el == 1e-5 and tol.curvature == 1e-3
    assert Tolerances().resolved("analytic").el == 1e-10


def test_parse_sections_and_overrides():
    text = """
[family]
name = piette
lam = 1.1+1.1i   # complex with an i suffix

[grid]
size = 21, 31
domain = -1, 1, -2, 2

[tolerances]
sine_gordon = 1e-3
"""
    cfg = parse_config(text, ["derivatives.mode=fd", "grid.size=11,11"])
    assert cfg.family_params().lam == 1.1 + 1.1j
    assert cfg.grid == (11, 11) and cfg.mode == "fd"
    assert cfg.resolved_domain == (-1, 1, -2, 2)
    assert cfg.tolerances.sine_gordon == 1e-3
    gl, gr = cfg.axes()
    assert len(gl) == 11 and gr[0] == -2


@pytest.mark.parametrize(
    "text,overrides",
    [
        ("[family]\nname = nope", ()),
        ("[grid]\nsize = 3, 3", ()),
        ("[grid]\ndomain = 1, 0, 0, 1", ()),
        ("[grid]\nbogus = 1", ()),
        ("[tolerances]\nel = -1", ()),
        ("[family]\nname = tanh\nzeta = 1", ()),
        ("[family]\nname = tanh\na = 0", ()),
        ("not a config", ()),
        ("", ("no_dot=1",)),
        ("", ("derivatives.fd_order=3",)),
        ("", ("output.pca3=maybe",)),
    ],
)
def test_config_errors(text, overrides):
    with pytest.raises(ConfigError):
        parse_config(text, overrides).family_params()


def test_fmt():
    assert io.fmt(0.1) == "0.10000000000000001"
    assert io.fmt(float("nan")) == "nan" and io.fmt(-math.inf) == "-inf"


def test_json_round_trip():
    obj = {"a": [1.5, 2, None], "b": {"c": True, "d": "x\"y"}, "e": np.float64(0.25), "f": []}
    back = json.loads(io.dumps(obj))
    assert back == {"a": [1.5, 2, None], "b": {"c": True, "d": "x\"y"}, "e": 0.25, "f": []}
    assert json.loads(io.dumps({"x": float("inf")}))["x"] is None
    with pytest.raises(TypeError):
        io.dumps({"x": object()})


def test_obj_faces(tmp_path):
    p = tmp_path / "m.obj"
    io.write_obj(p, np.zeros((6, 3)), (2, 3), comment="c")
    lines = p.read_text().splitlines()
    assert lines[0] == "# c"
    assert sum(l.startswith("v ") for l in lines) == 6
    assert [l for l in lines if l.startswith("f ")] == ["f 1 4 5 2", "f 2 5 6 3"]


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_default_passes(capsys):
    code, out, err = _run(["verify", "--grid", "21,21"], capsys)
    assert code == cli.EXIT_OK
    report = json.loads(out)
    assert report["passed"] and {c["name"] for c in report["checks"]} >= {"projector", "euler_lagrange"}
    assert "wall_time" not in out
    assert "PASS" in err


def test_verify_control_fails(capsys):
    code, out, _ = _run(["verify", "--grid", "21,21", "--param", "family.name=control"], capsys)
    assert code == cli.EXIT_FAIL
    assert not json.loads(out)["passed"]


def test_verify_timing_flag(capsys):
    _, out, _ = _run(["verify", "--grid", "11,11", "--timing"], capsys)
    assert all("wall_time" in c for c in json.loads(out)["checks"])


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--param", "family.name=unknown"],
        ["verify", "--config", "/nonexistent/file.ini"],
        ["sine-gordon", "--velocity", "1.5", "--times", "0"],
        ["sine-gordon", "--velocity", "comoving", "--times", "0"],
        ["frame", "--param", "family.name=vacuum"],
    ],
)
def test_usage_errors_exit_2(argv, capsys, tmp_path):
    code, _, err = _run(argv + ["--out", str(tmp_path)], capsys)
    assert code == cli.EXIT_USAGE
    assert err.startswith("error:")


def test_verify_is_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert _run(["verify", "--grid", "21,21", "--out", str(tmp_path / d)], capsys)[0] == 0
    assert (tmp_path / "a" / "verify.json").read_bytes() == (tmp_path / "b" / "verify.json").read_bytes()


def test_surface_outputs(tmp_path, capsys):
    code, out, _ = _run(["surface", "--grid", "21,25", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["surface.csv", "surface.obj"]
    lines = (tmp_path / "surface.csv").read_text().splitlines()
    assert lines[0] == "xi_L,xi_R,X1,X2,X3,K,phi"
    assert len(lines) == 1 + 21 * 25
    rows = np.array([[float(v) for v in l.split(",")] for l in lines[1:]])
    K = rows[:, 5]
    assert np.nanmax(np.abs(K[np.isfinite(K)] + 4)) < 1e-6


def test_surface_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        _run(["surface", "--grid", "15,15", "--out", str(tmp_path / d)], capsys)
    for name in ("surface.csv", "surface.obj"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_surface_su3_needs_pca_for_obj(tmp_path, capsys):
    code, _, _ = _run(["surface", "--grid", "11,11", "--param", "family.embed=3", "--out", str(tmp_path / "a")], capsys)
    assert code == 0 and not (tmp_path / "a" / "surface.obj").exists()
    code, _, _ = _run(["surface", "--grid", "11,11", "--param", "family.embed=3", "--pca3",
                       "--out", str(tmp_path / "b")], capsys)
    assert code == 0
    obj = (tmp_path / "b" / "surface.obj").read_text()
    assert obj.startswith("# PCA")
    header = (tmp_path / "b" / "surface.csv").read_text().splitlines()[0]
    assert header.endswith("pca3_nonisometric") and "X8" in header


def test_sine_gordon_slices(tmp_path, capsys):
    code, out, _ = _run(["sine-gordon", "--times=-1,0,2", "--param", "family.b=-0.25",
                         "--param", "sine_gordon.x=-5,5,101", "--out", str(tmp_path)], capsys)
    assert code == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["sine_gordon_T00.csv", "sine_gordon_T01.csv", "sine_gordon_T02.csv"]
    lines = (tmp_path / "sine_gordon_T01.csv").read_text().splitlines()
    assert lines[0] == "X,T,V,phi" and len(lines) == 102
    phi = np.array([float(l.split(",")[3]) for l in lines[1:]])
    assert np.all(np.diff(phi) > 0)
    assert phi[50] == pytest.approx(np.pi, abs=1e-9)


def test_sine_gordon_empty_times(tmp_path, capsys):
    code, out, _ = _run(["sine-gordon", "--out", str(tmp_path / "x")], capsys)
    assert code == 0 and out == ""


def test_frame_json(capsys):
    code, out, _ = _run(["frame", "--point", "0.4,-0.3"], capsys)
    assert code == 0
    rep = json.loads(out)
    g = np.array(rep["gram"])
    assert g.shape == (3, 3)
    assert max(rep["residuals"].values()) < 1e-8
    assert rep["basis_labels"] == ["A12", "B12", "C1"]
