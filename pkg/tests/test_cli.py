from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from fbma import cli, figures, report, surface

SVG = "{http://www.w3.org/2000/svg}"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_curve_csv_round_trip(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, _, _ = run(["curve", "--a", "0.29", "--phi0", "0.1", "--s-range=-2,2", "--n", "100", "--out", str(path)],
                     capsys)
    assert code == 0
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == list(cli.CURVE_COLUMNS)
    assert len(rows) == 101
    values = np.array([[float(v) for v in r] for r in rows[1:]])
    cols = surface.curve_many((0.29, 0.1), np.linspace(-2, 2, 100))
    for j, name in enumerate(cli.CURVE_COLUMNS):
        assert np.array_equal(values[:, j], cols[name])
    for r in rows[1:]:
        for v in r:
            assert format(float(v), ".17g") == v


def test_curve_clifford_constant_z(capsys):
    code, out, _ = run(["curve", "--a", "0", "--s-range", f"0,{math.pi!r}", "--n", "5"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    assert all(r["z"] == "0.70710678118654757" for r in rows)


def test_curve_single_sign_change_on_quarter_period(capsys):
    _, out, _ = run(["curve", "--a", "0.29", "--s-range=-2,2", "--n", "100"], capsys)
    rows = [r for r in csv.DictReader(io.StringIO(out)) if 0 <= float(r["s"]) <= math.pi / 2]
    f = np.array([float(r["f"]) for r in rows])
    assert np.sum(np.sign(f[1:]) != np.sign(f[:-1])) == 1


@pytest.mark.parametrize("argv", [
    ["curve", "--a", "0.1", "--n", "1"],
    ["curve", "--a", "0.9"],
    ["curve", "--a", "0.1", "--s-range", "2,1"],
    ["annuli", "--a", "0.1", "--count", "0"],
    ["otsuki", "--p", "1", "--q", "2"],
    ["otsuki", "--p", "2", "--q", "3", "--phi0-case", "pi_over_q"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["figure", "9"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["figure", "1", "--projection", "1,2"])
    assert exc.value.code == 2


def test_unwritable_path(capsys):
    code, _, err = run(["curve", "--a", "0.1", "--out", "/nonexistent-dir/c.csv"], capsys)
    assert code == 2 and "cannot write" in err
    code, _, err = run(["figure", "1", "--out", "/nonexistent-dir/f.svg"], capsys)
    assert code == 2 and "cannot write" in err


def test_annuli_json(capsys):
    code, out, _ = run(["annuli", "--a", "0.29", "--count", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    bands = doc["bands"]
    assert len(bands) == 4
    for inner, outer in zip(bands, bands[1:]):
        assert outer["s_lo"] < inner["s_lo"] and inner["s_hi"] < outer["s_hi"]
    for key in ("s_lo", "s_hi", "sphere_x1", "radius", "contained_north", "contained_south", "embedded",
                "wraps_torus", "geometry"):
        assert key in bands[0]
    assert "index_matrix" in bands[0]["geometry"]


@pytest.mark.parametrize("a, check", [
    (0.0, lambda r: abs(r - math.pi / 2) <= 1e-10),
    (-0.29, lambda r: r < math.pi / 2),
])
def test_annuli_radius(a, check, capsys):
    _, out, _ = run(["annuli", "--a", str(a), "--count", "1"], capsys)
    assert check(json.loads(out)["bands"][0]["radius"])


def test_annuli_json_round_trip(tmp_path, capsys):
    path = tmp_path / "a.json"
    run(["annuli", "--a", "0.1", "--count", "2", "--out", str(path)], capsys)
    doc = json.loads(path.read_text(encoding="utf-8"))
    from fbma import annuli

    band = annuli.symmetric_band(0.1, 2)
    assert doc["bands"][1]["s_hi"] == band.s_hi
    assert doc["bands"][1]["sphere_x1"] == band.sphere_x1


@pytest.mark.parametrize("p, q, case, minimum, exact", [
    (2, 3, "0", 4, None),
    (2, 3, "half_pi", 2, 2),
    (5, 8, "pi_over_q", 10, None),
])
def test_otsuki_json(p, q, case, minimum, exact, capsys):
    code, out, _ = run(["otsuki", "--p", str(p), "--q", str(q), "--phi0-case", case], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] >= minimum and doc["ok"]
    if exact is not None:
        assert doc["count"] == exact
        assert all(abs(b["sphere_x1"]) < 1e-9 for b in doc["bands"])
    assert doc["C_residual"] < 1e-10
    if case != "0" or q % 2 == 0:
        assert doc["witnesses"]


def test_otsuki_guarantee_failure_exit_1(capsys, monkeypatch):
    from fbma import otsuki

    real = otsuki.representative_zeros
    monkeypatch.setattr(otsuki, "representative_zeros", lambda spec, phi0, a=None: real(spec, phi0, a)[:1])
    code, out, err = run(["otsuki", "--p", "2", "--q", "3"], capsys)
    assert code == 1
    assert json.loads(out)["ok"] is False
    assert "guarantee" in err


def test_verify_surface_includes_c0(capsys):
    code, out, _ = run(["verify", "surface"], capsys)
    assert code == 0
    claims = {r["claim"] for r in json.loads(out)["reports"]}
    assert "surface.C0_is_sqrt2_pi" in claims


def test_verify_tampered_tolerance(capsys):
    code, out, err = run(["verify", "numerics", "--tol", "1e-20"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["failed"] > 0
    assert "FAIL" in err


def test_report_status_matches_residual():
    for r in report.run_suite("numerics") + report.run_suite("otsuki"):
        if r.status != "skipped":
            assert (r.status == "pass") == (r.residual <= r.tolerance)


def test_report_unknown_suite():
    with pytest.raises(ValueError):
        report.run_suite("nope")


def test_verify_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["verify", "geometry", "--out", str(a)], capsys)
    run(["verify", "geometry", "--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def _svg_lines(path):
    root = ET.parse(path).getroot()
    assert root.tag == f"{SVG}svg"
    return {g.get("id") for g in root.iter(f"{SVG}g") if g.get("id")}


@pytest.mark.parametrize("fid, bands, spheres", [(1, 4, 4), (2, 4, None), (3, 2, 1), (4, 10, None), (5, 10, None)])
def test_figures_well_formed(fid, bands, spheres, tmp_path, capsys):
    path = tmp_path / f"f{fid}.svg"
    code, _, _ = run(["figure", str(fid), "--out", str(path)], capsys)
    assert code == 0
    ids = _svg_lines(path)
    band_ids = {i.rsplit("-", 1)[0] for i in ids if i.startswith("band-")}
    sphere_ids = {i.rsplit("-", 1)[0] for i in ids if i.startswith("sphere-")}
    assert len(band_ids) == bands
    if spheres is not None:
        assert len(sphere_ids) == spheres
    assert "outline" in ids


def test_figure_hidden_parts_faded(tmp_path):
    spec = figures.figure_spec(1)
    path = tmp_path / "f.svg"
    figures.render(spec, path)
    text = path.read_text()
    assert "stroke-opacity: 0.3" in text or 'stroke-opacity="0.3"' in text


def test_figure_projection_validation():
    with pytest.raises(ValueError):
        figures.unit_view((0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        figures.FigureSpec(None, [], (1.0, 1.0, 0.0))
    view = figures.unit_view((0.3, -0.8, 0.52))
    assert abs(math.fsum(v * v for v in view) - 1.0) <= 1e-12


def test_figure_custom_projection(tmp_path, capsys):
    path = tmp_path / "f.svg"
    code, _, _ = run(["figure", "3", "--out", str(path), "--projection", "0,0,1"], capsys)
    assert code == 0
    _svg_lines(path)


def test_figure_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    run(["figure", "2", "--out", str(a)], capsys)
    run(["figure", "2", "--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()
