import json
import xml.etree.ElementTree as ET
from importlib.resources import files

import jsonschema
import numpy as np
import pytest

from shearlab.cli import main, parse_named

SCHEMA = json.loads(files("shearlab").joinpath("schema/report.schema.json").read_text())
SVG_NS = "{http://www.w3.org/2000/svg}"


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["exit_code"] == code
    return code, report


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_parse_named():
    assert parse_named("koebe") == ("koebe", {})
    assert parse_named("mobius:a=0.3-0.1j,c=0.5") == ("mobius", {"a": 0.3 - 0.1j, "c": 0.5})
    assert parse_named("power:n=2") == ("power", {"n": 2})


def test_transform_alpha_zero(tmp_path):
    code, rep = run(tmp_path, "transform", "--phi", "koebe", "--omega", "linear:c=0.5", "--alpha", "0")
    assert code == 0
    assert rep["result"]["h_coeffs"][:3] == [[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]
    assert all(c == [0.0, 0.0] for c in rep["result"]["g_coeffs"])
    assert len(rep["result"]["h_coeffs"]) == 16


def test_transform_shear_only_halfplane(tmp_path):
    code, rep = run(tmp_path, "transform", "--phi", "halfplane", "--omega", "power:n=1", "--transform", "shear_only")
    h = np.array(rep["result"]["h_coeffs"])[:, 0]
    k = np.arange(1, 16)
    assert np.max(np.abs(h[1:] - (k + 1) / 2)) < 1e-12
    assert rep["result"]["norms"]["sup_norm"] == {"value": 1.0, "exact": True}
    assert rep["result"]["jacobian_min"]["value"] >= 0


def test_transform_svg(tmp_path):
    svg = tmp_path / "img.svg"
    code, rep = run(tmp_path, "transform", "--phi", "koebe", "--alpha", "0.2", "--omega", "linear:c=0.5",
                    "--svg", str(svg))
    root = ET.parse(svg).getroot()
    polylines = root.findall(f"{SVG_NS}polyline")
    assert len(polylines) == 44 and rep["result"]["svg"]["polylines"] == 44
    assert all(len(p.get("points").split()) == 512 for p in polylines)
    assert sum(p.get("class") == "circle" for p in polylines) == 20


def test_render(tmp_path):
    svg = tmp_path / "r.svg"
    code, rep = run(tmp_path, "render", "--phi", "halfplane", "--transform", "f_alpha", "--alpha", "0.5",
                    "--svg", str(svg))
    assert code == 0 and len(ET.parse(svg).getroot().findall(f"{SVG_NS}polyline")) == 44
    code, rep = run(tmp_path, "render", name="e.json")
    assert code == 2


def test_unknown_phi_exit_2(tmp_path):
    code, rep = run(tmp_path, "transform", "--phi", "nope")
    assert code == 2 and "UnknownName" in rep["error"] and rep["result"] is None


@pytest.mark.parametrize(
    "argv",
    [
        ["transform", "--order", "4"],
        ["transform", "--alpha", "1.5"],
        ["transform", "--omega", "constant:c=2"],
        ["transform", "--grid-radii", "8"],
        ["transform", "--transform", "shear_only", "--omega", "constant:c=0.5", "--scale", "3"],
        ["certify", "--criterion", "theorem_c", "--c=-1,0"],
        ["certify", "--criterion", "theorem_c"],
        ["scan", "--scan", "mu_probe", "--phi", "koebe"],
    ],
)
def test_config_errors_exit_2(tmp_path, argv):
    code, rep = run(tmp_path, *argv)
    assert code == 2 and rep["error"]


def test_numeric_failure_exit_3(tmp_path):
    # 1 - scale*omega vanishes: the shear quotient is singular
    code, rep = run(tmp_path, "transform", "--transform", "shear_only", "--omega", "constant:c=0.5",
                    "--scale", "2")
    assert code == 3 and "DegenerateDilatation" in rep["error"]


def test_bounds_zero_dilatation(tmp_path):
    code, rep = run(tmp_path, "bounds")
    th = {(t["id"], t.get("beta")): t for t in rep["result"]["thresholds"]}
    assert th[("SHS", None)]["value"] == 0.25
    assert th[("f_alpha", 1.0)]["value"] == 0.5
    assert th[("f_alpha", 2.0)]["value"] == 0.25
    lo, hi = th[("SHCC", None)]["interval"]
    assert abs(lo + 0.30361) < 1e-5 and abs(hi - 0.7071067811865476) < 1e-15
    assert th[("linear_connectivity", None)]["value"] == pytest.approx(1 / 3)


def test_bounds_linear_dilatation(tmp_path):
    code, rep = run(tmp_path, "bounds", "--omega", "power:n=1")
    th = {(t["id"], t.get("beta")): t["value"] for t in rep["result"]["thresholds"] if "value" in t}
    assert th[("f_alpha", 1.0)] == pytest.approx(1 / 6, abs=1e-16)


def test_bounds_estimated_norms(tmp_path):
    code, rep = run(tmp_path, "bounds", "--omega", "power:n=2", "--beta", "3")
    assert rep["result"]["norms"]["hyperbolic_norm"]["exact"] is True
    assert any(t.get("beta") == 3.0 for t in rep["result"]["thresholds"])


def test_certify(tmp_path):
    assert run(tmp_path, "certify", "--phi", "identity", "--criterion", "becker")[0] == 0
    code, rep = run(tmp_path, "certify", "--phi", "halfplane", "--transform", "shear_only")
    assert code == 1 and rep["result"]["report"]["verdict"] == "not_certified"
    code, rep = run(tmp_path, "certify", "--criterion", "theorem_c", "--c", "0.5,0")
    assert code == 0 and rep["result"]["report"]["details"]["c"] == [0.5, 0.0]


def test_scan_debug_map(tmp_path):
    code, rep = run(tmp_path, "scan", "--debug-map", "z^2")
    assert code == 1 and rep["result"]["scan"]["n_collisions"] == 1


def test_scan_mu_probe(tmp_path):
    code, rep = run(tmp_path, "scan", "--scan", "mu_probe", "--phi", "mu:mu=0.5", "--alpha", "0.1")
    assert code == 0 and rep["result"]["scan"]["n_collisions"] == 0


def test_scan_stable_family(tmp_path):
    code, rep = run(tmp_path, "scan", "--scan", "stable_family", "--phi", "koebe", "--alpha", "0.2",
                    "--lambda-count", "8")
    assert code == 0 and len(rep["result"]["scan"]["outcomes"]) == 8


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"phi": {"name": "mobius_is_not_a_map", "params": {}}, "alpha": 0.1}))
    code, _ = run(tmp_path, "transform", "--config", str(cfg))
    assert code == 2
    cfg.write_text(json.dumps({"phi": "halfplane", "omega": {"name": "linear", "params": {"c": [0, 0.5]}},
                               "transform": "f_alpha", "alpha": 0.1}))
    code, rep = run(tmp_path, "transform", "--config", str(cfg), "--alpha", "0.2")
    assert code == 0
    assert rep["config"]["alpha"] == 0.2 and rep["config"]["phi"]["name"] == "halfplane"
    assert rep["config"]["omega"]["params"]["c"] == [0.0, 0.5]
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(tmp_path, "transform", "--config", str(cfg))[0] == 2


def test_deterministic_output(tmp_path):
    def body(name):
        main(["transform", "--phi", "koebe", "--alpha", "0.2", "--seed", "7", "--out", str(tmp_path / name)])
        d = json.loads((tmp_path / name).read_text())
        d.pop("timestamp")
        return json.dumps(d, sort_keys=True)

    assert body("a.json") == body("b.json")


def test_stdout(capsys):
    assert main(["bounds"]) == 0
    assert json.loads(capsys.readouterr().out)["command"] == "bounds"
