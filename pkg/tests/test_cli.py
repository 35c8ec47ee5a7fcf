import json
import math

import pytest

from zerocurv.analytic import Rational
from zerocurv.cli import EXIT_BOUND, EXIT_INPUT, EXIT_OK, RunConfig, main, run
from zerocurv.rkc import dump_correspondence, sine_family
from zerocurv.weierstrass import WeierstrassData, dumps_data


def test_hexagon_report(tmp_path):
    out = tmp_path / "hex.json"
    assert main(["hexagon-report", "--no-numeric", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert -doc["kpp_closed"] == pytest.approx(16 * math.pi**4 / 81, rel=1e-12)
    assert doc["annotations"][0].startswith("extremal datum")
    assert "256*pi^4/729" in doc["constants"]


def test_hexagon_mesh(tmp_path):
    out = tmp_path / "m.obj"
    args = ["hexagon-mesh", "--n-radial", "2", "--n-angular", "6", "--r-max", "0.5", "--out", str(out)]
    assert main(args) == EXIT_OK
    first = out.read_bytes()
    assert sum(l.startswith("v ") for l in out.read_text().splitlines()) == 13
    assert main(args) == EXIT_OK
    assert out.read_bytes() == first


def test_kpp_file(tmp_path):
    data = WeierstrassData(Rational([1.0], [1.0], 0.8), Rational([0.3, 0, 1], [1.0], 0.8), 0.8)
    path = tmp_path / "tilt.json"
    path.write_text(dumps_data(data))
    out = tmp_path / "r.json"
    assert main(["kpp", str(path), "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["kpp_numeric"] == pytest.approx(doc["kpp_closed"], rel=1e-4)


def test_kpp_bound_violation_exit(tmp_path):
    # p(0) small: |K''| exceeds the flat bound without being extremal
    data = WeierstrassData(Rational([0.3], [1.0], 0.9), Rational([0, 0, 0.9], [1.0], 0.9), 0.9)
    path = tmp_path / "big.json"
    path.write_text(dumps_data(data))
    assert main(["kpp", str(path), "--no-numeric", "--out", str(tmp_path / "o.json")]) == EXIT_BOUND


@pytest.mark.parametrize("content", ["not json", '{"p": 1}'])
def test_kpp_input_errors(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert main(["kpp", str(path)]) == EXIT_INPUT


def test_missing_file():
    assert main(["kpp", "/nonexistent/data.json"]) == EXIT_INPUT


def test_unknown_command():
    assert run(RunConfig(command="bogus")) == EXIT_INPUT


def test_bad_tolerance_syntax():
    with pytest.raises(SystemExit):
        main(["verify", "--tol", "nonsense"])


def test_rkc_correspondence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(dump_correspondence(sine_family([0.03], [0.0], 6)))
    out = tmp_path / "r.json"
    assert main(["rkc", "--correspondence", str(path), "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["instances"] == 1 and doc["violations"] == 0


def test_rkc_rejects_folded_correspondence(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"target": "disk", "epsilons": [0.5], "deltas": [0.0], "symmetry_order": 6}))
    assert main(["rkc", "--correspondence", str(path)]) == EXIT_INPUT


def test_rkc_batch_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["rkc", "--seed", "3", "--size", "6", "--out", str(out)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["instances"] == 6


def test_verify_seed_7(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--seed", "7", "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["passed"]
    margin = next(c for c in doc["checks"] if c["name"] == "hexagon_margin_flat")
    assert abs(margin["value"]) < 1e-9
    assert "PASS" in capsys.readouterr().err
