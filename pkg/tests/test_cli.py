import json
import math

import numpy as np
import pytest

from mixedlienard.cli import main


@pytest.fixture
def eqfiles(tmp_path):
    paths = {}
    for case in ("fisher", "israel-stewart", "isochronous"):
        p = tmp_path / f"{case}.json"
        assert main(["equation", case, "--m", "1" if case == "isochronous" else "1/4", "--out", str(p)]) == 0
        paths[case] = p
    return paths


def read_csv(path):
    lines = path.read_text().splitlines()
    return lines[0], np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_factorize_fisher(eqfiles, capsys, tmp_path):
    assert main(["factorize", str(eqfiles["fisher"]), "--out", str(tmp_path / "f")]) == 0
    out = capsys.readouterr().out
    assert "a1 = 0.790569415042" in out and "a1 = -0.790569415042" in out
    manifest = json.loads((tmp_path / "f" / "manifest.json").read_text())
    assert len(manifest["pairs"]) == 2


def test_factorize_israel_stewart(eqfiles, capsys):
    assert main(["factorize", str(eqfiles["israel-stewart"])]) == 0
    out = capsys.readouterr().out
    assert "-0.277632" in out and "-1.43441" in out


def test_factorize_exit_codes(tmp_path, eqfiles):
    g0 = tmp_path / "g0.json"
    g0.write_text('{"mu": 0, "F": [[1.0, 1, 1]], "G": []}')
    assert main(["factorize", str(g0)]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["factorize", str(bad)]) == 2
    assert main(["factorize", str(tmp_path / "missing.json")]) == 2
    # the isochronous G has no real split
    assert main(["factorize", str(eqfiles["isochronous"])]) == 3


def test_solve_israel_stewart(eqfiles, tmp_path):
    out = tmp_path / "is"
    rc = main(["solve", str(eqfiles["israel-stewart"]), "--x0", "1", "--t-range", "0", "10", "--dt", "0.01",
               "--out", str(out)])
    assert rc == 0
    header, data = read_csv(out / "curve.csv")
    assert header == "t,x"
    A = 0.9562739463342813
    assert np.max(np.abs(data[:, 1] - A / (data[:, 0] + A))) < 1e-10
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["verified"] is True
    assert manifest["residuals"]["second_order"]["passed"]
    assert set(manifest["files"]) == {"curve.csv", "manifest.json"}


def test_verify_fisher_kink(eqfiles, tmp_path):
    out = tmp_path / "fk"
    rc = main(["verify", str(eqfiles["fisher"]), "--x0", "0", "--t0", "-10.5", "--t-range", "-10", "10",
               "--out", str(out)])
    assert rc == 0
    _, data = read_csv(out / "curve.csv")
    assert np.all(np.diff(data[:, 1]) > 0)
    assert 0 < data[0, 1] and data[-1, 1] < 1
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["oracle"]["passed"]
    assert manifest["derived"]["constraints"]["F[-1/4]"] == pytest.approx(-3 / math.sqrt(2))


def test_solve_range_and_input_errors(eqfiles, tmp_path, capsys):
    args = ["solve", str(eqfiles["fisher"]), "--x0", "0.5", "--t-range", "-10", "10", "--out", str(tmp_path)]
    assert main(args) == 4
    assert "attainable range" in capsys.readouterr().err
    args = ["solve", str(eqfiles["fisher"]), "--x0", "0.5", "--t-range", "0", "1", "--dt", "0", "--out", str(tmp_path)]
    assert main(args) == 2
    with pytest.raises(SystemExit) as err:
        main(["solve", str(eqfiles["fisher"])])
    assert err.value.code == 2


def test_degenerate_equation_parameters(tmp_path):
    assert main(["equation", "israel-stewart", "--omega", "0", "--out", str(tmp_path / "x.json")]) == 4


def test_figure_1(tmp_path):
    assert main(["figure", "1", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    for m in ("m1", "m2"):
        assert manifest["derived"][m]["period"] == pytest.approx(2 * math.pi, abs=1e-6)
        assert manifest["derived"][m]["C"] == pytest.approx(1.25 * manifest["derived"][m]["A_m0"])
    _, data = read_csv(tmp_path / "fig1_m1.csv")
    assert data[0, 1] == pytest.approx(data[-1, 1], abs=1e-12)


def test_figure_2(tmp_path):
    assert main(["figure", "2", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["derived"]["v"] == pytest.approx(3 / math.sqrt(2), abs=1e-12)
    assert manifest["derived"]["form"] == "derived"


def test_figure_3(tmp_path):
    assert main(["figure", "3", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["derived"]) == 9
    assert "omega_eos = 0 is excluded" in manifest["notes"]
    header, data = read_csv(tmp_path / "fig3_omega0.5_plus.csv")
    assert header == "t,H,eta,w"
    slope = manifest["derived"]["0.5"]["plus"]["slope"]
    assert np.allclose(data[:, 3], slope * data[:, 2], rtol=1e-10)


def test_figure_4(tmp_path):
    assert main(["figure", "4", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["derived"]["slopes"]["upper"] == pytest.approx(0.72361, abs=1e-5)
    assert manifest["derived"]["slopes"]["lower"] == pytest.approx(0.27639, abs=1e-5)
    parametric = [f for f in manifest["files"] if f.startswith("fig4_parametric")]
    assert len(parametric) >= 3
    for r in manifest["residuals"].values():
        assert r["max_abs"] < 1e-8


def test_outputs_are_deterministic(tmp_path):
    for d in ("a", "b"):
        assert main(["figure", "4", "--out", str(tmp_path / d)]) == 0
    for name in ("fig4_parametric_C1.csv", "fig4_line_upper.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    ma.pop("timestamp"), mb.pop("timestamp")
    assert ma == mb
