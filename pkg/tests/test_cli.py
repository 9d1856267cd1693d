import csv
import io
import json

import numpy as np
import pytest

from gres.cli import CSV_HEADER, main, parse_range, preset_request
from gres.exceptions import InvalidArgument
from gres.symplectic import cm_to_json

from conftest import tmsv


@pytest.fixture
def cm_file(tmp_path):
    def write(gamma, name="cm.json"):
        path = tmp_path / name
        path.write_text(cm_to_json(gamma))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_vacuum(capsys, cm_file):
    code, out, _ = run(capsys, "classify", "--cm", cm_file(np.eye(4)))
    assert code == 0
    assert out.splitlines()[0] == "physical, classical, separable"


def test_classify_tmsv(capsys, cm_file):
    code, out, _ = run(capsys, "classify", "--cm", cm_file(tmsv(0.5)), "--json")
    assert code == 0
    assert json.loads(out)["summary"] == "physical, nonclassical, entangled"


def test_classify_unphysical(capsys, cm_file):
    code, out, _ = run(capsys, "classify", "--cm", cm_file(0.5 * np.eye(2)))
    assert code == 0 and out.strip() == "unphysical"


def test_classify_bad_files(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "matrix": [[1, 0], [0, 1]]}')
    assert run(capsys, "classify", "--cm", str(bad))[0] == 2
    bad.write_text("{not json")
    assert run(capsys, "classify", "--cm", str(bad))[0] == 2
    assert run(capsys, "classify", "--cm", str(tmp_path / "missing.json"))[0] == 2


def test_robustness_single_mode(capsys):
    e2 = repr(float(np.exp(2.0)))
    em2 = repr(float(np.exp(-2.0)))
    code, out, _ = run(
        capsys, "robustness", "--resource", "nonclassicality", "--family", "single-mode",
        "--a", e2, "--b", em2, "--c", "0",
    )
    assert code == 0
    d = json.loads(out)
    assert d["lower"] == pytest.approx(np.e) and d["upper"] == pytest.approx(np.e)
    assert set(d) == {"resource", "lower", "upper", "gap", "lower_method", "upper_method", "converged"}


def test_robustness_ghz(capsys):
    code, out, _ = run(capsys, "robustness", "--resource", "entanglement", "--family", "ghz",
                       "--n", "4", "--r", "0.5")
    assert code == 0
    assert json.loads(out)["upper"] == pytest.approx(np.e)


def test_robustness_symmetric_trivial(capsys):
    code, out, _ = run(capsys, "robustness", "--resource", "entanglement", "--family", "symmetric",
                       "--n", "3", "--a", "1", "--b", "1", "--c1", "0", "--c2", "0")
    d = json.loads(out)
    assert code == 0 and (d["lower"], d["upper"]) == (1.0, 1.0)


def test_robustness_exit_codes(capsys):
    # no closed form for a non squeezed-thermal standard form
    code, _, err = run(capsys, "robustness", "--resource", "nonclassicality", "--family",
                       "two-mode-standard", "--a", "2", "--b", "1.7", "--c1", "1.3", "--c2", "0.9",
                       "--method", "analytic")
    assert code == 3 and "unsupported" in err
    code, _, _ = run(capsys, "robustness", "--resource", "nonclassicality", "--family",
                     "single-mode", "--a", "0.5", "--b", "0.5", "--c", "0")
    assert code == 2


def test_parse_range():
    assert parse_range("0.1:0.3:0.1") == pytest.approx((0.1, 0.2, 0.3))
    for bad in ("1:0:0.1", "0:1:0", "0:1", "a:b:c"):
        with pytest.raises(InvalidArgument):
            parse_range(bad)


def test_sweep_empty_range_exit(capsys):
    code, _, err = run(capsys, "sweep", "--family", "ghz", "--resource", "nonclassicality",
                       "--n", "3", "--swept", "r", "--range", "1:0:0.1")
    assert code == 2 and "empty" in err


def test_sweep_bad_swept_name(capsys):
    code, _, _ = run(capsys, "sweep", "--family", "ghz", "--resource", "nonclassicality",
                     "--n", "3", "--swept", "c7", "--range", "0:1:0.5")
    assert code == 2


def test_sweep_csv_round_trip_and_determinism(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("GRES_THREADS", "1")
    args = ["sweep", "--family", "ghz", "--resource", "nonclassicality", "--n", "3",
            "--swept", "r", "--range", "0.1:0.5:0.2", "--method", "analytic"]
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, *args, "-o", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = list(csv.reader(io.StringIO(paths[0].read_text())))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 4
    for row, r in zip(rows[1:], (0.1, 0.3, 0.5)):
        assert float(row[0]) == pytest.approx(r)
        assert float(row[2]) == np.exp(3 * float(row[0])) or float(row[2]) == pytest.approx(
            np.exp(3 * r), rel=1e-14)
        assert float(row[4]) == pytest.approx(np.log(float(row[2])), rel=1e-15)
        assert row[8] == "true"


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "ghz", "--resource", "entanglement", "--n", "3",
                       "--swept", "r", "--range", "0.2:0.4:0.2", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 2
    assert rows[0]["swept"] == pytest.approx(0.2)


def test_sweep_parallel_matches_serial(capsys, monkeypatch):
    args = ["sweep", "--preset", "fig1a", "--c1", "1.2", "--points", "2"]
    monkeypatch.setenv("GRES_THREADS", "1")
    _, serial, _ = run(capsys, *args)
    monkeypatch.setenv("GRES_THREADS", "2")
    _, parallel, _ = run(capsys, *args)
    assert serial == parallel


def test_preset_grid():
    req = preset_request("fig1b", 1.4, 8, "auto", 8)
    assert req.resource == "entanglement" and req.swept == "c2"
    assert req.fixed == {"a": 2.4, "b": 2.0, "c1": 1.4}
    assert 0 < len(req.values) <= 8 and max(req.values) <= 1.4


def test_verify_witness_small(capsys):
    code, out, _ = run(capsys, "verify-witness", "--n", "3", "--cutoff", "2")
    d = json.loads(out)
    assert code == 0 and d["M0"] <= 1 + 1e-8 and d["maximizer"] == "vacuum"


def test_verify_witness_guard(capsys):
    code, _, err = run(capsys, "verify-witness", "--n", "4", "--cutoff", "9")
    assert code == 3 and "smaller --cutoff" in err
