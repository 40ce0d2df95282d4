import csv
import json
import subprocess
import sys

import numpy as np
import pytest

import symrmt.spectra
from symrmt.catalog import get_entry
from symrmt.cli import OUTPUT_ENV, main
from symrmt.errors import NumericalFailure
from symrmt.symmetry import spec_to_dict, unitary_transport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def write_spec(path, spec):
    path.write_text(json.dumps(spec_to_dict(spec)))
    return str(path)


def test_catalog_listing(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0
    ids = [line.split()[0] for line in out.splitlines()[1:-1]]
    assert len(ids) >= 30
    for k in ("18a", "18b(+)", "20a", "20b", "21a(+)", "21b(-)", "19'+", "21a-"):
        assert k in ids


def test_catalog_filters(capsys):
    code, data, _ = run_json(capsys, "catalog", "--class", "Gin4", "--json")
    assert [r["id"] for r in data["entries"]] == ["8"]
    code, data, _ = run_json(capsys, "catalog", "--kinds", "PQC", "--json")
    ids = {r["id"].split("(")[0] for r in data["entries"]}
    assert ids == {str(i) for i in range(22, 31)}


def test_verify_entry_5(capsys):
    code, data, _ = run_json(capsys, "verify", "--entry", "5", "--half-size", "2")
    assert code == 0 and data["passed"]
    assert data["dims"] == {"P": 16, "K": 16}
    assert data["config"]["half_size"] == 2


def test_verify_entry_29_flagged(capsys):
    code, data, _ = run_json(capsys, "verify", "--entry", "29", "--half-size", "2")
    assert code == 0 and data["passed"]
    assert "unverified-against-prior-work" in data["flags"]


def test_verify_spec_file(capsys, tmp_path):
    path = write_spec(tmp_path / "s.json", get_entry("24(-)").build(2))
    code, data, _ = run_json(capsys, "verify", "--spec", path)
    assert code == 0 and data["passed"] and data["dims"] == {"P": 2, "K": 4}


def test_verify_rejects_antisymmetric_q(capsys, tmp_path):
    spec = {"n": 2, "symmetries": [{"kind": "Q", "matrix": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]}]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(capsys, "verify", "--spec", str(path))
    assert code == 2 and "antisymmetric q is excluded" in err


def test_verify_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{")
    code, _, err = run(capsys, "verify", "--spec", str(path))
    assert code == 2 and "JSON" in err
    code, _, _ = run(capsys, "verify", "--spec", str(tmp_path / "missing.json"))
    assert code == 2


def test_sample_ginibre_row_count(capsys, tmp_path):
    code, data, _ = run_json(capsys, "sample", "--entry", "1", "--n", "64", "--samples", "200",
                             "--out", str(tmp_path))
    assert code == 0 and data["csv_rows"] == 12800
    with open(data["csv"]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["sample_index", "re", "im"] and len(rows) == 12801
    summary = json.loads(open(data["summary"]).read())
    assert summary["config"]["n"] == 64 and summary["config"]["seed"] == 0


def test_sample_chiral_pairing(capsys, tmp_path):
    code, data, _ = run_json(capsys, "sample", "--entry", "2", "--n", "8", "--samples", "10",
                             "--out", str(tmp_path))
    assert code == 0
    assert data["symmetry_checks"]["P"]["failed"] == 0
    assert data["symmetry_checks"]["P"]["transform"] == "-lambda"


def test_sample_is_deterministic(capsys, tmp_path):
    for d in ("a", "b"):
        code, _, _ = run(capsys, "sample", "--entry", "21a(-)", "--n", "8", "--samples", "5",
                         "--seed", "17", "--out", str(tmp_path / d))
        assert code == 0
    name = "entry21a_minus_n8_seed17_eigenvalues.csv"
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sample_env_output_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    code, data, _ = run_json(capsys, "sample", "--entry", "5", "--samples", "2")
    assert code == 0 and data["csv"].startswith(str(tmp_path / "env"))


def test_sample_incompatible_n(capsys, tmp_path):
    code, _, err = run(capsys, "sample", "--entry", "29", "--n", "6", "--out", str(tmp_path))
    assert code == 2 and "divisible by 4" in err
    code, _, err = run(capsys, "sample", "--entry", "5", "--n", "5", "--out", str(tmp_path))
    assert code == 2


def test_sample_verification_failure_exit(capsys, tmp_path):
    code, _, _ = run(capsys, "sample", "--entry", "2", "--n", "8", "--samples", "3",
                     "--tol", "1e-30", "--out", str(tmp_path))
    assert code == 1


def test_sample_numerical_failure_exit(capsys, tmp_path, monkeypatch):
    def stall(h, check=True):
        raise NumericalFailure("stalled", index=0)

    monkeypatch.setattr(symrmt.spectra, "spectrum", stall)
    code, _, err = run(capsys, "sample", "--entry", "5", "--samples", "2", "--out", str(tmp_path))
    assert code == 3 and "numerical failure" in err


def test_classify_primed_19(capsys, tmp_path):
    path = write_spec(tmp_path / "s.json", get_entry("19'(+)").build(2))
    code, data, _ = run_json(capsys, "classify", path)
    ids = [m["id"] for m in data["matches"]]
    assert code == 0 and "19(+)" in ids and "19'(+)" in ids
    assert "necessary, not sufficient" in data["note"]


def test_classify_24(capsys, tmp_path):
    path = write_spec(tmp_path / "s.json", get_entry("24(+)").build(2))
    code, data, _ = run_json(capsys, "classify", path)
    assert [m["id"] for m in data["matches"]] == ["24(+)"]
    assert data["row_classes"] == "CI / DIII"
    assert data["matches"][0]["dual"] == "24(-)"


def test_classify_transported_13(capsys, tmp_path):
    rng = np.random.default_rng(0)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    u, _ = np.linalg.qr(z)
    path = write_spec(tmp_path / "s.json", unitary_transport(get_entry("13").build(2), u))
    code, data, _ = run_json(capsys, "classify", path)
    assert [m["id"] for m in data["matches"]] == ["13"]


def test_jacobian_commands(capsys):
    code, data, err = run_json(capsys, "jacobian", "--family", "A", "--rank", "2", "--mo", "2",
                               "--curvature", "0", "--q", "1,0")
    assert code == 0 and data["value"] == pytest.approx(1.0)
    assert "coordinates" in err
    code, data, _ = run_json(capsys, "jacobian", "--family", "C", "--rank", "1", "--ml", "2",
                             "--curvature", "-", "--q", "0.5")
    assert data["value"] == pytest.approx(1.3811, abs=1e-4)
    assert data["log_value"] == pytest.approx(np.log(np.sinh(1.0) ** 2))


def test_jacobian_rank_mismatch(capsys):
    code, _, err = run(capsys, "jacobian", "--family", "C", "--rank", "3", "--curvature", "0",
                       "--q", "1,2")
    assert code == 2 and "inconsistent" in err
    code, _, _ = run(capsys, "jacobian", "--family", "A", "--curvature", "0", "--q", "1,x")
    assert code == 2


def test_observables_command(capsys):
    code, data, _ = run_json(capsys, "observables", "--ml", "1", "--ms", "4", "--s", "1",
                             "--gamma", "3", "--l", "1")
    assert code == 0
    assert (data["mean_log_dg"], data["xi"], data["var_ratio"]) == pytest.approx((-2, 1, 2 / 3))
    assert "units" in data
    code, _, _ = run(capsys, "observables", "--ml", "0", "--ms", "0", "--s", "1", "--gamma", "3")
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
    code, _, _ = run(capsys, "verify", "--entry", "5", "--half-size", "0")
    assert code == 2
    code, _, _ = run(capsys, "verify", "--entry", "99")
    assert code == 2


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "symrmt.cli", "catalog", "--class", "Gin1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[1].split()[0] == "7"
