import csv
import io
import json

import jsonschema
import pytest

from stopred import load_matrix
from stopred.cli import main, p_grid
from stopred.report import (BOUND_COLUMNS, COMPARISON_COLUMNS, ENSEMBLE_COLUMNS, SPECTRUM_COLUMNS, load_schema,
                            spectrum_from_doc)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, load_schema(doc["kind"]))
    return doc


def header(text):
    return tuple(next(csv.reader(io.StringIO(text))))


def test_bounds_parameter_mode(capsys):
    doc = run_json(capsys, "bounds", "--n", "48", "--k", "24", "--d", "12")
    vals = {b["name"]: b["value"] for b in doc["bounds"]}
    assert vals == {"sv": "4540385", "hs": "4440"}


def test_bounds_tanner_parameters(capsys):
    doc = run_json(capsys, "bounds", "--n", "155", "--k", "64", "--d", "20")
    vals = {b["name"]: b["value"] for b in doc["bounds"]}
    assert vals["hs"] == "1526972" and vals["sv"].startswith("62")


def test_bounds_golay_all_levels(capsys):
    doc = run_json(capsys, "bounds", "--all-ell")
    xi1 = [int(b["value"]) for b in doc["bounds"] if b["name"] == "xi1"]
    xi2 = [int(b["value"]) for b in doc["bounds"] if b["name"] == "xi2"]
    assert xi1 == [12, 12, 12, 25, 49, 91, 168, 304, 540, 927, 1507, 2241]
    assert xi2 == [12, 12, 12, 27, 51, 95, 174, 316, 560, 960, 1558, 2309]


def test_bounds_tau1_and_csv(capsys):
    code, out, _ = run(capsys, "bounds", "--tau", "1", "--csv")
    assert code == 0
    assert header(out) == BOUND_COLUMNS
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["value"] for r in rows if r["name"] == "xi1"] == ["185"]


def test_bounds_need_distance(capsys, tmp_path):
    path = tmp_path / "h.txt"
    path.write_text("1100\n0110\n")
    code, _, err = run(capsys, "bounds", "--code", str(path))
    assert code == 2 and "--d" in err
    code, _, err = run(capsys, "bounds", "--n", "10", "--k", "5")
    assert code == 2 and "--d" in err


def test_bounds_with_spectrum_file(capsys, tmp_path):
    doc = run_json(capsys, "spectrum", "--ell", "7", "--coverable")
    path = tmp_path / "spectrum.json"
    path.write_text(json.dumps(doc))
    assert spectrum_from_doc(doc).counts[3] == 110
    out = run_json(capsys, "bounds", "--ell", "7", "--spectrum", str(path))
    assert [b["value"] for b in out["bounds"] if b["name"] == "xi1"] == ["168"]


def test_spectrum_exhaustive_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--ell", "5", "--coverable", "--csv")
    assert code == 0 and header(out) == SPECTRUM_COLUMNS
    assert [r["count"] for r in csv.DictReader(io.StringIO(out))] == ["0", "0", "0", "110", "1837"]


def test_spectrum_rejects_zero(capsys):
    code, _, err = run(capsys, "spectrum", "--ell", "0")
    assert code == 2 and "ell" in err


def test_spectrum_budget_needs_force(capsys, tmp_path):
    path = tmp_path / "wide.txt"
    path.write_text("\n".join(format((i * 2654435761) % (1 << 40), "040b") for i in range(1, 21)) + "\n")
    code, _, err = run(capsys, "spectrum", "--ell", "20", "--code", str(path))
    assert code == 2 and "--force" in err


def test_spectrum_estimate_seeded(capsys):
    a = run_json(capsys, "spectrum", "--ell", "5", "--estimate", "--N", "1e4", "--eps", "0.001", "--seed", "4")
    b = run_json(capsys, "spectrum", "--ell", "5", "--estimate", "--N", "1e4", "--eps", "0.001", "--seed", "4")
    assert a == b and a["seed"] == 4 and a["rows"][0]["N"] == 10000


def test_spectrum_estimate_prints_seed(capsys):
    code, out, err = run(capsys, "spectrum", "--ell", "2", "--estimate", "--N", "100", "--confidence", "0.95")
    assert code == 0 and "seed:" in err
    seed = int(err.split("seed:")[1].split()[0])
    assert json.loads(out)["seed"] == seed


def test_greedy_writes_matrix_and_log(capsys, tmp_path):
    mat = tmp_path / "g.alist"
    log = tmp_path / "log.json"
    code, _, err = run(capsys, "greedy", "--ell", "4", "--restarts", "2", "--seed", "1", "--format", "alist",
                       "--matrix-out", str(mat), "--out", str(log), "--audit")
    assert code == 0, err
    doc = json.loads(log.read_text())
    jsonschema.validate(doc, load_schema("greedy"))
    assert doc["row_count"] == 12 and doc["audit_uncovered"] == 0
    H = load_matrix(mat.read_text(), "alist").H
    assert H.rows == 12


def test_profile_ml_table(capsys):
    doc = run_json(capsys, "profile", "--decoder", "ml", "--exhaustive-to", "12")
    rows = {r["w"]: r["count"] for r in doc["profiles"][0]["rows"]}
    assert [rows[w] for w in range(8, 13)] == ["759", "12144", "91080", "425040", "1313116"]
    assert rows[13] == "2496144"


def test_profile_compare_and_fer(capsys, tmp_path):
    code, out, _ = run(capsys, "profile", "--compare", "it,ml", "--exhaustive-to", "6", "--w-max", "6", "--csv")
    assert code == 0 and header(out) == COMPARISON_COLUMNS
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[4]["disagreements"] == "110"
    doc = run_json(capsys, "profile", "--fer", "--p-grid", "0.1:0.3:0.1", "--decoder", "both")
    assert doc["p"] == [0.1, 0.2, 0.3]
    it, ml = doc["curves"]
    assert all(a >= b for a, b in zip(it["fer"], ml["fer"]))


def test_p_grid_parser():
    assert p_grid("0.05:0.5:0.05")[-1] == 0.5
    assert len(p_grid("0.05:0.5:0.05")) == 10


def test_ensemble_analytic(capsys):
    doc = run_json(capsys, "ensemble", "sre", "--n", "12", "--rate", "1/2", "--analytic")
    assert round(doc["rows"][0]["rho"], 2) == 34.75
    doc = run_json(capsys, "ensemble", "sre", "--n", "24", "--rate", "1/3", "--analytic")
    assert round(doc["rows"][0]["rho"]) == 18557


def test_ensemble_gallager_estimate(capsys):
    code, out, err = run(capsys, "ensemble", "gallager", "--n", "20", "--J", "3", "--K", "5", "--estimate",
                         "--N", "1e4", "--seed", "2", "--csv")
    assert code == 0, err
    assert header(out) == ENSEMBLE_COLUMNS
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["ell"] == "10" and row["m"] == "12"
    doc = run_json(capsys, "ensemble", "gallager", "--n", "20", "--J", "3", "--K", "5", "--N", "1e4",
                   "--seed", "2")
    assert doc["rows"][0]["r_max"] == 10
    assert doc["estimate"]["kind"] == "estimate"


def test_ensemble_errors(capsys):
    assert run(capsys, "ensemble", "gallager", "--n", "20", "--J", "3", "--K", "5", "--analytic")[0] == 2
    assert run(capsys, "ensemble", "sre", "--n", "20")[0] == 2
    with pytest.raises(SystemExit):
        main(["ensemble", "sre", "--n", "12", "--rate", "3/2"])


def test_reproduce_table2(capsys):
    code, out, _ = run(capsys, "reproduce", "--tables", "II")
    assert code == 0
    lines = out.strip().splitlines()
    assert all(ln.startswith("PASS") for ln in lines[:-1])
    assert lines[-1].endswith("0 failed")


def test_reproduce_json(capsys):
    doc = run_json(capsys, "reproduce", "--tables", "IV")
    assert doc["failed"] == 0
    assert any(c["status"] == "INFO" for c in doc["cells"])


def test_reproduce_unknown_table(capsys):
    assert run(capsys, "reproduce", "--tables", "III")[0] == 2


def test_unknown_builtin(capsys):
    code, _, err = run(capsys, "spectrum", "--ell", "2", "--code", "builtin:hamming")
    assert code == 2 and "golay" in err
