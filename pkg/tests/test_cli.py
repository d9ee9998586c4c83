import csv
import json
import subprocess
import sys

import pytest

from qautocorr.boolfn import make_function
from qautocorr.cli import LOG_FIELDS, main, thread_cap
from qautocorr.tablefile import write_table


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_spectrum_bent_json(capsys):
    doc = run_json(capsys, "spectrum", "--family", "bent", "--n", "4", "--out", "json")
    assert doc["sigma_f"] == 1.0 and doc["degree"] == 2 and doc["anf"] == [3, 12]


def test_spectrum_table_walsh(capsys, tmp_path):
    path = tmp_path / "f.tt"
    path.write_text("n=2\n0\n")
    assert run_json(capsys, "spectrum", "--table", str(path), "--walsh") == {"n": 2, "walsh": [1, 0, 0, 0]}


def test_spectrum_linear_autocorr(capsys):
    # --w 1 is x_1 (least significant index bit); --w 2 is x_2
    assert run_json(capsys, "spectrum", "--family", "linear", "--w", "1", "--n", "2", "--autocorr")[
        "autocorrelation"] == [1, -1, 1, -1]
    assert run_json(capsys, "spectrum", "--family", "linear", "--w", "2", "--n", "2", "--autocorr")[
        "autocorrelation"] == [1, 1, -1, -1]


def test_spectrum_point_and_csv(capsys):
    doc = run_json(capsys, "spectrum", "--family", "and", "--n", "2", "--point", "3", "--walsh", "--autocorr")
    assert doc == {"n": 2, "point": 3, "walsh": -0.5, "autocorrelation": 0.0}
    code, out, _ = run(capsys, "spectrum", "--family", "and", "--n", "2", "--walsh", "--sigma", "--out", "csv")
    rows = list(csv.reader(out.splitlines()))
    assert rows[0] == ["point", "walsh"] and rows[4] == ["3", "-0.5"]
    assert ["sigma_f", "1.0"] in rows


def test_spectrum_save_table(capsys, tmp_path):
    path = tmp_path / "r.tt"
    run_json(capsys, "spectrum", "--family", "random", "--n", "5", "--seed", "3", "--degree", "--save-table", str(path))
    doc = run_json(capsys, "spectrum", "--table", str(path), "--degree")
    assert doc["degree"] == run_json(capsys, "spectrum", "--family", "random", "--n", "5", "--seed", "3",
                                     "--degree")["degree"]


@pytest.mark.parametrize("text, offset", [("n=2\n0g\n", 5), ("n=4\n0\n", 5), ("m=2\n0\n", 0)])
def test_bad_table_exit_2(capsys, tmp_path, text, offset):
    path = tmp_path / "bad.tt"
    path.write_text(text)
    code, _, err = run(capsys, "spectrum", "--table", str(path))
    assert code == 2 and f"byte {offset}" in err


def test_parameter_errors_exit_2(capsys):
    assert run(capsys, "spectrum", "--family", "random", "--n", "25", "--seed", "1")[0] == 2
    assert run(capsys, "spectrum", "--n", "3")[0] == 2
    assert run(capsys, "estimate", "--family", "and", "--n", "2", "--point", "3", "--epsilon", "0.9",
               "--delta", "0.05", "--seed", "1")[0] == 2
    assert run(capsys, "estimate", "--family", "and", "--n", "2", "--point", "4", "--epsilon", "0.1",
               "--delta", "0.05", "--seed", "1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["sigma", "--family", "and", "--n", "2"])
    assert exc.value.code == 2


def test_qubit_budget_exit_3(capsys):
    assert run(capsys, "hodj", "--family", "random", "--n", "13", "--seed", "1")[0] == 3
    assert run(capsys, "sigma", "--family", "random", "--n", "12", "--seed", "1", "--epsilon", "1",
               "--delta", "0.1")[0] == 3


def test_hodj_verify(capsys, tmp_path):
    dump = tmp_path / "c.json"
    doc = run_json(capsys, "hodj", "--family", "random", "--seed", "9", "--n", "5", "--points", "6,17",
                   "--verify", "--dump-circuit", str(dump))
    assert doc["max_error"] <= 1e-10 and doc["verified"] and doc["u_f_calls"] == 4
    assert doc["cnot_count"] == 20 and doc["h_count"] == 12 and doc["depth"] == doc["depth_formula"] == 10
    circuit = json.loads(dump.read_text())
    assert circuit["metadata"]["u_f_calls"] == 4 and len(circuit["ops"]) == 10


def test_hodj_bits_and_dj(capsys):
    a = run_json(capsys, "hodj", "--family", "random", "--seed", "2", "--n", "3", "--bits", "110", "--verify")
    b = run_json(capsys, "hodj", "--family", "random", "--seed", "2", "--n", "3", "--points", "3", "--verify")
    assert a["amplitudes"] == b["amplitudes"]
    dj = run_json(capsys, "hodj", "--family", "and", "--n", "2", "--verify")
    assert dj["amplitudes"] == pytest.approx([0.5, 0.5, 0.5, -0.5], abs=1e-12) and dj["u_f_calls"] == 1


def test_estimate_and(capsys):
    doc = run_json(capsys, "estimate", "--family", "and", "--n", "2", "--point", "3", "--epsilon", "0.0625",
                   "--delta", "0.05", "--seed", "1")
    assert abs(doc["estimate"]) <= 0.0625 and doc["truth"] == 0.0
    guarded = run_json(capsys, "estimate", "--family", "and", "--n", "2", "--point", "1", "--epsilon", "0.0625",
                       "--delta", "0.05", "--seed", "1", "--zero-guard")
    assert guarded["estimate"] == 0.0
    classical = run_json(capsys, "estimate", "--family", "linear", "--w", "3", "--n", "2", "--point", "1",
                         "--epsilon", "0.1", "--delta", "0.05", "--seed", "1", "--classical")
    assert classical["estimate"] == -1.0 and classical["classical_calls"] > 0


def test_sigma_linear_quantum(capsys):
    doc = run_json(capsys, "sigma", "--family", "linear", "--w", "5", "--n", "4", "--epsilon", "1",
                   "--delta", "0.05", "--quantum", "--seed", "1")
    assert abs(doc["estimate"] - 16) <= 1 and doc["u_f_calls"] > 0


def test_sigma_classical_and_log(capsys, tmp_path):
    log = tmp_path / "runs.csv"
    for seed in ("1", "2"):
        run_json(capsys, "sigma", "--family", "bent", "--n", "4", "--epsilon", "1", "--delta", "0.05",
                 "--classical", "--seed", seed, "--log", str(log))
    rows = list(csv.DictReader(log.open()))
    assert len(rows) == 2 and tuple(rows[0]) == LOG_FIELDS
    assert rows[0]["algorithm"] == "sigma_classical" and rows[1]["seed"] == "2"
    assert float(rows[0]["truth"]) == 1.0


def test_sample_command(capsys):
    doc = run_json(capsys, "sample", "--family", "linear", "--w", "3", "--n", "3", "--delta", "0.01",
                   "--shots", "4000", "--seed", "6")
    assert sum(doc["histogram"].values()) == 4000 and doc["total_variation"] < 0.05
    assert doc["u_f_calls"] == 4000 * doc["u_f_calls_per_shot"]


def test_byte_identical_output():
    argv = [sys.executable, "-m", "qautocorr", "estimate", "--family", "random", "--n", "4", "--seed", "5",
            "--point", "7", "--epsilon", "0.125", "--delta", "0.1"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["seed"] == 5


def test_table_source(capsys, tmp_path):
    path = tmp_path / "f.tt"
    write_table(make_function("bent_quadratic", 4), path)
    assert run_json(capsys, "spectrum", "--table", str(path), "--sigma")["sigma_f"] == 1.0
    assert run(capsys, "spectrum", "--table", str(path), "--family", "and", "--n", "2")[0] == 2


def test_thread_cap():
    assert thread_cap({}) == 1
    assert thread_cap({"AUTOSPEC_THREADS": "4"}) == 4
    for bad in ("0", "x"):
        with pytest.raises(ValueError):
            thread_cap({"AUTOSPEC_THREADS": bad})


def test_bad_thread_env_exit_2(capsys, monkeypatch):
    monkeypatch.setenv("AUTOSPEC_THREADS", "none")
    assert run(capsys, "spectrum", "--family", "and", "--n", "2")[0] == 2
