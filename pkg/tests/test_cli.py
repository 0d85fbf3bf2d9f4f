import csv
import io
import json
import subprocess
import sys

import pytest

from tfub.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


# -- rank-histogram ----------------------------------------------------------------------


def test_rank_histogram_dft(capsys):
    code, doc = run_json(capsys, "rank-histogram", "--group", "Z6", "--matrix", "dft")
    assert code == 0
    counts = doc["result"]["counts"]
    assert counts["3"] == {"2": 48, "3": 352}
    assert counts["2"] == {"1": 36, "2": 189}
    assert counts["6"] == {"6": 1}
    assert doc["config"]["group"] == "Z6" and doc["tool"] == "tfub"
    assert {"version", "wall_time", "seed"} <= set(doc)


def test_rank_histogram_gabor_z5(capsys):
    code, doc = run_json(capsys, "rank-histogram", "--group", "Z5", "--matrix", "gabor",
                         "--seed", "1", "--sizes", "5")
    assert code == 0
    assert doc["result"]["counts"] == {"5": {"5": 53130}}
    assert doc["seed"] == 1


def test_rank_histogram_trivial_group(capsys):
    code, doc = run_json(capsys, "rank-histogram", "--group", "Z1")
    assert code == 0 and doc["result"]["counts"] == {"1": {"1": 1}}


def test_rank_histogram_budget_marks_truncation(capsys):
    code, doc = run_json(capsys, "rank-histogram", "--group", "Z6", "--budget-minors", "50")
    assert doc["result"]["truncated"] is True
    assert doc["result"]["checked"] == 50


def test_rank_histogram_csv(capsys):
    code, out = run(capsys, "rank-histogram", "--group", "Z5", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "#meta"
    assert rows[1] == ["size", "rank", "count"]
    assert ["2", "2", "100"] in rows
    assert out.endswith("\r\n")


def test_output_is_reproducible_apart_from_wall_time(capsys, tmp_path):
    docs = []
    path = tmp_path / "run.json"
    for _ in range(2):
        assert main(["rank-histogram", "--group", "Z4", "--matrix", "gabor", "--seed", "3",
                     "--out", str(path)]) == 0
        doc = json.loads(path.read_text())
        doc.pop("wall_time")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


# -- feasibility ---------------------------------------------------------------------------


def _cell(doc, k, l):
    return next(c for c in doc["result"]["cells"] if c["k"] == k and c["l"] == l)


def test_feasibility_z6(capsys):
    code, doc = run_json(capsys, "feasibility", "--group", "Z6", "--transform", "fourier")
    assert code == 0 and doc["contradictions"] == []
    assert _cell(doc, 3, 3)["status"] == "InfeasibleExhausted"
    for c in doc["result"]["cells"]:
        if c["k"] * c["l"] >= 6 and (c["k"], c["l"]) != (3, 3):
            assert c["status"] == "FeasibleWitnessed"


def test_feasibility_z10_row(capsys):
    code, doc = run_json(capsys, "feasibility", "--group", "Z10", "--transform", "fourier", "--k", "3")
    assert code == 0
    assert _cell(doc, 3, 4)["status"] == "InfeasibleExhausted"


def test_feasibility_z3_triple_csv(capsys):
    code, doc = run_json(capsys, "feasibility", "--group", "Z3", "--transform", "stft-triple")
    assert code == 0 and doc["contradictions"] == []
    cells = {(c["kf"], c["kg"], c["l"]): c["status"] for c in doc["result"]["cells"]}
    assert [l for l in range(1, 10) if cells[(3, 3, l)] == "FeasibleWitnessed"] == [3, 6, 7, 8, 9]
    assert cells[(3, 3, 4)] == cells[(3, 3, 5)] == "InfeasibleExhausted"


def test_feasibility_stft_pair_map(capsys):
    code, doc = run_json(capsys, "feasibility", "--group", "Z3", "--transform", "stft")
    assert code == 0
    assert doc["result"]["meta"]["window_all_minors_nonzero"] is True
    for c in doc["result"]["cells"]:
        assert (c["status"] == "FeasibleWitnessed") == (c["k"] + c["l"] >= 10)


def test_feasibility_guard_is_a_usage_error(capsys):
    code = main(["feasibility", "--group", "Z17"])
    assert code == 2
    assert "guard" in capsys.readouterr().err


# -- bounds ---------------------------------------------------------------------------------


def test_bounds_examples(capsys):
    code, doc = run_json(capsys, "bounds", "--group", "Z6", "--which", "table4-main")
    assert [r["value"]["num"] for r in doc["result"]["rows"]] == [36, 18, 12, 10, 8, 6]
    code, doc = run_json(capsys, "bounds", "--group", "Z6", "--which", "table2", "--cell", "f=2,3", "g=2,3")
    assert doc["result"]["cell"]["value"] == {"num": 20, "den": 1}
    assert doc["result"]["provider"] == "naive_plus_one"
    code, doc = run_json(capsys, "bounds", "--group", "Z7", "--which", "tao", "--k", "3")
    assert doc["result"]["rows"] == [{"k": 3, "bound_name": "tao", "value": {"num": 5, "den": 1}}]


def test_bounds_table4_reports_both_zpq_rows(capsys):
    code, doc = run_json(capsys, "bounds", "--group", "Z6", "--which", "table4")
    zpq = doc["result"]["zpq"]
    assert zpq["printed"] == [36, 26, 25, 23, 22, 20]
    assert [r["value"] for r in zpq["literal"]][:2] == [{"num": 36, "den": 1}, {"num": 27, "den": 1}]


def test_bounds_csv_header(capsys):
    code, out = run(capsys, "bounds", "--group", "Z5", "--which", "ds", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[1] == ["k", "bound_name", "value_num", "value_den"]
    assert rows[2] == ["1", "donoho_stark", "5", "1"]


def test_bounds_theta(capsys):
    code, doc = run_json(capsys, "bounds", "--group", "Z6", "--which", "theta")
    assert [r["value"]["num"] for r in doc["result"]["rows"]] == [6, 3, 2, 2, 2, 1]


# -- certify and recover ------------------------------------------------------------------


def test_certify_z5_unimodular(capsys):
    code, doc = run_json(capsys, "certify", "--group", "Z5", "--window", "unimodular", "--seed", "3", "--full")
    assert code == 0
    assert doc["seed"] == 3
    assert doc["result"]["verdict"] in ("pass", "fail")
    parts = doc["result"]["equivalent_parts"]
    assert len(set(parts.values())) == 1


def test_certify_z4_fails_with_zero_minor(capsys):
    code, doc = run_json(capsys, "certify", "--group", "Z4", "--window", "random", "--seed", "1")
    assert code == 0
    res = doc["result"]
    assert res["verdict"] == "fail"
    assert res["zero_minor"]["size"] == 2
    assert len(res["zero_minor"]["rows"]) == 2


def test_recover_z16(capsys):
    code, doc = run_json(capsys, "recover", "--scenario", "z16-spectral", "--samples", "13")
    assert code == 0
    assert doc["result"]["trials"] == 100 and doc["result"]["success_rate"] == 1.0


@pytest.mark.parametrize("scenario", ["z5-stft", "z5-synthesis", "z5-operator", "z5-erasure"])
def test_recover_z5_scenarios(capsys, scenario):
    code, doc = run_json(capsys, "recover", "--scenario", scenario, "--trials", "20")
    assert code == 0 and doc["result"]["success_rate"] == 1.0


# -- entry points ---------------------------------------------------------------------------


def test_help_and_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tfub.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in ("rank-histogram", "feasibility", "bounds", "certify", "recover"):
        assert cmd in out.stdout
    out = subprocess.run([sys.executable, "-m", "tfub.cli", "bounds", "--help"], capture_output=True, text=True)
    for flag in ("--group", "--seed", "--tol", "--threads", "--format", "--out", "--budget-minors", "--trials"):
        assert flag in out.stdout


def test_usage_errors_exit_with_two():
    out = subprocess.run([sys.executable, "-m", "tfub.cli", "bounds"], capture_output=True, text=True)
    assert out.returncode == 2
