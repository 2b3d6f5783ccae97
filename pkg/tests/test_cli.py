import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from floqlind import cli
from floqlind.markov import brute_force_decision
from floqlind.propagator import floquet_map
from floqlind.qdyn import ModelSpec

SMALL = ["--e-max", "2*pi/25", "--omega-min", "20pi/25", "--omega-max", "22pi/25"]


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def test_angle_parser():
    assert cli.angle("pi/4") == pytest.approx(math.pi / 4)
    assert cli.angle("3pi/4") == pytest.approx(3 * math.pi / 4)
    assert cli.angle("2*pi/3") == pytest.approx(2 * math.pi / 3)
    assert cli.angle("-pi") == pytest.approx(-math.pi)
    assert cli.angle("0.25") == 0.25


def test_label_undriven_yes():
    code, out = run("label", "--problem", "I", "--E", "0", "--omega", "1", "--phi", "0")
    assert code == 0
    assert "answer: yes" in out and "mu_min: 0.0" in out


def test_label_matches_oracle():
    code, out = run("label", "--problem", "I", "--E", "1.0", "--omega", "1.0", "--phi", "1.5707963", "--json")
    doc = json.loads(out)
    want, _ = brute_force_decision(floquet_map(ModelSpec("I", amplitude=1.0, omega=1.0, phase=1.5707963)))
    assert (doc["answer"] == "yes") == want
    assert code == (0 if want else 3)


def test_label_no_exit_code():
    code, out = run("label", "--E", str(10 * math.pi / 25), "--omega", "15pi/25")
    assert code == 3 and "answer: no" in out
    assert run("label", "--E", "10pi/25", "--omega", "15pi/25") == (code, out)


def test_label_invalid_parameters():
    assert run("label", "--problem", "I", "--E", "-1", "--omega", "1")[0] == 2
    assert run("label", "--problem", "III", "--E", "1", "--omega", "1")[0] == 2
    assert run("label", "--E", "1", "--omega", "0")[0] == 2


def test_features_command():
    code, out = run("features", "--E", "1", "--omega", "1", "--scheme", "eigvals")
    vals = [float(v) for v in out.splitlines()[0].split(",")]
    assert code == 0 and len(vals) == 4 and sum(vals) == pytest.approx(2)


@pytest.fixture(scope="module")
def protocol_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("proto")
    code, out = run("dataset", "--problem", "I", "--problem", "II", "--protocol", "--out", str(d / "data"),
                    "--scheme", "eigensystem_normalized", "--points", str(d / "points.npz"), *SMALL)
    assert code == 0, out
    return d


def test_dataset_single_file(tmp_path):
    code, out = run("dataset", "--phi", "0", "--phi", "pi/2", "--scheme", "eigvals", "--out", str(tmp_path / "d.csv"), *SMALL)
    assert code == 0
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 9
    skipped = (tmp_path / "d.skipped.csv").read_text().splitlines()
    assert skipped[0] == "problem,E,omega,phi,flags"


def test_protocol_files(protocol_dir):
    d = protocol_dir / "data"
    n = {name: len((d / f"{name}.csv").read_text().splitlines()) - 1 for name in ("train", "validation", "test")}
    # 9 cells per (problem, phase) block; ceil(0.9 * 9) = 9 sends whole blocks to training
    assert n["test"] == 2 * 2 * 9
    assert n["train"] + n["validation"] == 2 * 6 * 9


def test_train_eval_roundtrip_and_reproducible(protocol_dir):
    d = protocol_dir / "data"
    m1, m2 = protocol_dir / "m1.json", protocol_dir / "m2.json"
    for m in (m1, m2):
        code, out = run("train", "--algorithm", "random_forest", "--train", str(d / "train.csv"),
                        "--set", "n_trees=50", "--set", "max_depth=4", "--seed", "3", "--out", str(m))
        assert code == 0, out
    assert m1.read_bytes() == m2.read_bytes()
    r1, r2 = protocol_dir / "r1.json", protocol_dir / "r2.json"
    for r in (r1, r2):
        code, out = run("eval", "--model", str(m1), "--train", str(d / "train.csv"), "--test", str(d / "test.csv"),
                        "--json", str(r))
        assert code == 0
        assert "SVM" in out
    assert r1.read_bytes() == r2.read_bytes()
    report = json.loads(r1.read_text())
    assert 0 <= report["test"]["accuracy"] <= 1


def test_train_search(protocol_dir, tmp_path):
    d = protocol_dir / "data"
    # small blocks leave the validation split empty; validate on the test file instead
    code, out = run("train", "--algorithm", "knn", "--train", str(d / "train.csv"), "--validation", str(d / "test.csv"),
                    "--search", "--set", "k=[3,5]", "--out", str(tmp_path / "m.json"))
    assert code == 0 and out.count("validation accuracy") == 2


def test_eval_errors(protocol_dir, tmp_path):
    d = protocol_dir / "data"
    assert run("eval", "--model", str(tmp_path / "missing.json"), "--test", str(d / "test.csv"))[0] == 2
    code, _ = run("dataset", "--phi", "0", "--scheme", "eigvals", "--out", str(tmp_path / "narrow.csv"), *SMALL)
    m = tmp_path / "m.json"
    assert run("train", "--algorithm", "lda", "--train", str(d / "train.csv"), "--out", str(m))[0] == 0
    assert run("eval", "--model", str(m), "--test", str(tmp_path / "narrow.csv"))[0] == 2
    assert run("train", "--algorithm", "lda", "--train", str(tmp_path / "nope.csv"), "--out", str(m))[0] == 2
    assert run("train", "--algorithm", "lda", "--train", str(d / "train.csv"), "--scheme", "eigvals", "--out", str(m))[0] == 2


def test_diagram_truth_and_memorizing_model(protocol_dir, tmp_path):
    d = protocol_dir / "data"
    m = tmp_path / "knn.json"
    assert run("train", "--algorithm", "knn", "--set", "k=1", "--override", "--train", str(d / "train.csv"), "--out", str(m))[0] == 0
    csv_path, svg_path = tmp_path / "diag.csv", tmp_path / "diag.svg"
    code, out = run("diagram", "--data", str(d / "train.csv"), "--model", str(m), "--csv", str(csv_path), "--svg", str(svg_path))
    assert code == 0 and "disagreements 0" in out
    rows = csv_path.read_text().splitlines()[1:]
    assert all(r.endswith(",0") for r in rows)
    root = ET.parse(svg_path).getroot()
    rects = root.findall(".//{http://www.w3.org/2000/svg}rect")
    assert len(rects) == 3 * len(rows)


def test_diagram_truth_only_and_empty(protocol_dir, tmp_path):
    d = protocol_dir / "data"
    svg = tmp_path / "t.svg"
    code, out = run("diagram", "--data", str(d / "test.csv"), "--problem", "I", "--phi", "pi/8",
                    "--csv", str(tmp_path / "t.csv"), "--svg", str(svg))
    assert code == 0
    rects = ET.parse(svg).getroot().findall(".//{http://www.w3.org/2000/svg}rect")
    assert len(rects) == 9
    assert run("diagram", "--data", str(d / "test.csv"), "--phi", "1.0", "--csv", str(tmp_path / "x.csv"))[0] == 2
    assert not (tmp_path / "x.csv").exists()
