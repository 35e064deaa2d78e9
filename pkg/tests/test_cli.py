import json
import subprocess
import sys
from pathlib import Path

import pytest

from commeval.cli import main
from commeval.evidence import read_csv
from commeval.graph import bundled_path, load_graph

GOLDEN = Path(__file__).parent / "golden" / "karate_report.json"
KARATE = str(bundled_path("karate.edges"))
FACTIONS = str(bundled_path("karate_factions.tsv"))


@pytest.fixture(scope="module")
def planted_files(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixture")
    assert main(["gen", "--k", "4", "--size", "32", "--pin", "0.3", "--pout", "0.01", "--seed", "7", "--out", str(out)]) == 0
    return out / "network.edges", out / "network.gt.tsv"


def test_karate_golden_report(tmp_path, capsys):
    code = main(["eval", KARATE, "--gt", FACTIONS, "--network-id", "karate", "--out", str(tmp_path)])
    assert code == 2
    assert (tmp_path / "report.json").read_bytes() == GOLDEN.read_bytes()
    data = json.loads(GOLDEN.read_text())
    assert data["iterations"][0]["premature"]["structural"] == "Medium"
    assert data["iterations"][0]["premature"]["functional"] == "High"
    assert data["status"] == "unresolved" and data["consensual_decision"] is None
    out = capsys.readouterr().out
    assert "Premature Structural" in out
    for name in ("evidence.csv", "multilayer.json", "boxplot.csv", "report.txt"):
        assert (tmp_path / name).exists()


def test_eval_consensus_and_row_count(planted_files, tmp_path):
    net, gt = planted_files
    assert main(["eval", str(net), "--gt", str(gt), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["consensual_decision"] == "VeryHigh" and report["bias_sources"] == ["None"]
    rows = read_csv(tmp_path / "evidence.csv")
    assert len(rows) == 6 * 30 * (7 + 5 + 4) + 7
    layers = json.loads((tmp_path / "multilayer.json").read_text())
    assert len(layers["iterations"][0]["layers"]) == 7


def test_eval_without_ground_truth(planted_files, tmp_path):
    net, _ = planted_files
    assert main(["eval", str(net), "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["iterations"][0]["premature"]["functional"] is None
    assert any("no ground truth" in w for w in report["warnings"])


def test_bad_algorithm(capsys, tmp_path):
    assert main(["eval", KARATE, "--algorithms", "LM,XX", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "XX" in err and "LM, GM, LE, LP, GN, WT" in err


def test_protocol_refusal_and_override(tmp_path, capsys):
    assert main(["eval", KARATE, "--reps", "5", "--out", str(tmp_path)]) == 1
    assert "at least 30" in capsys.readouterr().err
    assert main(["eval", KARATE, "--reps", "5", "--allow-few-reps", "--algorithms", "LM,LP", "--out", str(tmp_path)]) in (0, 2)


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"network={json.dumps(KARATE)}\nalgorithms=LM,GM\nreps=3\nthresholds.tau_d=0.3\n")
    assert main(["eval", "--config", str(cfg), "--reps", "4", "--out", str(tmp_path / "o"), "--formats", "json"]) in (0, 2)
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["protocol"]["reps"] == 4
    assert report["thresholds"]["tau_d"] == 0.3
    assert not (tmp_path / "o" / "evidence.csv").exists()


def test_compare(tmp_path, capsys):
    (tmp_path / "p1.tsv").write_text("a\t0\nb\t0\nc\t1\nd\t1\n")
    (tmp_path / "p2.tsv").write_text("a\tx\nb\tx\nc\tx\nd\ty\n")
    assert main(["compare", str(tmp_path / "p1.tsv"), str(tmp_path / "p2.tsv"), "--metrics", "RI,NMI,VI"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    got = {line.split("\t")[0]: float(line.split("\t")[1]) for line in lines}
    assert got["RI"] == pytest.approx(0.5)
    assert got["NMI"] == pytest.approx(0.343711, abs=1e-6)
    assert got["VI"] == pytest.approx(0.823959, abs=1e-6)
    (tmp_path / "p3.tsv").write_text("a\t0\nb\t0\n")
    assert main(["compare", str(tmp_path / "p1.tsv"), str(tmp_path / "p3.tsv")]) == 1


def test_filter_command(tmp_path, capsys):
    net = tmp_path / "two.edges"
    net.write_text("a b\nb c\na c\nc d\nx y\n")
    out = tmp_path / "out"
    assert main(["filter", str(net), "--filter", "component:min=3", "--out", str(out)]) == 0
    assert "removed 2 node(s), 1 edge(s)" in capsys.readouterr().out
    g = load_graph(out / "two.edges")
    assert (g.n, g.m) == (4, 4)


def test_detect_and_metrics(tmp_path, capsys):
    part = tmp_path / "lm.tsv"
    assert main(["detect", KARATE, "-a", "LM", "--out", str(part)]) == 0
    assert main(["metrics", KARATE, str(part), "--gt", FACTIONS, "--out", str(tmp_path / "m.json")]) == 0
    data = json.loads((tmp_path / "m.json").read_text())
    assert data["structural"]["modularity"] == pytest.approx(0.419789612097)
    assert set(data["functional"]) == {"RI", "ARI", "NMI", "VI", "SJD"}


def test_bad_input_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.edges"
    bad.write_text("a b\nb b\n")
    assert main(["eval", str(bad), "--out", str(tmp_path)]) == 1
    assert "bad.edges:2" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "commeval", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "eval" in proc.stdout
