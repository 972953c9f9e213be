import json
import subprocess
import sys

from curricula.cli import main
from curricula.network import parse_network
from curricula.problems import gen_cpar, load_dataset


def test_generate_and_minfs(tmp_path, capsys):
    data = tmp_path / "cpar.txt"
    assert main(["generate", "--kind", "cpar", "--n", "5", "--out", str(data)]) == 0
    assert load_dataset(data) == gen_cpar(5)
    assert main(["minfs", str(data)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["sizes"] == [1, 2, 3, 4, 5]
    assert report["order"] == [0, 1, 2, 3, 4]
    assert report["nestedness"] == 1.0
    assert len(report["overlap"]) == 5


def test_train_prints_result(tmp_path, capsys):
    data = tmp_path / "add.txt"
    main(["generate", "--kind", "add", "--n", "2", "--out", str(data)])
    net = tmp_path / "net.txt"
    assert main(["train", "--data", str(data), "--loss", "lgh", "--curriculum", "given:1,0",
                 "--seed", "4", "--network-out", str(net)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["reached_zero"] and out["curriculum"] == [1, 0] and out["gates"] == 42
    assert parse_network(net.read_text()).n_gates == 42


def test_pairs_reports_removed_columns(tmp_path, capsys):
    ts = tmp_path / "ts.txt"
    ts.write_text("001\n001\n101\n011\n111\n")
    out = tmp_path / "pairs.txt"
    assert main(["pairs", "--in", str(ts), "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["removed_constant_targets"] == [2]
    assert load_dataset(out).n_targets == 2


def test_experiment_and_summarize(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "schema_version": 1,
        "problem": {"kind": "cpar", "n": 4},
        "train_sizes": [8],
        "replicates": 2,
        "lahc": {"history": 50, "iterations": 5000, "restarts": 0},
        "output": str(tmp_path / "rec.jsonl"),
    }))
    assert main(["experiment", "--config", str(cfg)]) == 0
    assert len((tmp_path / "rec.jsonl").read_text().splitlines()) == 4
    assert main(["summarize", "--in", str(tmp_path / "rec.jsonl"), "--group-by", "size,loss"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "problem,size,fraction,loss,target,mean_acc,diff_vs_l1,ci95"
    assert len(lines) == 1 + 2 * 5


def test_tau_sweep_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "schema_version": 1,
        "problem": {"kind": "add", "n": 2},
        "train_sizes": [12],
        "replicates": 1,
        "curriculum": {"mode": "random_tau", "permutations": 1},
        "lahc": {"iterations": 2000, "restarts": 0},
    }))
    out = tmp_path / "sweep.jsonl"
    assert main(["tau-sweep", "--config", str(cfg), "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2


def test_bad_input_reports_error(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n01x\n")
    assert main(["minfs", str(bad)]) == 2
    assert "bad.txt:2:" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "curricula", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("generate", "pairs", "minfs", "train", "experiment", "tau-sweep", "summarize"):
        assert cmd in res.stdout
