import json

import pytest

from treembed.cli import main
from treembed.io import dumps_two_round, read_embedding, read_tree, write_graph
from treembed.rgraph import Graph, gnp, gnp_two_round
from treembed.treegen import path_tree, t_n_delta


@pytest.fixture(autouse=True)
def no_env_seed(monkeypatch):
    monkeypatch.delenv("TREEMBED_SEED", raising=False)


def test_gen_tree(tmp_path, capsys):
    out = tmp_path / "t.txt"
    assert main(["gen-tree", "--kind", "tndelta", "--n", "20", "--delta", "5", "--out", str(out)]) == 0
    assert read_tree(out) == t_n_delta(20, 5)
    assert main(["gen-tree", "--kind", "path", "--n", "3"]) == 0
    assert capsys.readouterr().out == "3 2\n0 1\n1 2\n"


def test_gen_tree_seed_env_overrides_flag(monkeypatch, capsys):
    main(["--seed", "1", "gen-tree", "--kind", "random", "--n", "30"])
    a = capsys.readouterr().out
    main(["gen-tree", "--kind", "random", "--n", "30", "--seed", "2"])
    b = capsys.readouterr().out
    monkeypatch.setenv("TREEMBED_SEED", "1")
    main(["gen-tree", "--kind", "random", "--n", "30", "--seed", "2"])
    c = capsys.readouterr().out
    assert a != b and a == c


def test_embed_success_report(tmp_path, capsys):
    report = tmp_path / "r.json"
    emb = tmp_path / "e.txt"
    code = main(["embed", "--tree", "comb", "--n", "400", "--p", "0.6", "--eps", "0.5", "--seed", "3", "--report", str(report), "--out", str(emb)])
    assert code == 0
    doc = json.loads(report.read_text())
    assert set(doc) == {"case", "phase_outcomes", "n", "p", "p_prime", "seed", "millis", "success"}
    assert doc["success"] is True and doc["case"] == 1 and doc["seed"] == 3 and doc["n"] == 400
    assert len(read_embedding(emb)) == 400


def test_embed_phase_failure_exit_code(capsys):
    code = main(["embed", "--tree", "tndelta", "--n", "300", "--delta", "10", "--p", "0.01"])
    assert code == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["success"] is False and doc["failed_phase"] == "forest"


def test_embed_fixed_hosts(tmp_path):
    tree_file = tmp_path / "t.txt"
    tree_file.write_text("".join(["10 9\n"] + [f"{i} {i + 1}\n" for i in range(9)]))
    host = tmp_path / "g.txt"
    write_graph(host, Graph.complete(10))
    assert main(["embed", "--tree", str(tree_file), "--graph", str(host)]) == 0
    two = tmp_path / "h.txt"
    two.write_text(dumps_two_round(gnp_two_round(10, 1.0, 0)))
    assert main(["embed", "--tree", str(tree_file), "--graph", str(two)]) == 0
    write_graph(host, gnp(11, 0.5, 0))
    assert main(["embed", "--tree", str(tree_file), "--graph", str(host)]) == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["embed", "--tree", "nonsense", "--n", "10", "--p", "0.5"],
        ["embed", "--tree", "path", "--n", "10"],
        ["embed", "--tree", "tndelta", "--n", "10", "--p", "0.5"],
        ["embed", "--tree", "path", "--n", "10", "--p", "2.0"],
        ["bound", "--n", "10"],
        ["frobnicate"],
        [],
        ["embed", "--n", "ten"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_bound(capsys):
    assert main(["bound", "--n", "100", "--k", "10", "--p", "0.1"]) == 0
    lines = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert abs(float(lines["ln"]) - -8.105339637305308) < 1e-9
    assert abs(float(lines["log10"]) - -8.105339637305308 / 2.302585092994046) < 1e-9
    assert main(["bound", "--n", "2000", "--delta", "45", "--const", "0.1"]) == 0
    lines = dict(line.split() for line in capsys.readouterr().out.splitlines())
    assert lines["k"] == "46" and float(lines["ln"]) < -900


def test_dominate(tmp_path, capsys):
    path = tmp_path / "c5.txt"
    path.write_text("5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n")
    assert main(["dominate", "--graph", str(path), "--k", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["answer"] == "yes" and doc["witness"] == [0, 2] and doc["method"] == "exact"
    main(["dominate", "--graph", str(path), "--k", "1"])
    assert json.loads(capsys.readouterr().out)["answer"] == "no"


def test_experiment_and_threshold(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    out = tmp_path / "o.csv"
    cfg.write_text(json.dumps({"n": 100, "p": [0.001, 1.0], "trials": 3, "problem": "stars"}))
    assert main(["--threads", "1", "experiment", "--config", str(cfg), "--output", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 7
    assert "success=1.000" in capsys.readouterr().out
    assert main(["threshold", "--config", str(cfg)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert 0.001 <= doc["estimate"] <= 1.0
    cfg.write_text(json.dumps({"n": 100, "p": [0.5], "bogus": 1}))
    assert main(["experiment", "--config", str(cfg)]) == 1
