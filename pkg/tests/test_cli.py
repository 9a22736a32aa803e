import json
import subprocess
import sys

import pytest

from tmpk.cli import main
from tmpk.decompositions import exact_treewidth, format_td
from tmpk.gadgets import random_screened_instance
from tmpk.graph import complete_graph, cycle_graph, disjoint_union, format_graph, path_graph, star_graph


@pytest.fixture
def files(tmp_path):
    def write(name, g):
        p = tmp_path / name
        p.write_text(format_graph(g))
        return str(p)

    return write


def run(argv):
    return main([str(a) for a in argv])


def load(path):
    with open(path) as fh:
        return json.load(fh)


def test_decompose_tree_path5(files, tmp_path):
    out = tmp_path / "r.json"
    assert run(["decompose-tree", files("p5", path_graph(5)), "--hd", 1, 3, "--out", out]) == 0
    doc = load(out)
    assert doc["kind"] == "tree-partition"
    assert doc["payload"]["quotient_width"] == 1
    assert doc["verdicts"]["status"] == "ok"


def test_decompose_tree_tree_file(files, tmp_path):
    out = tmp_path / "r.json"
    code = run(["decompose-tree", files("k4", complete_graph(4)), "--tree-file", files("star4", star_graph(3)),
                "--out", out])
    assert code == 10 and load(out)["kind"] == "tree-model"


def test_decompose_tree_screened(files, tmp_path):
    g = random_screened_instance(2, 3, 10, 0.2, seed=3)
    out = tmp_path / "r.json"
    assert run(["decompose-tree", files("g", g), "--hd", 2, 3, "--seed", 3, "--out", out]) == 0
    doc = load(out)
    assert doc["verdicts"]["status"] == "ok" and doc["parameters"]["seed"] == 3


@pytest.mark.parametrize("g,h,kind,code", [
    (disjoint_union(complete_graph(2), complete_graph(2)), 1, "path-partition", 0),
    (path_graph(5), 2, "long-path", 10),
    (path_graph(4), 2, "path-partition", 0),
])
def test_decompose_path(files, tmp_path, g, h, kind, code):
    out = tmp_path / "r.json"
    assert run(["decompose-path", files("g", g), "--h", h, "--out", out]) == code
    doc = load(out)
    assert doc["kind"] == kind
    if kind == "path-partition":
        assert doc["payload"]["forest_height"] <= h


def test_round_trip_and_tamper(files, tmp_path, capsys):
    gpath = files("c6", cycle_graph(6))
    docs = []
    for argv, name in [(["decompose-tree", gpath, "--hd", 1, 2], "a"),
                       (["decompose-tree", gpath, "--hd", 2, 2], "b"),
                       (["decompose-path", gpath, "--h", 2], "c"),
                       (["decompose-path", gpath, "--h", 4], "d")]:
        out = tmp_path / f"{name}.json"
        run(argv + ["--out", out])
        docs.append(out)
    assert run(["verify", gpath, *docs]) == 0
    assert [load(d)["kind"] for d in docs] == ["tree-model", "tree-partition", "long-path", "path-partition"]

    partition_doc = next(d for d in docs if load(d)["kind"].endswith("partition"))
    doc = load(partition_doc)
    parts = doc["payload"]["parts"]
    src = next(i for i, p in enumerate(parts) if len(p) > 1) if any(len(p) > 1 for p in parts) else 1
    dst = 0 if src != 0 else 1
    v = parts[src].pop()
    parts[dst] = sorted(parts[dst] + [v])
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    capsys.readouterr()
    assert run(["verify", gpath, bad]) == 4
    assert "FAILED" in capsys.readouterr().out


def test_verify_detects_wrong_graph(files, tmp_path):
    out = tmp_path / "r.json"
    run(["decompose-tree", files("p5", path_graph(5)), "--hd", 1, 3, "--out", out])
    assert run(["verify", files("p6", path_graph(6)), out]) == 4


def test_determinism(files, tmp_path):
    g = random_screened_instance(2, 2, 11, 0.25, seed=8)
    gpath = files("g", g)
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        run(["decompose-tree", gpath, "--hd", 2, 2, "--seed", 8, "--out", out])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_td_file_input(files, tmp_path):
    g = cycle_graph(7)
    td = tmp_path / "c7.td"
    td.write_text(format_td(exact_treewidth(g)[1], g.n))
    out = tmp_path / "r.json"
    assert run(["decompose-tree", files("c7", g), "--hd", 1, 3, "--td-file", td, "--out", out]) == 0
    assert len(load(out)["payload"]["decomposition"]["bags"]) == len(exact_treewidth(g)[1].bags)
    wrong = tmp_path / "wrong.td"
    wrong.write_text(format_td(exact_treewidth(path_graph(3))[1], 3))
    assert run(["decompose-tree", files("c7", g), "--hd", 1, 3, "--td-file", wrong]) == 2


def test_error_codes(tmp_path, files, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 5\n0 1\n")
    assert run(["decompose-tree", bad, "--hd", 1, 3]) == 2
    assert run(["decompose-tree", tmp_path / "missing.txt", "--hd", 1, 3]) == 2
    assert run(["decompose-tree", files("p5", path_graph(5)), "--hd", 1, 3, "--max-n", 3]) == 3
    assert run(["decompose-tree", files("p5", path_graph(5)), "--hd", 1, 1]) == 2
    assert run(["exact", files("p9", path_graph(9)), "--measure", "treedepth", "--max-n", 5]) == 3
    with pytest.raises(SystemExit) as exc:
        run(["decompose-tree", files("p5", path_graph(5))])
    assert exc.value.code == 2


def test_budget_exhaustion_exit_code(files, monkeypatch):
    monkeypatch.setenv("TMPK_MAX_STEPS", "2")
    g = random_screened_instance(2, 3, 12, 0.3, seed=1)
    assert run(["decompose-tree", files("g", g), "--hd", 2, 3]) == 3


def test_exact_k4(files, capsys):
    assert run(["exact", files("k4", complete_graph(4)), "--measure", "pathwidth"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == 3


@pytest.mark.parametrize("measure,value", [("treewidth", 2), ("treedepth", 4), ("longest-path", 5),
                                           ("clique-number", 2)])
def test_exact_measures(files, capsys, measure, value):
    assert run(["exact", files("c5", cycle_graph(5)), "--measure", measure]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == value


def test_product_emission(files, capsys):
    assert run(["product", files("p3", path_graph(3)), "--c", 2]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "6 11"


def test_product_checks_partition(files, tmp_path, capsys):
    gpath = files("c8", cycle_graph(8))
    out = tmp_path / "r.json"
    run(["decompose-path", gpath, "--h", 3, "--out", out])
    if load(out)["kind"] != "path-partition":
        run(["decompose-tree", gpath, "--hd", 1, 3, "--out", out])
    capsys.readouterr()
    assert run(["product", gpath, "--result", out]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "ok"
    assert rep["width"] == max(len(p) for p in load(out)["payload"]["parts"])
    assert run(["product", gpath, "--result", out, "--c", 0]) == 4


def test_gadget(tmp_path, capsys):
    gout = tmp_path / "g.txt"
    out = tmp_path / "rep.json"
    assert run(["gadget", "--h", 2, "--c", 1, "--graph-out", gout, "--out", out]) == 0
    doc = load(out)
    assert doc["kind"] == "gadget-report" and doc["input"]["n"] == 11
    assert run(["verify", gout, out]) == 0
    assert run(["gadget", "--h", 3, "--c", 3, "--preview"]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["n"] > 1000
    assert run(["gadget", "--h", 3, "--c", 3]) == 3


def test_dot_output(files, capsys):
    assert run(["decompose-tree", files("p5", path_graph(5)), "--hd", 1, 3, "--format", "dot"]) == 0
    text = capsys.readouterr().out
    assert text.startswith('graph "tree-partition"') and "p0 -- p1;" in text


def test_batch(tmp_path, capsys):
    outs = []
    for name, jobs in [("a", 1), ("b", 2)]:
        d = tmp_path / name
        assert run(["batch", "--hd", 2, 2, "--count", 4, "--n", 9, "--p", 0.3, "--seed", 5,
                    "--out-dir", d, "--jobs", jobs]) == 0
        outs.append(sorted((p.name, p.read_bytes()) for p in d.iterdir()))
    assert outs[0] == outs[1]
    assert len(outs[0]) == 9


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "tmpk", "decompose-path", files("p5", path_graph(5)), "--h", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 10
    assert json.loads(proc.stdout)["kind"] == "long-path"
