import json
import subprocess
import sys

import pytest

from epdkit import datasets
from epdkit.cli import main

NWK = str(datasets.path("figure2.nwk"))
CSV = str(datasets.path("figure2.csv"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_greedy_figure2(capsys):
    code, out, _ = run(capsys, "greedy", NWK, CSV, "--k", 3)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "base ePD\t30.8416"
    assert [ln.split("\t")[1] for ln in lines[1:4]] == ["1", "6", "8"]
    assert "gain 10.7520" in lines[1] and "gain 8.0064" in lines[2] and "gain 6.0000" in lines[3]
    assert lines[-1] == "final ePD\t55.6000"


def test_greedy_rho(capsys):
    code, out, _ = run(capsys, "greedy", NWK, CSV, "--rho", 0.25)
    assert code == 0 and out.count("gain") == 2


def test_greedy_needs_budget(capsys):
    code, _, err = run(capsys, "greedy", NWK, CSV)
    assert code == 2 and "--k" in err


def test_epd_and_hedge(capsys):
    code, out, _ = run(capsys, "epd", NWK, CSV)
    assert code == 0 and "ePD (scenario 1)\t30.8416" in out
    code, out, _ = run(capsys, "hedge", NWK, CSV)
    assert code == 0
    assert out.splitlines()[:2] == ["1\t10.7520", "6\t8.0064"]


def test_category_table_uses_midpoints(tmp_path, capsys):
    table = tmp_path / "cats.csv"
    table.write_text("species,category\n" + "".join(f"{i},3\n" for i in range(1, 9)))
    code, out, _ = run(capsys, "epd", NWK, table)
    assert code == 0 and "midpoints" in out


def test_mismatched_table(tmp_path, capsys):
    table = tmp_path / "bad.csv"
    table.write_text("species,category\n" + "".join(f"{i},3\n" for i in range(1, 8)) + "X9,2\n")
    code, _, err = run(capsys, "greedy", NWK, table, "--k", 2)
    assert code != 0
    assert "'X9'" in err


def test_bad_newick(tmp_path, capsys):
    f = tmp_path / "t.nwk"
    f.write_text("(A:1,B:1")
    code, _, err = run(capsys, "epd", f, CSV)
    assert code == 2 and "line 1" in err


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code != 0


def test_console_script_exit_status():
    proc = subprocess.run(
        [sys.executable, "-m", "epdkit.cli", "nope"], capture_output=True, text=True
    )
    assert proc.returncode != 0 and "invalid choice" in proc.stderr


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--instances", 30, "--seed", 4)
    assert code == 0
    assert out.count("PASS") == 3


def test_gen(tmp_path, capsys):
    code, _, _ = run(capsys, "gen", "--instances", 2, "--seed", 3, "--out", tmp_path, "--tree-kind", "ultrametric")
    assert code == 0
    d = tmp_path / "instance_00001"
    assert sorted(p.name for p in d.iterdir()) == [
        "categories.csv",
        "manifest.json",
        "probabilities.csv",
        "tree.nwk",
    ]
    manifest = json.loads((d / "manifest.json").read_text())
    assert manifest["index"] == 1 and manifest["tree_kind"] == "ultrametric"
    # the written files feed straight back into the other commands
    code, out, _ = run(capsys, "greedy", d / "tree.nwk", d / "probabilities.csv", "--k", manifest["k"])
    assert code == 0


def test_experiment_deterministic(tmp_path, capsys):
    outs = []
    for name, workers in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / name
        code, text, _ = run(capsys, "experiment", "--instances", 6, "--seed", 9, "--out", out, "--workers", workers)
        assert code == 0 and "mean gap" in text
        outs.append({p.name: p.read_bytes() for p in out.iterdir()})
    assert set(outs[0]) == {"summary.json", "results.csv"}
    assert outs[0] == outs[1] == outs[2]


def test_experiment_fixed_tree(tmp_path, capsys):
    table = tmp_path / "cats.csv"
    table.write_text("species,category\n" + "".join(f"{i},{1 + i % 5}\n" for i in range(1, 9)))
    code, _, _ = run(
        capsys, "experiment", NWK, table, "--tree-kind", "fixed", "--instances", 4,
        "--intervals-preset", "table2", "--rho", 0.25, "--out", tmp_path / "s",
    )
    assert code == 0
    code, _, _ = run(
        capsys, "experiment", NWK, table, "--tree-kind", "fixed", "--perturb", 0.5,
        "--instances", 3, "--rho", 0.25, "--out", tmp_path / "p",
    )
    assert code == 0
    code, _, err = run(capsys, "experiment", "--tree-kind", "fixed", "--instances", 1)
    assert code == 2 and "TREE" in err
