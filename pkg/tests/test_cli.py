import csv
import subprocess
import sys
from fractions import Fraction

import pytest

from threshold_cp.cli import main
from threshold_cp.graph_gen import read_graph
from threshold_cp.isoperimetry import AUDIT_COLUMNS


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def graph_file(tmp_path):
    path = tmp_path / "g.txt"
    assert main(["generate", "--n", "200", "--r", "4", "--seed", "3", "--out", str(path)]) == 0
    return path


def test_generate(graph_file):
    g = read_graph(graph_file)
    assert (g.n, g.r, g.seed) == (200, 4, 3)
    assert graph_file.read_text().startswith("# regular-graph n=200 r=4 seed=3")


def test_generate_rejects_odd(tmp_path):
    with pytest.raises(ValueError):
        main(["generate", "--n", "5", "--r", "3", "--out", str(tmp_path / "x")])


def test_simulate(graph_file, tmp_path):
    out = tmp_path / "traj.csv"
    main(["simulate", "--graph", str(graph_file), "--p", "0.9", "--t-max", "30",
          "--seed", "1", "--out", str(out)])
    rows = _rows(out)
    assert list(rows[0]) == ["t", "occupied", "density"]
    assert rows[0]["occupied"] == "200" and float(rows[0]["density"]) == 1.0
    assert [int(r["t"]) for r in rows] == list(range(len(rows)))
    for r in rows:
        assert int(r["occupied"]) == round(float(r["density"]) * 200)


def test_simulate_random_init_extinct(graph_file, tmp_path):
    out = tmp_path / "traj.csv"
    main(["simulate", "--graph", str(graph_file), "--p", "0.1", "--init", "random:0.5",
          "--out", str(out)])
    assert _rows(out)[-1]["occupied"] == "0"


def test_audit(graph_file, tmp_path):
    out = tmp_path / "audit.csv"
    main(["audit", "--graph", str(graph_file), "--m", "10", "--eta", "0.5", "--samples", "50",
          "--sampler", "mixed", "--out", str(out)])
    rows = _rows(out)
    assert tuple(rows[0]) == AUDIT_COLUMNS
    assert len(rows) == 50
    assert all(int(r["star1"]) + int(r["star2"]) <= 40 for r in rows)


def test_oracle_cross_edges(tmp_path):
    out = tmp_path / "pmf.csv"
    main(["oracle", "--n", "2", "--r", "2", "--m", "1", "--stat", "cross-edges", "--out", str(out)])
    rows = _rows(out)
    got = {int(r["s"]): Fraction(int(r["numerator"]), int(r["denominator"])) for r in rows}
    assert got == {0: Fraction(1, 3), 2: Fraction(2, 3)}


def test_oracle_event(tmp_path):
    out = tmp_path / "ev.csv"
    main(["oracle", "--n", "4", "--r", "3", "--m", "4", "--stat", "E", "--k", "4",
          "--simple", "--out", str(out)])
    (row,) = _rows(out)
    assert (row["numerator"], row["denominator"], row["simple"]) == ("1", "1", "1")


def test_oracle_event_needs_k(tmp_path):
    with pytest.raises(SystemExit):
        main(["oracle", "--n", "4", "--r", "3", "--m", "2", "--stat", "H", "--out", str(tmp_path / "x")])


def test_bounds(tmp_path, capsys):
    out = tmp_path / "bounds.txt"
    main(["bounds", "--r", "4", "--p", "0.2", "--out", str(out)])
    text = capsys.readouterr().out
    assert text == out.read_text()
    names = {line.split()[0] for line in text.splitlines()}
    assert {"eta", "b", "c0", "delta1", "delta2", "eps2", "log10_eps3"} <= names
    csv_rows = _rows(tmp_path / "bounds.csv")
    assert {r["name"] for r in csv_rows} == names


def test_scan_and_report(tmp_path):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("r=4\nn_list=40,80,160\np_grid=0.0,0.2,1.0\nreplicas=3\nt_max=30\n")
    out_dir = tmp_path / "out"
    main(["scan", "--config", str(cfg), "--out-dir", str(out_dir)])
    results = out_dir / "results.csv"
    assert len(_rows(results)) == 27
    assert "results_sha256=" in (out_dir / "manifest.txt").read_text()

    main(["report", "--in", str(results), "--kind", "pc", "--out", str(tmp_path / "pc.csv")])
    pc = _rows(tmp_path / "pc.csv")
    assert [(r["p_lo"], r["p_hi"]) for r in pc] == [("0.2", "1.0")] * 3

    main(["report", "--in", str(results), "--kind", "slope", "--p", "0.2",
          "--out", str(tmp_path / "slope.csv")])
    (row,) = _rows(tmp_path / "slope.csv")
    assert row["sizes"] == "3"

    main(["report", "--in", str(results), "--kind", "gap", "--out", str(tmp_path / "gap.csv")])
    gap = _rows(tmp_path / "gap.csv")
    assert len(gap) == 9


def test_scan_quenched_flag(tmp_path):
    cfg = tmp_path / "scan.cfg"
    cfg.write_text("r=4\nn_list=40\np_grid=0.5,0.9\nreplicas=2\nt_max=10\n")
    main(["scan", "--config", str(cfg), "--out-dir", str(tmp_path / "o"), "--quenched"])
    assert "quenched=True" in (tmp_path / "o" / "manifest.txt").read_text()
    assert len({r["graph_seed"] for r in _rows(tmp_path / "o" / "results.csv")}) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "threshold_cp", "--help"],
                          capture_output=True, text=True, check=True)
    for cmd in ("generate", "simulate", "audit", "oracle", "bounds", "scan", "report"):
        assert cmd in proc.stdout
