import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from gwdict.cli import main
from gwdict.io import read_triplets


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def path4_file(tmp_path):
    return write(tmp_path / "path4.tsv", "0\t1\n1\t2\n2\t3\n")


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestPartition:
    def test_path4_to_stdout(self, path4_file, capsys):
        assert main(["partition", "--graph", path4_file]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["V1"] == [2, 3] and out["V2"] == [0, 1]
        assert out["hubs"] == [0, 3]
        cert = out["certificate"]
        assert cert["connected_V1"] and cert["connected_V2"] and cert["bound_holds"]
        assert cert["balance_gap"] == 0

    def test_labels_survive(self, tmp_path, capsys):
        g = write(tmp_path / "g.tsv", "a\tb\nb\tc\nc\td\n")
        assert main(["partition", "--graph", g]) == 0
        out = json.loads(capsys.readouterr().out)
        assert sorted(out["V1"] + out["V2"]) == ["a", "b", "c", "d"]

    def test_out_file_and_run_manifest(self, path4_file, tmp_path):
        out = str(tmp_path / "p")
        assert main(["partition", "--graph", path4_file, "--out", out]) == 0
        assert json.loads((tmp_path / "p.json").read_text())["median"] == 1.0
        run = json.loads((tmp_path / "p.run.json").read_text())
        assert run["outputs"] == [out + ".json"]
        assert path4_file in run["inputs"]

    def test_disconnected_graph(self, tmp_path, capsys):
        g = write(tmp_path / "g.tsv", "0\t1\n2\t3\n")
        assert main(["partition", "--graph", g]) == 2
        err = capsys.readouterr().err
        assert "disconnected" in err and "{0, 1}" in err and "{2, 3}" in err

    def test_too_small(self, tmp_path, capsys):
        g = write(tmp_path / "g.tsv", "5\n")
        assert main(["partition", "--graph", g]) == 2
        assert "too small" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["partition", "--graph", str(tmp_path / "nope.tsv")]) == 2
        assert "nope.tsv" in capsys.readouterr().err


class TestWavelets:
    def test_path4_dump(self, path4_file, tmp_path):
        out = str(tmp_path / "w")
        assert main(["wavelets", "--graph", path4_file, "--out", out]) == 0
        w = read_triplets(out + ".basis.csv", (4, 4)).toarray()
        assert np.count_nonzero(w) == 12
        np.testing.assert_allclose(w.T @ w, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(w[:, 0], 0.5)
        tree = json.loads((tmp_path / "w.tree.json").read_text())
        assert tree["n"] == 4 and tree["depth"] == 2 and tree["nnz"] == 12
        assert tree["columns"][0] is None and len(tree["columns"]) == 4

    def test_single_node(self, tmp_path):
        g = write(tmp_path / "g.tsv", "0\n")
        out = str(tmp_path / "w")
        assert main(["wavelets", "--graph", g, "--out", out]) == 0
        np.testing.assert_array_equal(read_triplets(out + ".basis.csv", (1, 1)).toarray(), [[1.0]])


@pytest.mark.parametrize("kind, atoms", [("pc", 7), ("ps", 10)])
def test_dict_dump(path4_file, tmp_path, kind, atoms):
    out = str(tmp_path / kind)
    assert main(["dict", kind, "--graph", path4_file, "--bandwidth", "2", "--out", out]) == 0
    man = json.loads((tmp_path / f"{kind}.manifest.json").read_text())
    assert man["kind"] == kind and man["n_atoms"] == atoms
    d = read_triplets(out + ".atoms.csv", (4, atoms)).toarray()
    np.testing.assert_allclose(np.linalg.norm(d, axis=0), 1.0, atol=1e-12)
    assert np.count_nonzero(d) == man["nnz"]


class TestApprox:
    @pytest.fixture
    def grid_signal(self, tmp_path):
        base = str(tmp_path / "grid")
        assert main(["synth", "graph", "grid", "--rows", "6", "--cols", "6", "--out", base]) == 0
        sig = str(tmp_path / "sig")
        assert main(["synth", "signal", "--graph", base + ".tsv", "--model", "pc", "--pieces", "3",
                     "--seed", "4", "--out", sig]) == 0
        return base + ".tsv", sig + ".csv", json.loads((tmp_path / "sig.json").read_text())

    def test_pc_signal_exact_within_bound(self, grid_signal, tmp_path):
        graph, signal, side = grid_signal
        out = str(tmp_path / "a")
        assert main(["approx", "--graph", graph, "--signal", signal, "--dict", "pc,ps,gft,delta",
                     "--bandwidth", "3", "--out", out]) == 0
        summary = json.loads((tmp_path / "a.summary.json").read_text())
        assert summary["pc_bound"] == side["pc_bound"]
        exact = summary["dictionaries"]["pc"]["exact_budget"]
        assert exact is not None and exact <= min(summary["pc_bound"], 36)
        rows = read_csv(out + ".csv")
        kinds = {r["method"].split(":")[0] for r in rows}
        assert kinds == {"pc", "ps", "gft", "delta"}
        for kind in kinds:
            e = [float(r["nmse"]) for r in rows if r["method"].startswith(kind + ":")]
            assert len(e) == 36
            assert all(b <= a + 1e-12 for a, b in zip(e, e[1:]))

    def test_zero_signal_rejected(self, path4_file, tmp_path, capsys):
        sig = write(tmp_path / "z.txt", "0\n0\n0\n0\n")
        assert main(["approx", "--graph", path4_file, "--signal", sig, "--out", str(tmp_path / "a")]) == 2

    def test_wrong_length(self, path4_file, tmp_path):
        sig = write(tmp_path / "s.txt", "1\n2\n")
        assert main(["approx", "--graph", path4_file, "--signal", sig, "--out", str(tmp_path / "a")]) == 2


class TestLocalize:
    @pytest.fixture
    def grid(self, tmp_path):
        base = str(tmp_path / "grid")
        main(["synth", "graph", "grid", "--rows", "8", "--cols", "8", "--out", base])
        return base + ".tsv"

    def test_noise_free_is_capped(self, grid, tmp_path):
        out = str(tmp_path / "l")
        assert main(["localize", "--graph", grid, "--bandwidth", "3", "--sigma", "0", "--trials", "3",
                     "--out", out]) == 0
        (row,) = read_csv(out + ".csv")
        assert float(row["snr_in"]) == 300.0 and float(row["snr_out"]) == 300.0

    def test_default_levels_and_rerun(self, grid, tmp_path):
        a, b = str(tmp_path / "a"), str(tmp_path / "b")
        args = ["localize", "--graph", grid, "--bandwidth", "3", "--trials", "4"]
        assert main(args + ["--out", a]) == 0
        assert main(args + ["--out", b]) == 0
        rows = read_csv(a + ".csv")
        assert [float(r["sigma"]) for r in rows] == [0.05, 0.1, 0.2, 0.5]
        assert all(float(r["snr_out"]) > float(r["snr_in"]) for r in rows[:2])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_synth_graph_sidecar(tmp_path):
    out = str(tmp_path / "er")
    assert main(["synth", "graph", "erdos_renyi", "--n", "40", "--seed", "3", "--out", out]) == 0
    side = json.loads((tmp_path / "er.json").read_text())
    assert side["n"] == 40 and side["seed"] == 3
    assert len((tmp_path / "er.tsv").read_text().splitlines()) >= side["n_edges"]


def test_synth_pbl_signal(tmp_path):
    base = str(tmp_path / "g")
    main(["synth", "graph", "random_geometric", "--n", "50", "--seed", "1", "--out", base])
    sig = str(tmp_path / "s")
    assert main(["synth", "signal", "--graph", base + ".tsv", "--model", "pbl", "--bandwidth", "2",
                 "--noise-sigma", "0.1", "--out", sig]) == 0
    assert len(read_csv(sig + ".csv")) == 50
    assert json.loads((tmp_path / "s.json").read_text())["noise_sigma"] == 0.1


def test_bad_arguments_exit_with_usage(capsys):
    with pytest.raises(SystemExit) as info:
        main(["dict", "wavelet", "--graph", "x", "--out", "y"])
    assert info.value.code == 2


def test_console_entry_point(path4_file):
    proc = subprocess.run([sys.executable, "-m", "gwdict.cli", "partition", "--graph", path4_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["V2"] == [0, 1]
    assert json.loads(proc.stderr)["version"]
