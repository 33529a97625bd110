"""Tests for the command-line interface and its exit-code contract."""

import json

import pytest

from bnit.cli import main
from bnit.sweeps import CSV_HEADER


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGen:
    def test_instance_file_regenerable(self, tmp_path, capsys):
        """The same seed regenerates an identical instance document."""
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        for out in (out1, out2):
            code, _, _ = run_cli(capsys, "gen", "mixture_trees", "--n", "12",
                                 "--d", "2", "--eps", "0.3", "--seed", "7",
                                 "--out", str(out))
            assert code == 0
        doc1 = json.loads(out1.read_text())
        doc2 = json.loads(out2.read_text())
        assert doc1 == doc2
        assert doc1["params"]["N"] == 11

    def test_odd_child_count_strict_exit_2(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "gen", "mixture_trees", "--n", "12",
                               "--d", "4", "--require-even",
                               "--out", str(tmp_path / "x.json"))
        assert code == 2
        assert "OddChildCount" in err

    def test_paninski_tv(self, tmp_path, capsys):
        """Default C = 2 puts the family at TV exactly eps/2*C = eps."""
        out = tmp_path / "p.json"
        code, _, _ = run_cli(capsys, "gen", "paninski", "--n", "8",
                             "--eps", "0.2", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["params"]["C_eps"] == pytest.approx(0.4)

    def test_regime_error_exit_2(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "gen", "mixture_products", "--n", "6",
                               "--d", "5", "--out", str(tmp_path / "x.json"))
        assert code == 2
        assert "RegimeViolation" in err


class TestTest:
    def test_product_accepts_exit_0(self, capsys):
        code, out, _ = run_cli(capsys, "test", "--product", "--n", "6",
                               "--d", "1", "--eps", "0.3", "--seed", "3")
        assert code == 0
        doc = json.loads(out.splitlines()[-1])
        assert doc["verdict"] == "accept"

    def test_far_instance_rejects_exit_1(self, tmp_path, capsys):
        inst = tmp_path / "far.json"
        run_cli(capsys, "gen", "mixture_trees", "--n", "8", "--d", "1",
                "--eps", "0.25", "--seed", "5", "--out", str(inst))
        code, out, _ = run_cli(capsys, "test", str(inst), "--eps", "0.25",
                               "--seed", "6")
        assert code == 1
        doc = json.loads(out.splitlines()[-1])
        assert doc["verdict"] == "reject"
        assert doc["witness_subset"] is not None

    def test_malformed_file_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run_cli(capsys, "test", str(bad))
        assert code == 2
        assert "bad.json" in err

    def test_missing_source_exit_2(self, capsys):
        code, _, _ = run_cli(capsys, "test")
        assert code == 2


class TestPower:
    def test_csv_schema_and_determinism(self, tmp_path, capsys):
        args = ["power", "--family", "mixture_trees", "--n", "8", "--d", "1",
                "--eps", "0.1", "--m", "3000", "--trials", "3",
                "--seed", "9", "--stable-timing"]
        code, out1, _ = run_cli(capsys, *args)
        assert code == 0
        code, out2, _ = run_cli(capsys, *args, "--threads", "4")
        assert out1 == out2
        lines = out1.splitlines()
        assert lines[0] == CSV_HEADER
        assert lines[1].startswith("mixture_trees,8,1,0.1,3000,3,")

    def test_grid_expansion(self, capsys):
        code, out, _ = run_cli(capsys, "power", "--family", "product",
                               "--n", "5,6", "--d", "1", "--m", "2000",
                               "--trials", "1", "--stable-timing")
        assert code == 0
        assert len(out.strip().splitlines()) == 3  # header + 2 cells

    def test_needs_family_or_suite(self, capsys):
        code, _, _ = run_cli(capsys, "power", "--trials", "1")
        assert code == 2


class TestAudit:
    def test_product_instance_near_zero(self, tmp_path, capsys):
        inst = tmp_path / "prod.json"
        run_cli(capsys, "gen", "product", "--n", "4", "--seed", "2",
                "--out", str(inst))
        code, out, _ = run_cli(capsys, "audit", str(inst),
                               "--restarts", "4")
        assert code == 0
        doc = json.loads(out.splitlines()[-1])
        assert doc["tv_to_prod_marginals"] == pytest.approx(0.0, abs=1e-9)
        assert doc["empirical_min_tv"] == pytest.approx(0.0, abs=1e-6)

    def test_mixture_instance_certified(self, tmp_path, capsys):
        inst = tmp_path / "mix.json"
        run_cli(capsys, "gen", "mixture_trees", "--n", "10", "--d", "2",
                "--eps", "0.3", "--seed", "3", "--out", str(inst))
        code, out, _ = run_cli(capsys, "audit", str(inst),
                               "--restarts", "4")
        assert code == 0
        doc = json.loads(out.splitlines()[-1])
        assert doc["certified_lower_bound"] > 0.0


class TestBounds:
    def test_exact_suite_exit_0(self, capsys):
        code, out, _ = run_cli(capsys, "bounds", "--suite", "exact")
        assert code == 0
        for line in out.strip().splitlines():
            doc = json.loads(line)
            assert doc["violations"] == 0


class TestCalibrate:
    def test_repeatable(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("BNIT_CACHE_DIR", str(tmp_path))
        args = ["calibrate", "--k", "8", "--eps", "0.3", "--m", "2000",
                "--trials", "1000", "--seed", "1"]
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert json.loads(out1)["threshold"] == \
            json.loads(out2)["threshold"]
