import json

import numpy as np
import pytest

from sketchdp import load_matrix, parse_matrix, save_matrix
from sketchdp.cli import main
from conftest import rank_r_matrix


def run_cli(*argv):
    return main(list(argv))


@pytest.fixture
def input_matrix(tmp_path):
    path = tmp_path / "input.mat"
    save_matrix(rank_r_matrix(24, 48, 3, seed=1, scale=5.0), path, "dense")
    return str(path)


class TestGen:
    def test_writes_dense_matrix(self, tmp_path, capsys):
        out = tmp_path / "gen.mat"
        code = run_cli("gen", "--kind", "low_mu0", "--rows", "16", "--cols", "32",
                       "--rank", "3", "--seed", "5", "--output", str(out))
        assert code == 0
        a = load_matrix(out)
        assert a.shape == (16, 32)

    def test_stdout_default(self, capsys):
        code = run_cli("gen", "--kind", "spiked", "--rows", "4", "--cols", "6",
                       "--rank", "1")
        assert code == 0
        text = capsys.readouterr().out
        assert text.startswith("dense 4 6\n")
        assert parse_matrix(text).shape == (4, 6)

    def test_sparse_format(self, capsys):
        code = run_cli("gen", "--kind", "netflix_like", "--rows", "20", "--cols", "30",
                       "--rank", "2", "--density", "0.05", "--format", "sparse")
        assert code == 0
        text = capsys.readouterr().out
        assert text.startswith("sparse 20 30 ")

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        args = ["gen", "--kind", "power_law", "--rows", "12", "--cols", "20",
                "--rank", "3", "--seed", "9"]
        assert run_cli(*args, "--output", str(a)) == 0
        assert run_cli(*args, "--output", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_usage_error_exit_1(self, capsys):
        assert run_cli("gen", "--kind", "nope", "--rows", "4", "--cols", "4",
                       "--rank", "1") == 1

    def test_inconsistent_spec_exit_1(self, capsys):
        assert run_cli("gen", "--kind", "low_mu0", "--rows", "4", "--cols", "4",
                       "--rank", "9") == 1


class TestCoherence:
    def test_json_report(self, input_matrix, capsys):
        assert run_cli("coherence", "--input", input_matrix) == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"c_coherence", "mu0_coherence", "rank_used",
                                "max_row_norm", "frobenius_norm"}
        assert payload["rank_used"] == 3

    def test_missing_input_exit_2(self, capsys):
        assert run_cli("coherence", "--input", "/nonexistent.mat") == 2

    def test_malformed_input_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.mat"
        bad.write_text("dense 2 2\n1 2 3\n")
        assert run_cli("coherence", "--input", str(bad)) == 2

    def test_byte_identical_reruns(self, input_matrix, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli("coherence", "--input", input_matrix, "--output", str(a)) == 0
        assert run_cli("coherence", "--input", input_matrix, "--output", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestApproximationCommands:
    def test_hmt_csv(self, input_matrix, capsys):
        assert run_cli("hmt", "--input", input_matrix, "--rank", "3",
                       "--trials", "2", "--seed", "3") == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("algorithm,m,n,k,")
        assert len(lines) == 3
        assert lines[1].startswith("hmt,24,48,7,3,4,")

    def test_rr_requires_budget_flags(self, input_matrix):
        assert run_cli("rr", "--input", input_matrix, "--rank", "3") == 1

    def test_rr_rejects_bad_epsilon(self, input_matrix):
        assert run_cli("rr", "--input", input_matrix, "--rank", "3",
                       "--epsilon", "2.0", "--delta", "1e-5") == 1

    def test_pfp_csv_and_determinism(self, input_matrix, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["pfp", "--input", input_matrix, "--rank", "3", "--oversample", "3",
                "--epsilon", "0.9", "--delta", "1e-4", "--trials", "3", "--seed", "11"]
        assert run_cli(*args, "--output", str(a)) == 0
        assert run_cli(*args, "--output", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_pfp_dense_output(self, input_matrix, tmp_path, capsys):
        out = tmp_path / "b.mat"
        assert run_cli("pfp", "--input", input_matrix, "--rank", "3",
                       "--epsilon", "0.9", "--delta", "1e-4",
                       "--format", "dense", "--output", str(out)) == 0
        b = load_matrix(out)
        assert b.shape == (24, 48)
        err = capsys.readouterr().err
        assert "error_frobenius=" in err

    def test_dense_format_needs_single_trial(self, input_matrix):
        assert run_cli("hmt", "--input", input_matrix, "--rank", "3",
                       "--trials", "2", "--format", "dense") == 1

    def test_pfp_alpha_flag(self, input_matrix, capsys):
        assert run_cli("pfp", "--input", input_matrix, "--rank", "3",
                       "--epsilon", "0.9", "--delta", "1e-4",
                       "--mode", "c", "--alpha", "0.25") == 0
        lines = capsys.readouterr().out.strip().split("\n")
        alpha_field = lines[1].split(",")[8]
        assert float(alpha_field) == 0.25

    def test_pfp_auto_alpha_warns_on_stderr(self, input_matrix, capsys):
        assert run_cli("pfp", "--input", input_matrix, "--rank", "3",
                       "--epsilon", "0.9", "--delta", "1e-4",
                       "--mode", "c", "--alpha", "auto") == 0
        assert "privat" in capsys.readouterr().err


class TestSweep:
    def test_csv_grid(self, capsys):
        assert run_cli("sweep", "--m-grid", "16,24", "--n-grid", "32",
                       "--k-grid", "6", "--epsilon-grid", "0.9",
                       "--rank", "3", "--delta", "1e-4",
                       "--kinds", "low_mu0", "--algorithms", "pfp,rr",
                       "--trials", "1", "--seed", "0") == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 1 + 2 * 2
        assert lines[0].count(",") == lines[1].count(",")

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", "--m-grid", "16", "--n-grid", "32", "--k-grid", "6",
                "--epsilon-grid", "0.9", "--rank", "3", "--delta", "1e-4",
                "--kinds", "spiked", "--trials", "2", "--seed", "3"]
        assert run_cli(*args, "--output", str(a)) == 0
        assert run_cli(*args, "--output", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestAttack:
    def test_identity_full_recovery(self, capsys):
        assert run_cli("attack", "--mechanism", "identity", "--nbits", "100",
                       "--rows", "8", "--rank", "4", "--seed", "1") == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("mechanism,nbits,m,k,")
        fields = lines[1].split(",")
        assert fields[0] == "identity"
        assert float(fields[5]) == 1.0

    def test_rr_needs_budget(self):
        assert run_cli("attack", "--mechanism", "rr", "--nbits", "100",
                       "--rows", "8", "--rank", "4") == 1

    def test_rr_partial_recovery(self, capsys):
        assert run_cli("attack", "--mechanism", "rr", "--nbits", "1000",
                       "--rows", "8", "--rank", "4", "--epsilon", "1.0",
                       "--delta", "1e-5", "--trials", "3", "--seed", "2") == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert len(lines) == 4
        for line in lines[1:]:
            frac = float(line.split(",")[5])
            assert 0.4 < frac < 0.75

    def test_nbits_divisibility(self):
        assert run_cli("attack", "--mechanism", "identity", "--nbits", "10",
                       "--rows", "8", "--rank", "4") == 1

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["attack", "--mechanism", "rr", "--nbits", "200", "--rows", "6",
                "--rank", "2", "--epsilon", "0.8", "--delta", "1e-4",
                "--trials", "2", "--seed", "7"]
        assert run_cli(*args, "--output", str(a)) == 0
        assert run_cli(*args, "--output", str(b)) == 0
        assert a.read_bytes() == b.read_bytes()


class TestEntryPoint:
    def test_missing_subcommand_exit_1(self):
        assert run_cli() == 1

    def test_console_script_installed(self):
        import shutil
        import subprocess

        exe = shutil.which("sketchdp")
        assert exe is not None
        proc = subprocess.run([exe, "gen", "--kind", "spiked", "--rows", "3",
                               "--cols", "4", "--rank", "1"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert proc.stdout.startswith("dense 3 4\n")
