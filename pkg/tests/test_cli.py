import json
import os

import pytest

from qpanet.cli import main


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSweepCommand:
    def test_grid_row_count_and_csv(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code, _, err = run(
            [
                "sweep",
                "--family",
                "exponential",
                "--q",
                "0.2:1.0:0.2",
                "--beta",
                "2,4",
                "--theta-max",
                "4",
                "-o",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 5 * 2  # header + 5 q-values x 2 betas
        assert lines[0].startswith("family,x,beta,theta_max,")
        assert "grid points" in err

    def test_absent_critical_is_empty_field(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code, _, _ = run(
            [
                "sweep",
                "--family",
                "bernoulli",
                "--p",
                "1",
                "--beta",
                "2",
                "--theta-max",
                "8",
                "-o",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        row = out.read_text().splitlines()[1].split(",")
        assert row[4] == ""  # crit_q_mean

    def test_domain_error_exits_2(self, tmp_path, capsys):
        code, _, err = run(
            [
                "sweep",
                "--family",
                "exponential",
                "--q",
                "-1",
                "--beta",
                "2",
                "--theta-max",
                "8",
                "-o",
                str(tmp_path / "x.csv"),
            ],
            capsys,
        )
        assert code == 2
        assert "error" in err

    def test_unknown_flag_exits_2(self, capsys):
        code, _, _ = run(["sweep", "--bogus", "1"], capsys)
        assert code == 2

    def test_byte_determinism(self, tmp_path, capsys):
        args = [
            "sweep",
            "--family",
            "exponential",
            "--q",
            "0.5,1.5",
            "--beta",
            "2",
            "--theta-max",
            "4",
        ]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run(args + ["-o", str(a)], capsys)[0] == 0
        assert run(args + ["-o", str(b), "--threads", "2"], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path, capsys):
        out = tmp_path / "out.json"
        code, _, _ = run(
            [
                "sweep",
                "--family",
                "exponential",
                "--q",
                "0.5",
                "--beta",
                "2",
                "--theta-max",
                "4",
                "--format",
                "json",
                "-o",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["schema_version"] == 1
        assert len(payload["rows"]) == 1


class TestSimulateCommand:
    def test_report_structure(self, tmp_path, capsys):
        out = tmp_path / "rep.json"
        code, _, _ = run(
            [
                "simulate",
                "--mode",
                "qpa",
                "--n",
                "2000",
                "--beta",
                "2",
                "--family",
                "exponential",
                "--q",
                "0.5",
                "--theta-max",
                "4",
                "--seed",
                "42",
                "--replicas",
                "3",
                "-o",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["schema_version"] == 1
        assert payload["seeds"] == [42, 43, 44]
        assert len(payload["replicas"]) == 3
        for rep in payload["replicas"]:
            for v in rep["fractions"].values():
                assert 0.0 <= v <= 1.0

    def test_determinism_byte_identical(self, tmp_path, capsys):
        args = [
            "simulate",
            "--mode",
            "qpa",
            "--n",
            "3000",
            "--beta",
            "2",
            "--family",
            "bernoulli",
            "--p",
            "0.5",
            "--theta-max",
            "8",
            "--seed",
            "7",
            "--replicas",
            "2",
        ]
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        ea = tmp_path / "ea.txt"
        eb = tmp_path / "eb.txt"
        assert run(args + ["-o", str(a), "--emit-edges", str(ea)], capsys)[0] == 0
        assert run(args + ["-o", str(b), "--emit-edges", str(eb)], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert ea.read_bytes() == eb.read_bytes()

    def test_ingestion_triangle(self, tmp_path, capsys):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n1 2\n2 0\n")
        qp.write_text("0 0\n1 0\n2 5\n")
        out = tmp_path / "rep.json"
        code, _, _ = run(
            ["simulate", "--input", str(ep), "--qualities", str(qp), "-o", str(out)],
            capsys,
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["fractions"]["quality_mean"] == pytest.approx(
            0.666667, abs=1e-6
        )
        assert payload["fractions"]["quality_median"] == 0.0

    def test_parse_error_exits_4_and_no_partial_output(self, tmp_path, capsys):
        ep = tmp_path / "e.txt"
        qp = tmp_path / "q.txt"
        ep.write_text("0 1\n7 7\n")
        qp.write_text("0 0\n1 0\n7 0\n")
        out = tmp_path / "rep.json"
        code, _, err = run(
            ["simulate", "--input", str(ep), "--qualities", str(qp), "-o", str(out)],
            capsys,
        )
        assert code == 4
        assert "line 2" in err
        assert not out.exists()

    def test_missing_growth_flags_exit_2(self, capsys):
        code, _, _ = run(["simulate", "--mode", "qpa", "--n", "100"], capsys)
        assert code == 2


class TestNnTableCommand:
    def test_dump_and_normalization(self, tmp_path, capsys):
        out = tmp_path / "nn.csv"
        code, _, _ = run(
            [
                "nn-table",
                "--beta",
                "2",
                "--family",
                "bernoulli",
                "--p",
                "1",
                "--theta-max",
                "8",
                "--k",
                "2",
                "--theta",
                "0",
                "-o",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        tail = float([ln for ln in lines if ln.startswith("# tail_mass=")][0].split("=")[1])
        header_at = lines.index("ell,phi,prob")
        total = sum(float(ln.split(",")[2]) for ln in lines[header_at + 1 :])
        assert total + tail == pytest.approx(1.0, abs=1e-6)

    def test_k_below_beta_exits_2(self, capsys):
        code, _, _ = run(
            [
                "nn-table",
                "--beta",
                "2",
                "--family",
                "bernoulli",
                "--p",
                "1",
                "--theta-max",
                "8",
                "--k",
                "1",
                "--theta",
                "0",
            ],
            capsys,
        )
        assert code == 2


class TestValidateCommand:
    def test_quick_passes_fast(self, capsys):
        import time

        t0 = time.monotonic()
        code, out, _ = run(["validate", "--quick"], capsys)
        elapsed = time.monotonic() - t0
        assert code == 0
        assert "joint normalization" in out and "PASS" in out
        assert elapsed < 300.0


class TestHelp:
    @pytest.mark.parametrize("cmd", ["sweep", "simulate", "validate", "nn-table"])
    def test_help_lists_flags(self, cmd, capsys):
        code, out, _ = run([cmd, "--help"], capsys)
        assert code == 0
        assert "--" in out


class TestThreadsDefault:
    def test_env_var_default(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("GFP_THREADS", "2")
        out = tmp_path / "out.csv"
        code, _, _ = run(
            [
                "sweep",
                "--family",
                "exponential",
                "--q",
                "0.5,1.5",
                "--beta",
                "2",
                "--theta-max",
                "4",
                "-o",
                str(out),
            ],
            capsys,
        )
        assert code == 0
        assert len(out.read_text().splitlines()) == 3
