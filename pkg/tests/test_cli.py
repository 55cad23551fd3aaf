"""Command-line surface, emission formats, and report determinism."""

import json
import subprocess
import sys

import pytest

from qbethe.cli import main
from qbethe.exactarith import (
    MRat,
    VarContext,
    mrat_from_json,
    mrat_to_json,
    mrat_to_latex,
    svar,
    tvar,
)


def run_cli(args, capsys):
    rc = main(args)
    out = capsys.readouterr()
    return rc, out.out, out.err


class TestCommands:
    def test_kernels_check(self, capsys):
        rc, out, _ = run_cli(["kernels", "check", "--id", "idZZ1", "--n", "2"], capsys)
        assert rc == 0
        data = json.loads(out)
        assert data["equal"] is True
        assert data["mode"] == "canonical"

    def test_kernels_partition_latex(self, capsys):
        rc, out, _ = run_cli(
            ["kernels", "partition", "--n", "1", "--emit", "latex"], capsys
        )
        assert rc == 0
        assert out.strip() == r"\frac{1}{t_{1}-s_{1}}"

    def test_relations_verify(self, capsys):
        rc, out, _ = run_cli(
            ["relations", "verify", "--id", "rel-10", "--module", "sl2:half:z1", "--window", "4"],
            capsys,
        )
        assert rc == 0
        assert json.loads(out)["equal"] is True

    def test_weight_compute_json_round_trip(self, capsys):
        rc, out, _ = run_cli(
            [
                "weight",
                "compute",
                "--algebra",
                "sl2",
                "--sites",
                "z1",
                "--t",
                "t1",
                "--variant",
                "po333",
                "--emit",
                "json",
            ],
            capsys,
        )
        assert rc == 0
        data = json.loads(out)
        comp = mrat_from_json(data["components"][1])
        t1, z1 = tvar(1), svar(1)  # z1 parses via SpectralVar below
        from qbethe.exactarith import SpectralVar

        z1 = SpectralVar.parse("z1")
        ctx = VarContext((t1, z1))
        assert comp == MRat.var(z1, ctx) / (MRat.var(t1, ctx) - MRat.var(z1, ctx))

    def test_oracle_compare(self, capsys):
        rc, out, _ = run_cli(
            [
                "oracle",
                "compare",
                "--left",
                "weight:sl2:z1:t1",
                "--right",
                "bethe:default:z1:t1",
            ],
            capsys,
        )
        assert rc == 0
        assert json.loads(out)["collinear"] is True

    def test_usage_error_exit_code(self, capsys):
        rc, _, err = run_cli(
            ["relations", "verify", "--id", "not-a-relation"], capsys
        )
        assert rc == 2

    def test_unknown_suite_is_usage_error(self, capsys):
        rc, _, err = run_cli(["run", "--suite", "nope"], capsys)
        assert rc == 2
        assert "usage error" in err


class TestReports:
    def test_reports_byte_identical_for_same_seed(self, tmp_path, capsys):
        args = [
            "run",
            "--suite",
            "kernels",
            "--n",
            "2",
            "--seed",
            "7",
        ]
        rc1, out1, _ = run_cli(args + ["--out", str(tmp_path / "a.json")], capsys)
        rc2, out2, _ = run_cli(args + ["--out", str(tmp_path / "b.json")], capsys)
        assert rc1 == rc2 == 0
        a = (tmp_path / "a.json").read_bytes()
        b = (tmp_path / "b.json").read_bytes()
        assert a == b

    def test_report_fields(self, tmp_path, capsys):
        rc, _, _ = run_cli(
            ["run", "--suite", "oracle", "--n", "1", "--seed", "3", "--out", str(tmp_path / "r.json")],
            capsys,
        )
        assert rc == 0
        data = json.loads((tmp_path / "r.json").read_text())
        assert data["seed"] == 3
        assert data["mode"] == "auto"
        assert data["artifact_hash"]
        assert all(c["status"] in ("pass", "fail", "diagnostic") for c in data["checks"])
        scale = [c for c in data["checks"] if c["check"] == "dwbc-scale-pattern"]
        assert scale and scale[0]["status"] == "pass"

    def test_config_file(self, tmp_path, capsys):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({"n": 1, "seed": 5}))
        rc, _, _ = run_cli(
            [
                "run",
                "--suite",
                "kernels",
                "--config",
                str(cfgfile),
                "--out",
                str(tmp_path / "r.json"),
            ],
            capsys,
        )
        assert rc == 0
        data = json.loads((tmp_path / "r.json").read_text())
        assert data["seed"] == 5
        assert data["config"]["n"] == 1

    def test_console_script_installed(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qbethe", "kernels", "partition", "--n", "1", "--emit", "text"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "t1" in proc.stdout
