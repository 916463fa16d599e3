"""Command surface: exit codes, artifacts, determinism."""

import json

from gkdv4 import cli


def run_cli(args):
    return cli.main(args)


class TestVerify:
    def test_passes_with_empty_config(self, tmp_path):
        rc = run_cli(["verify", "--out", str(tmp_path / "v")])
        assert rc == 0
        report = json.loads((tmp_path / "v" / "report.json").read_text())
        assert report["ok"] is True
        assert all(c["ok"] for c in report["checks"])


class TestCertify:
    def test_sweep_artifacts(self, tmp_path):
        out = tmp_path / "cert"
        rc = run_cli(["certify", "--out", str(out)])
        assert rc == 0
        lines = (out / "certificate.csv").read_text().strip().splitlines()
        assert lines[0].startswith("c,")
        assert len(lines) == 27  # header + 26 speeds
        margins = [float(row.split(",")[-1]) for row in lines[1:]]
        assert all(m >= 0.0 for m in margins)

    def test_deterministic_output(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        run_cli(["certify", "--out", str(out1)])
        run_cli(["certify", "--out", str(out2)])
        assert (out1 / "certificate.csv").read_bytes() == \
            (out2 / "certificate.csv").read_bytes()


class TestProfileCommand:
    def test_short_sweep(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"c_range": [0.85, 0.9, 0.05]}))
        out = tmp_path / "prof"
        rc = run_cli(["profile", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        lines = (out / "resonance_sweep.csv").read_text().strip().splitlines()
        assert len(lines) == 3


class TestRigidityCommand:
    def test_full_report(self, tmp_path):
        out = tmp_path / "rig"
        rc = run_cli(["rigidity", "--out", str(out)])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        names = {c["name"] for c in report["checks"]}
        assert "tail-inequalities-monte-carlo" in names
        assert (out / "monte_carlo.csv").exists()


class TestUsage:
    def test_unknown_command_exits_2(self):
        assert run_cli(["frobnicate"]) == 2

    def test_bad_config_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run_cli(["certify", "--config", str(bad)]) == 2

    def test_config_train_parsing(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"train": {"speeds": [1.0, 0.8]},
                                   "seed": 3}))
        parsed = cli.RunConfig.from_json("rigidity", str(cfg))
        assert parsed.train.speeds == (1.0, 0.8)
        assert parsed.seed == 3
