import json

import numpy as np
import pytest

from mononet.cli import main
from mononet.core import ThresholdLayer, ThresholdNetwork
from mononet.io import load_network, save_network


def write(path, text):
    path.write_text(text)
    return str(path)


@pytest.fixture
def spread_csv(tmp_path):
    return write(tmp_path / "spread.csv", "x1,x2,y\n2,0,0\n0,2,0\n1,1,1\n")


@pytest.fixture
def chain_csv(tmp_path):
    return write(tmp_path / "chain.csv", "0,0,0\n1,1,1\n2,2,2\n")


class TestSynth:
    def test_spread(self, tmp_path, spread_csv, capsys):
        out = tmp_path / "net.json"
        trace = tmp_path / "trace.json"
        code = main(["synth", spread_csv, "-o", str(out), "--trace", str(trace)])
        assert code == 0
        stdout = capsys.readouterr().out
        assert "hidden widths: [6, 3, 3]" in stdout
        assert "builder: general" in stdout
        tr = json.loads(trace.read_text())
        assert tr["layer_widths"] == [6, 3, 3]
        assert tr["embedding_matrix"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        net = load_network(out)
        assert net.hidden_widths == (6, 3, 3)

    def test_chain_auto(self, tmp_path, chain_csv, capsys):
        out = tmp_path / "net.json"
        assert main(["synth", chain_csv, "-o", str(out)]) == 0
        assert "hidden widths: [3, 3]" in capsys.readouterr().out

    def test_force_general(self, tmp_path, chain_csv, capsys):
        out = tmp_path / "net.json"
        assert main(["synth", chain_csv, "-o", str(out), "--ordered", "force-general"]) == 0
        assert "hidden widths: [6, 3, 3]" in capsys.readouterr().out

    def test_violation_exit_2_with_diagnostic(self, tmp_path, capsys):
        bad = write(tmp_path / "bad.csv", "0,0,1\n1,1,0\n")
        code = main(["synth", bad, "-o", str(tmp_path / "x.json")])
        assert code == 2
        err = capsys.readouterr().err
        doc = json.loads(err.strip().splitlines()[-1])
        assert doc["error"] == "monotone-violation"
        assert (doc["first"], doc["second"]) == (0, 1)

    def test_missing_file_exit_1(self, tmp_path):
        assert main(["synth", str(tmp_path / "nope.csv"), "-o", str(tmp_path / "x.json")]) == 1

    def test_byte_identical_reruns(self, tmp_path, spread_csv):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["synth", spread_csv, "-o", str(a)])
        main(["synth", spread_csv, "-o", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestEval:
    def test_training_labels(self, tmp_path, spread_csv, capsys):
        out = tmp_path / "net.json"
        main(["synth", spread_csv, "-o", str(out)])
        capsys.readouterr()
        pts = write(tmp_path / "pts.csv", "2,0\n0,2\n1,1\n")
        assert main(["eval", str(out), pts]) == 0
        assert capsys.readouterr().out.splitlines() == ["0.0", "0.0", "1.0"]

    def test_round_trip_matches_memory(self, tmp_path, capsys):
        rng = np.random.default_rng(7)
        net = ThresholdNetwork(
            (ThresholdLayer(rng.random((4, 2)), rng.uniform(-1, 1, 4)),),
            rng.random(4),
            0.125,
        )
        path = tmp_path / "net.json"
        save_network(net, path)
        probes = rng.random((50, 2))
        pts = tmp_path / "pts.csv"
        pts.write_text("\n".join(f"{float(a)!r},{float(b)!r}" for a, b in probes) + "\n")
        assert main(["eval", str(path), str(pts)]) == 0
        printed = [float(line) for line in capsys.readouterr().out.splitlines()]
        assert printed == net.evaluate_batch(probes).tolist()

    def test_dimension_mismatch_exit_2(self, tmp_path, spread_csv, capsys):
        out = tmp_path / "net.json"
        main(["synth", spread_csv, "-o", str(out)])
        pts = write(tmp_path / "pts.csv", "1,2,3\n")
        assert main(["eval", str(out), pts]) == 2


class TestAudit:
    def test_depth2_pass(self, capsys):
        assert main(["audit", "--check", "depth2", "--d", "3", "--samples", "200", "--seed", "7"]) == 0
        assert "verdict: pass" in capsys.readouterr().out

    def test_convexity_pass(self, capsys):
        assert main(["audit", "--check", "convexity", "--samples", "20", "--seed", "3"]) == 0

    def test_chain_width_pass(self, capsys):
        assert main(["audit", "--check", "chain-width", "--samples", "50", "--seed", "3"]) == 0

    def test_structure_fail_reports_but_exits_0(self, tmp_path, capsys):
        net = ThresholdNetwork((ThresholdLayer([[-1.0]], [0.5]),), [1.0], 0.0)
        path = tmp_path / "net.json"
        save_network(net, path)
        code = main(["audit", "--check", "structure", "--net", str(path), "--format", "json"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["passed"] is False
        assert doc["witness"]["location"] == "hidden"

    def test_monotone_probe_on_net(self, tmp_path, capsys):
        net = ThresholdNetwork((ThresholdLayer([[-1.0]], [0.5]),), [1.0], 0.0)
        path = tmp_path / "net.json"
        save_network(net, path)
        code = main(
            ["audit", "--check", "monotone", "--net", str(path), "--samples", "300", "--seed", "1"]
        )
        assert code == 0
        assert "verdict: FAIL" in capsys.readouterr().out

    def test_structure_requires_net(self, capsys):
        assert main(["audit", "--check", "structure"]) == 2


class TestApprox:
    def test_mean(self, tmp_path, capsys):
        out = tmp_path / "net.json"
        code = main(
            ["approx", "--fn", "mean", "--d", "2", "--L", "1", "--eps", "0.2",
             "--probes", "2000", "-o", str(out)]
        )
        assert code == 0
        stdout = capsys.readouterr().out
        sup = float(stdout.split("sup error over 2000 probes: ")[1].split()[0])
        assert sup <= 0.2
        assert load_network(out).monotone_flag

    def test_constant(self, capsys):
        assert main(["approx", "--fn", "constant:0.7", "--d", "1", "--L", "1", "--eps", "0.25",
                     "--probes", "100"]) == 0
        assert "sup error over 100 probes: 0" in capsys.readouterr().out

    def test_table_function(self, tmp_path, capsys):
        table = write(tmp_path / "table.csv", "0,0\n0.5,0.5\n1,1\n")
        assert main(["approx", "--table", table, "--d", "1", "--L", "1", "--eps", "0.5"]) == 0

    def test_fn_and_table_conflict(self, capsys):
        assert main(["approx", "--fn", "mean", "--table", "x.csv", "--d", "1", "--L", "1",
                     "--eps", "0.5"]) == 2

    def test_budget_exit_2(self, capsys):
        assert main(["approx", "--fn", "mean", "--d", "3", "--L", "1", "--eps", "0.001"]) == 2


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_win(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"samples": 25, "seed": 11, "d": 3}))
        assert main(["--config", str(cfg), "audit", "--check", "depth2"]) == 0
        assert "seed: 11  samples: 25  d: 3" in capsys.readouterr().err
        assert main(["--config", str(cfg), "audit", "--check", "depth2", "--seed", "5"]) == 0
        assert "seed: 5  samples: 25" in capsys.readouterr().err

    def test_config_can_satisfy_required_flags(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 2, "p": "0.5", "mode": "exact"}))
        assert main(["--config", str(cfg), "matchprob"]) == 0
        assert capsys.readouterr().out.strip() == "0.4375"

    def test_unknown_key_warns(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1, "n": 2, "p": "1", "mode": "exact"}))
        assert main(["--config", str(cfg), "matchprob"]) == 0
        assert "bogus" in capsys.readouterr().err

    def test_bad_config_exit_2(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("[1, 2]")
        assert main(["--config", str(cfg), "matchprob", "--n", "1", "--p", "1"]) == 2

    def test_missing_config_exit_1(self, tmp_path):
        assert main(["--config", str(tmp_path / "nope.json"), "matchprob",
                     "--n", "1", "--p", "1"]) == 1


class TestFalsificationExitCode:
    def test_failing_campaign_exits_3(self, monkeypatch, capsys):
        from mononet import audit as audit_mod
        from mononet.audit import AuditReport

        def fake_campaign(d, samples, seed, max_width=32):
            return AuditReport("depth2", passed=False, witness={"sample_index": 0},
                               samples=samples, seed=seed)

        monkeypatch.setattr(audit_mod, "run_depth2_campaign", fake_campaign)
        code = main(["audit", "--check", "depth2", "--samples", "1", "--seed", "0"])
        assert code == 3
        assert "FAIL" in capsys.readouterr().out


class TestMatchprob:
    def test_exact(self, capsys):
        assert main(["matchprob", "--n", "2", "--p", "0.5", "--mode", "exact"]) == 0
        assert capsys.readouterr().out.strip() == "0.4375"

    def test_estimate_deterministic(self, capsys):
        args = ["matchprob", "--n", "2", "--p", "0.5", "--mode", "estimate",
                "--eps", "0.2", "--seed", "5"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first
        value = float(first.strip())
        assert abs(value - 0.4375) <= 0.2

    def test_matrix_csv(self, tmp_path, capsys):
        path = write(tmp_path / "p.csv", "1,0\n0,1\n")
        assert main(["matchprob", "--n", "2", "--p", str(path), "--mode", "exact"]) == 0
        assert capsys.readouterr().out.strip() == "1.0"

    def test_size_mismatch(self, tmp_path, capsys):
        path = write(tmp_path / "p.csv", "1,0\n0,1\n")
        assert main(["matchprob", "--n", "3", "--p", str(path), "--mode", "exact"]) == 2

    def test_too_large_exit_2(self, capsys):
        assert main(["matchprob", "--n", "6", "--p", "0.5", "--mode", "exact"]) == 2
