import json

from sigmarket import (
    CostFamily,
    Policy,
    PolicyProfile,
    StepMonitoringPolicy,
    construct_epbe,
    riley_effort,
)
from sigmarket.cli import main

LIN = CostFamily.linear(2.0, 1.0)


def write_params(tmp_path, params, name="params.json"):
    path = tmp_path / name
    path.write_text(json.dumps(params.to_dict()), encoding="utf-8")
    return str(path)


class TestSolve:
    def test_screening_monopoly_profit(self, tmp_path, screening):
        params_path = write_params(tmp_path, screening)
        out_path = tmp_path / "out.json"
        assert main(["solve", "--params", params_path, "--out", str(out_path)]) == 0
        payload = json.loads(out_path.read_text())
        assert len(payload) == 1
        assert payload[0]["label"] == "monopoly_screening"
        assert payload[0]["profits"] == [1.0]

    def test_competition_solve_emits_riley_first(self, tmp_path, screening):
        from sigmarket import mild_fee_set

        params = screening.with_(n_schools=2)
        params_path = write_params(tmp_path, params)
        out_path = tmp_path / "out.json"
        assert main(["solve", "--params", params_path, "--out", str(out_path)]) == 0
        payload = json.loads(out_path.read_text())
        assert payload[0]["label"] == "riley"
        fee_set = mild_fee_set(params, 2)
        for entry in payload:
            fee = entry["profile"][0]["fee"]
            if entry["label"] == "semipooling_with_fee":
                assert fee > 0.0 and fee_set.contains(fee)
            else:
                assert fee == 0.0

    def test_malformed_params_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"theta_L": 1.0, "theta_H": 2.0}), encoding="utf-8")
        assert main(["solve", "--params", str(bad)]) == 2
        assert "lambda" in capsys.readouterr().err or True

    def test_missing_file_exit_2(self, tmp_path):
        assert main(["solve", "--params", str(tmp_path / "nope.json")]) == 2


class TestVerify:
    def test_constructed_bundle_passes(self, tmp_path, sorting):
        prof = PolicyProfile.of(Policy(fee=1.5, monitoring=StepMonitoringPolicy.uninformative()))
        eq = construct_epbe(prof, sorting)
        params_path = write_params(tmp_path, sorting)
        eq_path = tmp_path / "eq.json"
        eq_path.write_text(json.dumps(eq.to_dict()), encoding="utf-8")
        out_path = tmp_path / "rep.json"
        code = main(["verify", "--params", params_path, "--profile", str(eq_path), "--out", str(out_path)])
        assert code == 0
        report = json.loads(out_path.read_text())
        assert report["passed"] is True

    def test_corrupted_bundle_fails(self, tmp_path, sorting):
        prof = PolicyProfile.of(Policy(fee=1.5, monitoring=StepMonitoringPolicy.uninformative()))
        eq = construct_epbe(prof, sorting)
        payload = eq.to_dict()
        payload["wages"]["0:0"] = 2.0  # inconsistent with pooled beliefs
        eq_path = tmp_path / "eq.json"
        eq_path.write_text(json.dumps(payload), encoding="utf-8")
        code = main(["verify", "--params", write_params(tmp_path, sorting), "--profile", str(eq_path)])
        assert code == 1


class TestOracleCompare:
    def test_riley_profile_matches(self, tmp_path, screening):
        params = screening.with_(n_schools=2)
        e_r = riley_effort(params)
        prof = PolicyProfile.symmetric(Policy(fee=0.0, monitoring=StepMonitoringPolicy.cutoff(e_r)), 2)
        prof_path = tmp_path / "profile.json"
        prof_path.write_text(json.dumps(prof.to_list()), encoding="utf-8")
        out_path = tmp_path / "cmp.json"
        code = main(
            [
                "oracle-compare",
                "--params",
                write_params(tmp_path, params),
                "--profile",
                str(prof_path),
                "--out",
                str(out_path),
            ]
        )
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["match"] is True
        assert payload["oracle_count"] >= 1


class TestSweep:
    def sweep_spec(self, tmp_path, screening):
        spec = {
            "base": screening.to_dict(),
            "vary": {"lambda": [0.3, 0.5, 0.7], "n_schools": [1, 2]},
        }
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps(spec), encoding="utf-8")
        return str(path)

    def test_csv_schema_and_determinism(self, tmp_path, screening):
        spec_path = self.sweep_spec(tmp_path, screening)
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main(["sweep", "--params", spec_path, "--out", str(out_a)]) == 0
        assert main(["sweep", "--params", spec_path, "--out", str(out_b), "--jobs", "3"]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        lines = out_a.read_text().splitlines()
        assert lines[0].startswith("theta_L,theta_H,lambda,n_schools")
        assert len(lines) > 6

    def test_bad_spec_exit_2(self, tmp_path):
        path = tmp_path / "sweep.json"
        path.write_text(json.dumps({"vary": {}}), encoding="utf-8")
        assert main(["sweep", "--params", str(path)]) == 2


class TestWelfareCommand:
    def test_report_and_plot_csv(self, tmp_path, screening):
        params_path = write_params(tmp_path, screening.with_(n_schools=2))
        out_path = tmp_path / "welfare.json"
        code = main(
            [
                "welfare",
                "--params",
                params_path,
                "--out",
                str(out_path),
                "--sweep-param",
                "lambda",
                "--sweep-range",
                "0.2:0.8:7",
            ]
        )
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload[0]["label"] == "riley"
        plot = (tmp_path / "welfare_plot.csv").read_text().splitlines()
        assert plot[0] == "lambda,monopoly_welfare,competition_welfare,max_welfare"
        assert len(plot) == 8

    def test_bad_range_exit_2(self, tmp_path, screening):
        code = main(
            [
                "welfare",
                "--params",
                write_params(tmp_path, screening),
                "--sweep-range",
                "backwards",
            ]
        )
        assert code == 2


class TestAudit:
    def test_riley_certified(self, tmp_path, screening):
        params_path = write_params(tmp_path, screening.with_(n_schools=2))
        out_path = tmp_path / "audit.json"
        code = main(["audit", "--params", params_path, "--out", str(out_path), "--pessimistic"])
        assert code == 0
        payload = json.loads(out_path.read_text())
        assert payload["certified"] is True and payload["label"] == "riley"

    def test_monopoly_certified(self, tmp_path, sorting):
        code = main(["audit", "--params", write_params(tmp_path, sorting), "--out", str(tmp_path / "a.json")])
        assert code == 0


class TestJsonRoundTrips:
    def test_solve_output_reparses(self, tmp_path, screening):
        from sigmarket import EquilibriumOutcome

        params_path = write_params(tmp_path, screening.with_(n_schools=2))
        out_path = tmp_path / "out.json"
        main(["solve", "--params", params_path, "--out", str(out_path)])
        for entry in json.loads(out_path.read_text()):
            EquilibriumOutcome.from_dict(entry)

    def test_byte_identical_repeat(self, tmp_path, screening):
        params_path = write_params(tmp_path, screening.with_(n_schools=2))
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["solve", "--params", params_path, "--out", str(a)])
        main(["solve", "--params", params_path, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
