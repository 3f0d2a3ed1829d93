import numpy as np
import pandas as pd
import pytest
from tsblind.cli import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION, main
from tsblind.covariance_estimation import ObservedPath
from tsblind.experiment_harness import ConcentrationReport, RateSweepReport
from tsblind.utils.serialization import read_column_csv, read_metadata

RISK_ARGS = [
    "risk",
    "--model",
    "model=white",
    "--n",
    "64",
    "--k",
    "2",
    "--reps",
    "5",
    "--oracle-past",
    "16",
]


class TestSimulate:
    class TestPassingCases:
        def test_same_seed_same_bytes(self, tmp_path):
            a, b = tmp_path / "a.csv", tmp_path / "b.csv"
            for out in [a, b]:
                assert main(["simulate", "--n", "16", "--seed", "4", "--out", str(out)]) == EXIT_OK
            assert a.read_bytes() == b.read_bytes()
            assert read_column_csv(a).shape == (16,)
            assert read_metadata(a)["seed"] == "4"

        def test_replication_columns(self, tmp_path):
            out = tmp_path / "paths.csv"
            args = ["simulate", "--model", "model=ar1 phi=0.6", "--n", "8", "--reps", "3"]
            assert main(args + ["--out", str(out)]) == EXIT_OK
            header = [line for line in out.read_text().splitlines() if not line.startswith("#")][0]
            assert header == "x_0,x_1,x_2"

        def test_stdout(self, capsys):
            assert main(["simulate", "--n", "4", "--seed", "0x10"]) == EXIT_OK
            captured = capsys.readouterr().out
            assert "# tool=tsblind" in captured
            assert "# seed=16" in captured

        def test_model_file(self, tmp_path):
            model = tmp_path / "model.txt"
            model.write_text("model=ma1\ntheta=0.5\n")
            out = tmp_path / "x.csv"
            assert main(["simulate", "--model", str(model), "--n", "8", "--out", str(out)]) == EXIT_OK
            assert read_metadata(out)["model"] == "model=ma1 theta=0.5"

    class TestFailingCases:
        def test_unparseable_model(self):
            assert main(["simulate", "--model", "missing.txt", "--n", "8"]) == EXIT_USAGE


class TestPredict:
    class TestPassingCases:
        def test_from_input(self, tmp_path):
            source = tmp_path / "path.csv"
            ObservedPath(np.random.default_rng(0).standard_normal(40)).to_csv(source)
            out = tmp_path / "predictor.csv"
            args = ["predict", "--input", str(source), "--k", "2", "--m", "0.5", "--out", str(out)]
            assert main(args) == EXIT_OK
            lines = [line for line in out.read_text().splitlines() if not line.startswith("#")]
            assert lines[0] == "2"
            assert len(lines) == 3
            assert read_metadata(out)["input"] == str(source)

        def test_from_simulation(self, tmp_path):
            out = tmp_path / "predictor.csv"
            assert main(["predict", "--n", "64", "--k", "3", "--m", "estimate", "--out", str(out)]) == EXIT_OK
            assert read_metadata(out)["lower_bound_estimated"] == "True"

    class TestFailingCases:
        def test_no_data(self):
            assert main(["predict", "--k", "2"]) == EXIT_USAGE

        def test_window_too_large(self):
            assert main(["predict", "--n", "16", "--k", "8"]) == EXIT_USAGE


class TestExperiments:
    class TestPassingCases:
        def test_risk(self, tmp_path):
            out = tmp_path / "risk.csv"
            assert main(RISK_ARGS + ["--out", str(out)]) == EXIT_OK
            assert read_metadata(out)["window_rule"] == "fixed k=2"

        def test_risk_is_reproducible(self, tmp_path):
            a, b = tmp_path / "a.csv", tmp_path / "b.csv"
            assert main(RISK_ARGS + ["--out", str(a)]) == EXIT_OK
            assert main(RISK_ARGS + ["--n-jobs", "2", "--out", str(b)]) == EXIT_OK
            assert a.read_bytes() == b.read_bytes()

        def test_concentration(self, tmp_path):
            out = tmp_path / "conc.csv"
            args = ["concentration", "--model", "model=white", "--n", "64", "--k", "2"]
            assert main(args + ["--reps", "4", "--out", str(out)]) == EXIT_OK

        def test_schur_verify(self, tmp_path):
            out = tmp_path / "schur.csv"
            args = ["schur-verify", "--sizes", "2,4", "--trials", "4", "--out", str(out)]
            assert main(args) == EXIT_OK
            assert read_metadata(out)["passed"] == "True"

    class TestFailingCases:
        def test_failed_verification(self, tmp_path):
            args = ["schur-verify", "--sizes", "2", "--trials", "2", "--tol", "-1"]
            assert main(args + ["--out", str(tmp_path / "s.csv")]) == EXIT_VERIFICATION

        def test_window_too_large(self):
            assert main(["risk", "--n", "16", "--k", "8", "--reps", "2"]) == EXIT_USAGE

        def test_failed_concentration_check(self, tmp_path, monkeypatch):
            frame = pd.DataFrame(
                {"exceedance": [1.0], "exceedance_4n": [1.0], "exp_minus_x": [0.5]}
            )
            monkeypatch.setattr(
                "tsblind.cli.concentration_check",
                lambda config: ConcentrationReport(frame, {"passed": False}),
            )
            args = ["concentration", "--model", "model=white", "--n", "64", "--k", "2"]
            out = tmp_path / "conc.csv"
            assert main(args + ["--reps", "4", "--out", str(out)]) == EXIT_VERIFICATION
            assert read_metadata(out)["passed"] == "False"

        def test_failed_rate_sweep(self, tmp_path, monkeypatch):
            monkeypatch.setattr(
                "tsblind.cli.rate_sweep",
                lambda config: RateSweepReport(
                    pd.DataFrame({"n_samples": [64]}), {}, slope=0.2, slope_mc_stderr=0.01
                ),
            )
            args = ["rate-sweep", "--model", "model=white", "--grid", "64,128,256,512"]
            args += ["--k", "2", "--reps", "4", "--out", str(tmp_path / "sweep.csv")]
            assert main(args) == EXIT_VERIFICATION

        @pytest.mark.parametrize(
            "argv",
            [
                [],
                ["nope"],
                ["risk", "--n", "abc"],
                ["risk", "--n", "64", "--grid", "64,128"],
                ["risk", "--seed", "-1"],
                ["rate-sweep", "--k", "2"],
                ["simulate"],
                ["schur-verify", "--sizes", "a,b"],
            ],
        )
        def test_usage_errors(self, argv):
            with pytest.raises(SystemExit) as exc:
                main(argv)
            assert exc.value.code == EXIT_USAGE
