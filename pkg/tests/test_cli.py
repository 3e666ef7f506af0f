"""
Tests for the command-line entry point in main.py
"""

import json

import pytest

import main
from config.settings import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, LAMBDA_GRID, TOLERANCE_DEFAULTS


class TestParseConfig:
    def test_defaults(self):
        config = main.parse_config(["verify"])
        assert config.weight == "sech"
        assert config.lambdas == LAMBDA_GRID
        assert config.tol("ortho") == TOLERANCE_DEFAULTS["ortho"]
        assert config.out_path.endswith("verify_report.csv")

    def test_file_then_flags(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"weight": "nu2", "seed": 11, "tolerances": {"khat": 1e-6}}))
        config = main.parse_config(["verify", "--config", str(path), "--seed", "5", "--tol", "ortho=1e-9"])
        assert config.weight == "nu2"
        assert config.seed == 5
        assert config.tol("khat") == 1e-6
        assert config.tol("ortho") == 1e-9

    def test_grids(self):
        config = main.parse_config(["rates", "--n", "8,16,...,64", "--lambda", "1,1.5,...,3"])
        assert config.n_grid == (8, 16, 32, 64)
        assert config.lambdas == (1.0, 1.5, 2.0, 2.5, 3.0)

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--N", "-1"],
            ["verify", "--weight", "cauchy"],
            ["verify", "--tol", "nonsense=1"],
            ["verify", "--tol", "ortho=-1"],
            ["tightness", "--lambda", "0.5,1"],
            ["rates", "--n", "8,4"],
            ["rates", "--f", "unknown"],
            ["verify", "--seed", "-3"],
            ["frobnicate"],
        ],
    )
    def test_rejected(self, argv):
        with pytest.raises(main.UsageError):
            main.parse_config(argv)

    def test_bad_config_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(main.UsageError):
            main.parse_config(["verify", "--config", str(path)])
        path.write_text(json.dumps({"colour": "red"}))
        with pytest.raises(main.UsageError):
            main.parse_config(["verify", "--config", str(path)])


class TestMain:
    def test_usage_error_writes_nothing(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        assert main.main(["verify", "--N", "-1", "--out", str(out)]) == EXIT_USAGE
        assert not out.exists()
        assert "N must lie" in capsys.readouterr().err

    def test_poincare_json(self, tmp_path):
        out = tmp_path / "poincare.json"
        assert main.main(["poincare", "--weight", "gaussian", "--format", "json", "--out", str(out)]) == EXIT_OK
        data = json.loads(out.read_text())
        assert data["config"]["weight"] == "gaussian"
        assert {s["name"] for s in data["suites"]} == {"poincare_gaussian", "perturbation"}
        assert all(c["pass"] for s in data["suites"] for c in s["checks"])

    def test_rates_csv(self, tmp_path):
        out = tmp_path / "rates.csv"
        status = main.main(["rates", "--f", "abs_clip", "--n", "8,16,...,64", "--out", str(out)])
        assert status in (EXIT_OK, EXIT_CHECK_FAILED)
        assert out.read_text().splitlines()[0] == "suite,check,value,bound,pass"
        table = (tmp_path / "rates.rates.csv").read_text().splitlines()
        assert table[0] == "n,en_two_sided,en_times_log2n,en_half,en_times_n"
        assert len(table) == 5
        assert (tmp_path / "rates.laguerre.csv").exists()
