"""
Unit tests for the results log, report bundles and the command line in cli_report.py
"""

import json
import os
import sys

import pandas as pd
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from cli_report import EXPERIMENTS, ReportBundle, ResultsLogger, build_parser, main
from experiment_config import ExperimentName
from grid_core import DivergenceError
from reports import VerificationReport


def passing_report():
    report = VerificationReport("demo", "demo result")
    report.add("ok", 1.0, bound=2.0)
    report.quantities["constant"] = 1.5
    return report


def failing_report():
    report = VerificationReport("demo", "demo result")
    report.add("bad", 3.0, bound=2.0)
    return report


@pytest.fixture
def young_config(write_config, temp_dir):
    """A young config writing under the temporary directory."""
    return write_config({"experiment": "young", "family": {"count": 1},
                         "output_dir": str(temp_dir / "out")})


@pytest.mark.unit
class TestResultsLogger:
    """Tests for ResultsLogger."""

    def test_creates_parent_directories(self, temp_dir):
        logger = ResultsLogger(str(temp_dir / "nested" / "deep" / "results.jsonl"))
        assert logger.log_file.parent.exists()

    def test_fresh_log_truncates(self, temp_results_log):
        ResultsLogger(temp_results_log).log_record({"name": "old"})
        ResultsLogger(temp_results_log)
        assert open(temp_results_log).read() == ""

    def test_append_mode_keeps_records(self, temp_results_log):
        ResultsLogger(temp_results_log).log_record({"name": "old"})
        ResultsLogger(temp_results_log, fresh=False).log_record({"name": "new"})
        assert len(open(temp_results_log).readlines()) == 2

    def test_sorted_keys(self, temp_results_log):
        """Key order is fixed so identical runs write identical bytes."""
        logger = ResultsLogger(temp_results_log)
        logger.log_record({"b": 1, "a": float("inf")})
        assert open(temp_results_log).read() == '{"a": "inf", "b": 1.0}\n'

    def test_stats(self, temp_results_log):
        logger = ResultsLogger(temp_results_log)
        bundle = ReportBundle("constants", 0, [passing_report(), failing_report()])
        for record in bundle.records():
            logger.log_record(record)

        stats = logger.get_result_stats()
        assert stats["total_records"] == 3
        assert stats["by_verdict"] == {"pass": 1, "fail": 1, "quantity": 1}
        assert stats["by_experiment"] == {"constants": 3}
        assert stats["by_provenance"] == {"demo result": 3}

    def test_stats_without_file(self, temp_results_log):
        logger = ResultsLogger(temp_results_log)
        os.remove(temp_results_log)
        assert logger.get_result_stats() == {}


@pytest.mark.unit
class TestReportBundle:
    """Tests for ReportBundle."""

    def test_verdict(self):
        assert ReportBundle("x", 0, [passing_report()]).passed
        assert not ReportBundle("x", 0, [passing_report(), failing_report()]).passed

    def test_records(self):
        records = ReportBundle("constants", 7, [passing_report()]).records()
        assert [r["kind"] for r in records] == ["check", "quantity"]
        assert all(r["experiment"] == "constants" and r["seed"] == 7 for r in records)
        assert records[1]["name"] == "constant"
        assert records[1]["value"] == 1.5

    def test_table(self):
        table = ReportBundle("x", 0, [passing_report(), failing_report()]).table()
        assert list(table["check"]) == ["ok", "bad"]
        assert list(table["passed"]) == [True, False]

    def test_write(self, temp_dir):
        series = {"decay": pd.DataFrame({"x": [1.0, 2.0], "value": [0.5, 0.25]})}
        out = ReportBundle("decay", 0, [passing_report()], series).write(temp_dir / "run")

        lines = (out / "results.jsonl").read_text().splitlines()
        assert [json.loads(line)["kind"] for line in lines] == ["check", "quantity"]
        assert pd.read_csv(out / "tables.csv").shape == (1, 7)
        decay = pd.read_csv(out / "series" / "decay.csv")
        assert list(decay.columns) == ["x", "value"]
        assert decay["value"].tolist() == [0.5, 0.25]


@pytest.mark.unit
class TestCommandLine:
    """Tests for argument parsing and exit codes."""

    def test_every_experiment_is_dispatched(self):
        assert set(EXPERIMENTS) == set(ExperimentName)

    def test_parser_requires_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_list(self, capsys):
        assert main(["list"]) == 0
        output = capsys.readouterr().out
        for name in ExperimentName:
            assert name.value in output

    def test_missing_config_file(self, temp_dir):
        assert main(["run", "--config", str(temp_dir / "absent.json")]) == 2

    def test_invalid_config(self, write_config, capsys):
        path = write_config({"experiment": "apply"})
        assert main(["run", "--config", str(path)]) == 2
        assert "needs a kernel" in capsys.readouterr().out

    def test_malformed_json(self, temp_dir):
        path = temp_dir / "broken.json"
        path.write_text("{")
        assert main(["run", "--config", str(path)]) == 2

    def test_numerical_error_exit_code(self, young_config, mocker):
        """Errors raised by the numerical modules exit with 3."""
        mocker.patch.dict(EXPERIMENTS, {ExperimentName.YOUNG: mocker.Mock(side_effect=DivergenceError("boom"))})
        assert main(["run", "--config", str(young_config)]) == 3

    def test_failed_verdict_exit_code(self, young_config, mocker):
        mocker.patch.dict(EXPERIMENTS, {ExperimentName.YOUNG: mocker.Mock(return_value=([failing_report()], {}))})
        assert main(["run", "--config", str(young_config)]) == 1

    def test_success_writes_outputs(self, young_config, temp_dir, mocker, capsys):
        runner = mocker.Mock(return_value=([passing_report()], {}))
        mocker.patch.dict(EXPERIMENTS, {ExperimentName.YOUNG: runner})
        assert main(["run", "--config", str(young_config), "--seed", "11"]) == 0

        config = runner.call_args.args[0]
        assert config.seed == 11
        assert (temp_dir / "out" / "results.jsonl").exists()
        assert "ALL CHECKS PASSED" in capsys.readouterr().out

    def test_out_overrides_config(self, young_config, temp_dir, mocker):
        mocker.patch.dict(EXPERIMENTS, {ExperimentName.YOUNG: mocker.Mock(return_value=([passing_report()], {}))})
        assert main(["run", "--config", str(young_config), "--out", str(temp_dir / "other")]) == 0
        assert (temp_dir / "other" / "tables.csv").exists()
