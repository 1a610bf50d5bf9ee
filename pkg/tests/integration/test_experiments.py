"""
Integration tests running shipped experiment configs through cli_report.main
"""

import json
import os
import sys

import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from cli_report import main
from tests.conftest import CONFIG_DIR


def read_records(out_dir):
    with open(out_dir / "results.jsonl") as f:
        return [json.loads(line) for line in f]


def check(records, name):
    return next(r for r in records if r["kind"] == "check" and r["name"] == name)


@pytest.mark.integration
class TestConstantsRun:
    """The constants config on the fractional Hardy reference."""

    def test_reference_constants(self, temp_dir):
        out = temp_dir / "constants"
        assert main(["run", "--config", str(CONFIG_DIR / "constants.json"), "--out", str(out)]) == 0

        records = read_records(out)
        assert check(records, "A")["empirical"] == pytest.approx(1.41421, abs=1e-5)
        assert check(records, "K")["empirical"] == pytest.approx(2.0, rel=1e-6)
        assert (out / "tables.csv").exists()

    def test_reruns_are_byte_identical(self, temp_dir):
        """Same config and seed give the same results.jsonl bytes."""
        for name in ("first", "second"):
            main(["run", "--config", str(CONFIG_DIR / "constants.json"), "--out", str(temp_dir / name)])
        first = (temp_dir / "first" / "results.jsonl").read_bytes()
        assert first
        assert first == (temp_dir / "second" / "results.jsonl").read_bytes()


@pytest.mark.integration
class TestSeededRuns:
    """Seeded experiments through the command line."""

    @pytest.fixture
    def small_young(self, write_config):
        raw = json.loads((CONFIG_DIR / "young.json").read_text())
        raw["family"] = {"count": 3}
        return write_config(raw, "young_small.json")

    def test_young_passes(self, small_young, temp_dir):
        out = temp_dir / "young"
        assert main(["run", "--config", str(small_young), "--out", str(out)]) == 0
        reports = {r["report"] for r in read_records(out)}
        assert reports == {"young_mult[0]", "young_mult[1]", "young_mult[2]"}

    def test_seed_reproducibility(self, small_young, temp_dir):
        for name in ("a", "b"):
            main(["run", "--config", str(small_young), "--seed", "5", "--out", str(temp_dir / name)])
        assert (temp_dir / "a" / "results.jsonl").read_bytes() == (temp_dir / "b" / "results.jsonl").read_bytes()


@pytest.mark.integration
@pytest.mark.slow
class TestReferenceTheorems:
    """Full verification runs on the reference configs."""

    @pytest.mark.parametrize("config", ["verify_increasing.json", "verify_decreasing.json", "hardy_sharpness.json"])
    def test_sandwich_configs_pass(self, config, temp_dir):
        assert main(["run", "--config", str(CONFIG_DIR / config), "--out", str(temp_dir / "run")]) == 0

    def test_hypotheses_report_divergent_entries(self, temp_dir):
        """The zeroth-order integrals of a Gaussian transform diverge and fail the verdict."""
        out = temp_dir / "hypotheses"
        assert main(["run", "--config", str(CONFIG_DIR / "hypotheses.json"), "--out", str(out)]) == 1
        failed = [r for r in read_records(out) if r["kind"] == "check" and not r["passed"]]
        assert failed


@pytest.mark.integration
class TestScalingRun:
    """The exponent relation and its gamma perturbation through the command line."""

    def test_perturbation_is_detected(self, temp_dir):
        """On the relation the residual vanishes; gamma + 0.1 moves it to -0.1/q = -0.025."""
        out = temp_dir / "scaling"
        assert main(["run", "--config", str(CONFIG_DIR / "scaling.json"), "--out", str(out)]) == 0

        records = read_records(out)
        assert abs(check(records, "residual")["detail"]["signed"]) <= 1e-3
        assert check(records, "relation_rejected")["passed"]
        shift = check(records, "residual_shift")
        assert shift["passed"]
        assert shift["detail"]["signed"] == pytest.approx(-0.025, abs=1e-3)

    def test_off_relation_config_fails(self, write_config, temp_dir):
        """gamma = 0.1 in the config breaks the relation and exits 1."""
        raw = json.loads((CONFIG_DIR / "scaling.json").read_text())
        raw["exponents"]["gamma"] = 0.1
        out = temp_dir / "broken"
        assert main(["run", "--config", str(write_config(raw, "scaling_broken.json")), "--out", str(out)]) == 1

        records = read_records(out)
        residual = check(records, "residual")
        assert not residual["passed"]
        assert residual["detail"]["signed"] == pytest.approx(-0.025, abs=1e-3)
        assert check(records, "residual_shift")["detail"]["signed"] == pytest.approx(-0.05, abs=1e-3)
