"""
Unit tests for VerificationReport in reports.py
"""

import json
import math
import os
import sys

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from reports import Check, VerificationReport, _jsonable


@pytest.mark.unit
class TestAdd:
    """Tests for VerificationReport.add."""

    def test_default_verdict_uses_bound(self):
        report = VerificationReport("r", "test")
        assert report.add("below", 1.0, bound=1.0).passed
        assert report.add("within_tolerance", 1.05, bound=1.0, tolerance=0.1).passed
        assert not report.add("above", 1.2, bound=1.0, tolerance=0.1).passed

    def test_no_bound_passes(self):
        """A check without a bound is a recorded quantity that passes."""
        report = VerificationReport("r", "test")
        assert report.add("value", 123.0).passed

    def test_explicit_verdict_wins(self):
        report = VerificationReport("r", "test")
        check = report.add("forced", 0.0, bound=1.0, passed=False)
        assert not check.passed

    def test_detail_is_kept(self):
        report = VerificationReport("r", "test")
        check = report.add("c", 1.0, divergent=False, maximizer=0.5)
        assert check.detail == {"divergent": False, "maximizer": 0.5}

    def test_numpy_inputs_become_floats(self):
        report = VerificationReport("r", "test")
        check = report.add("c", np.float64(2.0), bound=np.int64(3))
        assert type(check.empirical) is float
        assert type(check.bound) is float


@pytest.mark.unit
class TestVerdicts:
    """Tests for the aggregate verdict."""

    def test_empty_report_passes(self):
        assert VerificationReport("r", "test").passed

    def test_one_failure_fails_report(self):
        report = VerificationReport("r", "test")
        report.add("ok", 0.0, bound=1.0)
        report.add("bad", 2.0, bound=1.0)
        assert not report.passed
        assert [c.name for c in report.failed_checks()] == ["bad"]


@pytest.mark.unit
class TestRecords:
    """Tests for JSON records."""

    def test_records_carry_report_fields(self):
        report = VerificationReport("commutation", "Hilbert commutation")
        report.add("sup_error", 1e-9, bound=1e-3)
        (record,) = report.to_records()
        assert record["report"] == "commutation"
        assert record["provenance"] == "Hilbert commutation"
        assert record["passed"] is True
        assert record["bound"] == 1e-3

    def test_non_finite_values_serialize(self):
        """inf and nan are written as strings so the line is strict JSON."""
        check = Check("k", math.inf, bound=None, detail={"core": math.nan, "tail": -math.inf})
        record = check.to_record()
        assert record["empirical"] == "inf"
        assert record["detail"] == {"core": "nan", "tail": "-inf"}
        json.dumps(record, allow_nan=False)


@pytest.mark.unit
class TestJsonable:
    """Tests for _jsonable."""

    def test_arrays_become_lists(self):
        assert _jsonable(np.array([1.0, np.inf])) == [1.0, "inf"]

    def test_nested_containers(self):
        assert _jsonable({"a": (np.float32(0.5), None), 1: "x"}) == {"a": [0.5, None], "1": "x"}

    def test_booleans_are_kept(self):
        assert _jsonable(True) is True
        assert _jsonable(np.bool_(False)) is False

    def test_unknown_objects_become_strings(self):
        assert _jsonable(object).startswith("<class")
