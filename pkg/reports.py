"""
Verification reports shared by every checking operation.

A report is a flat list of named checks. Each check carries the quantity it
measured, the bound it was compared against, the tolerance used and the
result or lemma it came from, so the CLI can write one JSON record per
check without knowing which module produced it.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class Check:
    """One named comparison inside a report."""
    name: str
    empirical: float
    bound: Optional[float] = None
    tolerance: float = 0.0
    passed: bool = True
    detail: Dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "empirical": _jsonable(self.empirical),
            "bound": _jsonable(self.bound),
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
        }


@dataclass
class VerificationReport:
    """
    Named quantities, bounds, empirical values and pass/fail verdicts.

    Args:
        title: Short name of the check family (e.g. "commutation")
        provenance: The result being reproduced (e.g. "Hilbert commutation lemma")
    """
    title: str
    provenance: str
    checks: List[Check] = field(default_factory=list)
    quantities: Dict[str, Any] = field(default_factory=dict)

    def add(
        self,
        name: str,
        empirical: float,
        bound: Optional[float] = None,
        tolerance: float = 0.0,
        passed: Optional[bool] = None,
        **detail: Any,
    ) -> Check:
        """Append a check. With no explicit verdict, passes iff empirical <= bound + tolerance."""
        if passed is None:
            passed = bound is None or empirical <= bound + tolerance
        check = Check(name, float(empirical), None if bound is None else float(bound),
                      tolerance, bool(passed), dict(detail))
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def to_records(self) -> List[Dict[str, Any]]:
        records = []
        for check in self.checks:
            record = check.to_record()
            record["report"] = self.title
            record["provenance"] = self.provenance
            records.append(record)
        return records


def _jsonable(value: Any) -> Any:
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if hasattr(value, "tolist"):
        value = value.tolist()
    if value is None or isinstance(value, (str, bool)):
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    try:
        number = float(value)
    except (TypeError, ValueError):
        return str(value)
    if number != number:
        return "nan"
    if number in (float("inf"), float("-inf")):
        return "inf" if number > 0 else "-inf"
    return number
