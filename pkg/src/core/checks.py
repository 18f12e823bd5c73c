"""
Pass/fail records for executable theorem checks.

Every verification routine returns a CheckReport made of named Check
entries; the CLI and the batch runner serialize them unchanged.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not-applicable"


@dataclass
class Check:
    """One named sub-check with its outcome and supporting data."""
    name: str
    status: str
    detail: str = ""
    data: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "status": self.status, "detail": self.detail, "data": self.data}


@dataclass
class CheckReport:
    """Ordered collection of checks for one experiment."""
    title: str
    checks: List[Check] = field(default_factory=list)
    applicable: bool = True
    note: str = ""
    data: Dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, ok: Optional[bool], detail: str = "", **data: Any) -> Check:
        """Append a check; ok=None records an inconclusive outcome."""
        status = INCONCLUSIVE if ok is None else (PASS if ok else FAIL)
        check = Check(name, status, detail, data)
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for check in other.checks:
            self.checks.append(Check(prefix + check.name, check.status, check.detail, check.data))
        if not other.applicable:
            self.add(prefix + "applicable", None, other.note)

    @property
    def status(self) -> str:
        if not self.applicable:
            return NOT_APPLICABLE
        if any(c.status == FAIL for c in self.checks):
            return FAIL
        if any(c.status == INCONCLUSIVE for c in self.checks):
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def failures(self) -> List[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "title": self.title,
            "status": self.status,
            "note": self.note,
            "checks": [c.to_dict() for c in self.checks],
            "data": self.data,
        }


def not_applicable(title: str, reason: str) -> CheckReport:
    return CheckReport(title=title, applicable=False, note=reason)
