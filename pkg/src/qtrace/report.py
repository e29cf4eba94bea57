"""Check reports and run manifests."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List


@dataclass
class CheckReport:
    name: str
    passed: bool
    max_deviation: float = 0.0
    tolerance: float = 0.0
    exact: bool = False
    params: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_deviation"] = _jsonable(self.max_deviation)
        d["details"] = _jsonable(self.details)
        d["params"] = _jsonable(self.params)
        return d

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.exact:
            return f"{status} {self.name} (exact)"
        return f"{status} {self.name} max_dev={self.max_deviation:.3e} tol={self.tolerance:.1e}"


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return str(obj)
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


def dumps(obj) -> str:
    """Deterministic JSON (sorted keys, fixed separators)."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def merge(reports: List[CheckReport]) -> bool:
    return all(r.passed for r in reports)
