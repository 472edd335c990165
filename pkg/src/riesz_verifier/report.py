"""
Suite reports: result models, witness serialization, text and structured rendering.

Reports are deterministic: results keep scenario order and every value is
written as an exact rational string. Timings are the only run-dependent
data and live in a separate section that can be left out.
"""

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from riesz_core.condexp import ConditionalExpectation
from riesz_core.partitions import Partition
from riesz_core.space import BandProjection, RieszElement, format_fraction

logger = logging.getLogger(__name__)

STATUSES = ("pass", "fail", "error", "cap_exceeded")


def to_plain(value: Any) -> Any:
    """Convert kernel objects to JSON-ready values with exact rational strings."""
    if isinstance(value, (RieszElement, BandProjection, Partition, ConditionalExpectation)):
        return str(value)
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, np.ndarray):
        return [
            "[" + " ".join(format_fraction(Fraction(x)) for x in row) + "]"
            for row in value.tolist()
        ]
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_plain(v) for v in items]
    if dataclasses.is_dataclass(value):
        return describe_witness(value)
    return str(value)


def describe_witness(witness: Any) -> Optional[dict[str, Any]]:
    """Serialize a witness dataclass, tagging it with its type name."""
    if witness is None:
        return None
    data: dict[str, Any] = {"type": type(witness).__name__}
    for f in dataclasses.fields(witness):
        data[f.name] = to_plain(getattr(witness, f.name))
    return data


@dataclass
class CheckResult:
    """
    Outcome of one requested check.

    Attributes:
        index: Position of the check in the scenario
        label: Check kind and parameters, e.g. ``markov(process=walk)``
        kind: Registered check name
        status: One of "pass", "fail", "error", "cap_exceeded"
        details: Verdicts and values specific to the check
        witness: Serialized counterexample, for failed identities
        message: Error message, for "error" and "cap_exceeded"
        elapsed: Wall-clock seconds
    """

    index: int
    label: str
    kind: str
    status: str
    details: dict[str, Any] = field(default_factory=dict)
    witness: Optional[dict[str, Any]] = None
    message: Optional[str] = None
    elapsed: float = 0.0

    @property
    def key(self) -> str:
        return f"{self.index:02d} {self.label}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "label": self.label,
            "kind": self.kind,
            "status": self.status,
            "details": self.details,
            "witness": self.witness,
            "message": self.message,
        }


@dataclass
class SuiteReport:
    """
    All check results of one scenario.

    Attributes:
        scenario: Scenario name
        results: Results in scenario order
        seed: Generator seed recorded by the scenario, if any
        format_version: Scenario format version
    """

    scenario: str
    results: list[CheckResult] = field(default_factory=list)
    seed: Optional[int] = None
    format_version: int = 1

    def count(self, status: str) -> int:
        return sum(1 for r in self.results if r.status == status)

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    @property
    def exit_code(self) -> int:
        """0 when every check passes, 1 on any failure or error, else 3 for a cap."""
        if any(r.status in ("fail", "error") for r in self.results):
            return 1
        if any(r.status == "cap_exceeded" for r in self.results):
            return 3
        return 0

    def to_dict(self, timings: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {
            "scenario": self.scenario,
            "format_version": self.format_version,
            "seed": self.seed,
            "summary": {status: self.count(status) for status in STATUSES},
            "exit_code": self.exit_code,
            "results": [r.to_dict() for r in self.results],
        }
        if timings:
            data["timings"] = {r.key: round(r.elapsed, 6) for r in self.results}
        return data


def render_structured(report: SuiteReport, timings: bool = True) -> str:
    return json.dumps(report.to_dict(timings), indent=2, sort_keys=True) + "\n"


def _detail_lines(value: Any, indent: str) -> list[str]:
    if isinstance(value, dict):
        lines = []
        for k, v in sorted(value.items()):
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{indent}{k}:")
                lines.extend(_detail_lines(v, indent + "  "))
            else:
                lines.append(f"{indent}{k}: {_scalar(v)}")
        return lines
    if isinstance(value, list):
        return [f"{indent}- {_scalar(v)}" for v in value]
    return [f"{indent}{_scalar(value)}"]


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "-"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_text(report: SuiteReport, timings: bool = True) -> str:
    """Human-readable report; identical for identical results when timings are off."""
    seed = _scalar(report.seed)
    lines = [f"Scenario: {report.scenario} (format {report.format_version}, seed {seed})"]
    for r in report.results:
        lines.append(f"[{r.status.upper()}] {r.label}")
        if r.message:
            lines.append(f"    message: {r.message}")
        if r.details:
            lines.extend(_detail_lines(r.details, "    "))
        if r.witness:
            lines.append("    witness:")
            lines.extend(_detail_lines(r.witness, "      "))
    summary = ", ".join(f"{report.count(s)} {s}" for s in STATUSES)
    lines.append(f"Summary: {summary}")
    lines.append(f"Result: {'PASS' if report.exit_code == 0 else 'FAIL'} (exit {report.exit_code})")
    if timings:
        lines.append("Timings:")
        lines.extend(f"  {r.key}: {r.elapsed:.6f}s" for r in report.results)
    return "\n".join(lines) + "\n"


def load_report(text: str) -> SuiteReport:
    """Rebuild a report from its structured form."""
    data = json.loads(text)
    timings = data.get("timings", {})
    results = []
    for item in data.get("results", []):
        result = CheckResult(
            index=item["index"],
            label=item["label"],
            kind=item["kind"],
            status=item["status"],
            details=item.get("details") or {},
            witness=item.get("witness"),
            message=item.get("message"),
        )
        result.elapsed = float(timings.get(result.key, 0.0))
        results.append(result)
    return SuiteReport(
        scenario=data["scenario"],
        results=results,
        seed=data.get("seed"),
        format_version=data.get("format_version", 1),
    )
