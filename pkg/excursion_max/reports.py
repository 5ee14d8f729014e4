"""
Machine-readable reports emitted by the command line
"""

import json
import math
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_serializer

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = "1.0"
SIGNIFICANT_DIGITS = 12


def round_significant(value: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """
    Round every float nested in value to the given number of significant digits

    Params:
        value: A float, or a dict, list or tuple possibly holding floats.
        digits: Number of significant digits.

    Returns:
        A copy of value with rounded floats. Other values are returned unchanged.
    """
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return value
        return float(f"{value:.{digits}g}")
    if isinstance(value, dict):
        return {key: round_significant(item, digits) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [round_significant(item, digits) for item in value]
    return value


class ReportDocument(BaseModel):
    """
    Report of one command

    Floats of inputs and results are written with 12 significant digits, so a report read back with
    ReportDocument.model_validate_json() is equal to the written one after rounding.
    """

    model_config = ConfigDict(extra="forbid")

    schema_version: Literal["1.0"] = SCHEMA_VERSION
    command: Literal["score", "simulate", "analytic", "verify"]
    tool_version: str = TOOL_VERSION
    inputs: dict[str, Any] = Field(default_factory=dict)
    results: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None

    @field_serializer("inputs", "results")
    def round_floats(self, value: dict[str, Any]) -> dict[str, Any]:
        return round_significant(value)

    def to_json(self) -> str:
        """JSON document with sorted keys, identical for identical reports"""
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)

    def to_text(self) -> str:
        """Aligned `key: value` lines, nested keys joined with dots"""
        rows = [("command", self.command), ("tool_version", self.tool_version)]
        if self.seed is not None:
            rows.append(("seed", self.seed))
        dumped = self.model_dump(mode="json")
        rows.extend(_flatten("inputs", dumped["inputs"]))
        rows.extend(_flatten("results", dumped["results"]))
        width = max(len(key) for key, _ in rows)
        return "\n".join(f"{key.ljust(width)} : {value}" for key, value in rows)


def _flatten(prefix: str, value: Any) -> list[tuple[str, Any]]:
    if isinstance(value, dict):
        if not value:
            return [(prefix, "{}")]
        rows = []
        for key, item in value.items():
            rows.extend(_flatten(f"{prefix}.{key}", item))
        return rows
    if isinstance(value, list) and value and all(isinstance(item, dict) for item in value):
        rows = []
        for idx, item in enumerate(value):
            rows.extend(_flatten(f"{prefix}[{idx}]", item))
        return rows
    return [(prefix, value)]


def report_json_schema() -> str:
    """JSON schema of ReportDocument, as printed by `excursion-max schema`"""
    return json.dumps(ReportDocument.model_json_schema(mode="serialization"), indent=2, sort_keys=True)
