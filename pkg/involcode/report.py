"""Wire models for CLI reports and their two renderings."""
from __future__ import annotations

import json
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .codes import BinaryCode, WeightEnumerator, is_doubly_even, is_self_dual

REPORT_SCHEMA = "involcode-report/1"


class _Report(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_: str = Field(default=REPORT_SCHEMA, alias="schema")


class MaximalityOut(BaseModel):
    maximal: bool
    k: int
    total_dimension: int
    rank: int
    b1_w: int


class KnownMatchOut(BaseModel):
    name: str
    permutation: List[int]


class CodeOut(BaseModel):
    length: int
    dimension: int
    generator: List[str]
    self_dual: bool
    doubly_even: bool
    weight_enumerator: Optional[List[int]] = None
    weight_polynomial: Optional[str] = None

    @classmethod
    def from_code(cls, code: BinaryCode, enumerator: Optional[WeightEnumerator] = None) -> "CodeOut":
        return cls(
            length=code.length,
            dimension=code.dimension,
            generator=code.bitstrings(),
            self_dual=is_self_dual(code),
            doubly_even=is_doubly_even(code),
            weight_enumerator=list(enumerator.coefficients) if enumerator else None,
            weight_polynomial=enumerator.as_polynomial() if enumerator else None,
        )


class ExtractionReport(_Report):
    input: str
    k: int
    fixed_vertices: List[int]
    subdivisions: int
    maximality: MaximalityOut
    code: CodeOut
    matched: Optional[KnownMatchOut] = None
    timings: Optional[Dict[str, float]] = None


class ValidationReport(_Report):
    input: str
    ok: bool
    diagnostics: List[str]
    stage: Optional[str] = None
    fixed_vertices: Optional[int] = None
    subdivisions: Optional[int] = None


class CodeReport(_Report):
    command: str
    codes: List[CodeOut] = Field(default_factory=list)
    verdict: Optional[bool] = None
    permutation: Optional[List[int]] = None


class AtlasEntryOut(BaseModel):
    name: str
    description: str
    k: int
    maximal: Optional[bool] = None
    code_name: Optional[str] = None
    doubly_even: Optional[bool] = None


class AtlasReport(_Report):
    entries: List[AtlasEntryOut]


def render_json(report: BaseModel) -> str:
    return json.dumps(report.model_dump(by_alias=True, exclude_none=True), indent=2, sort_keys=True)


def render_table(rows: Sequence[Tuple[str, str]], width: int = 18) -> str:
    return "\n".join(f"{label:<{width}}{value}" for label, value in rows)


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def extraction_rows(report: ExtractionReport) -> List[Tuple[str, str]]:
    m = report.maximality
    code = report.code
    rows = [
        ("input", report.input),
        ("k", str(report.k)),
        ("fixed vertices", " ".join(map(str, report.fixed_vertices)) or "-"),
        ("subdivisions", str(report.subdivisions)),
        ("maximal", f"{_yes_no(m.maximal)} (k={m.k}, total={m.total_dimension}, rank={m.rank}, b1(W)={m.b1_w})"),
        ("dimension", str(code.dimension)),
        ("generator", " ".join(code.generator) or "-"),
        ("self-dual", _yes_no(code.self_dual)),
        ("doubly-even", _yes_no(code.doubly_even)),
        ("enumerator", code.weight_polynomial or "-"),
    ]
    if report.matched is not None:
        rows.append(("matched", f"{report.matched.name} {report.matched.permutation}"))
    for stage, seconds in sorted((report.timings or {}).items()):
        rows.append((f"time {stage}", f"{seconds:.3f}s"))
    return rows


def validation_rows(report: ValidationReport) -> List[Tuple[str, str]]:
    rows = [("input", report.input), ("verdict", "ok" if report.ok else "failed")]
    if report.stage:
        rows.append(("stage", report.stage))
    rows.extend(("diagnostic", line) for line in report.diagnostics)
    if report.fixed_vertices is not None:
        rows.append(("fixed vertices", str(report.fixed_vertices)))
    if report.subdivisions is not None:
        rows.append(("subdivisions", str(report.subdivisions)))
    return rows
