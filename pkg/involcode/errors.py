from __future__ import annotations

from typing import Any, Optional, Tuple

# Exit codes of the CLI contract.
EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PRECONDITION = 2
EXIT_CONSISTENCY = 3


class InvolcodeError(RuntimeError):
    """Base class; `exit_code` is what the CLI returns for it."""

    exit_code = EXIT_CONSISTENCY

    def __init__(self, message: str, *, stage: Optional[str] = None, simplex: Optional[Tuple[int, ...]] = None) -> None:
        super().__init__(message)
        self.message = message
        self.stage = stage
        self.simplex = simplex

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error": self.message, "kind": type(self).__name__}
        if self.stage:
            out["stage"] = self.stage
        if self.simplex is not None:
            out["simplex"] = list(self.simplex)
        return out

    def __str__(self) -> str:
        text = self.message
        if self.simplex is not None:
            text = f"{text} at simplex {tuple(self.simplex)}"
        if self.stage:
            text = f"[{self.stage}] {text}"
        return text


class InputError(InvolcodeError, ValueError):
    exit_code = EXIT_INPUT


class PreconditionError(InvolcodeError):
    exit_code = EXIT_PRECONDITION


class ConsistencyError(InvolcodeError):
    exit_code = EXIT_CONSISTENCY


class MalformedFacetError(InputError):
    def __init__(self, facet: Tuple[int, ...], detail: str = "") -> None:
        message = "malformed facet"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message, simplex=tuple(facet))


class TriangulationFormatError(InputError):
    """Parse failure with line/column or field context."""

    def __init__(self, message: str, *, line: Optional[int] = None, column: Optional[int] = None, field: Optional[str] = None) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if field:
            where.append(f"field {field}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.column = column
        self.field = field


class EnumerationLimitError(InputError):
    def __init__(self, dim: int, limit: int) -> None:
        super().__init__(f"enumeration limit: dimension {dim} exceeds {limit}")


class NotAnInvolutionError(PreconditionError):
    def __init__(self, detail: str = "") -> None:
        super().__init__("not an involution" + (f": {detail}" if detail else ""), stage="validate")


class NotSimplicialError(PreconditionError):
    def __init__(self, simplex: Tuple[int, ...]) -> None:
        super().__init__("not simplicial", stage="validate", simplex=simplex)


class SelfDualityViolation(ConsistencyError):
    def __init__(self, detail: str = "") -> None:
        super().__init__("self-duality violation" + (f": {detail}" if detail else ""), stage="extract")


class BoundaryAnomaly(ConsistencyError):
    def __init__(self, detail: str = "", *, simplex: Optional[Tuple[int, ...]] = None) -> None:
        super().__init__("boundary anomaly" + (f": {detail}" if detail else ""), stage="build_W", simplex=simplex)
