"""Reading and writing the involcode-triangulation/1 JSON format."""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..audit import audit_event, get_logger
from ..equivariant import Involution, validate_involution
from ..errors import InputError, TriangulationFormatError
from ..simplicial import SimplicialComplex, from_facets

FORMAT_TAG = "involcode-triangulation/1"

log = get_logger("atlas")


class TriangulationFile(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)

    format: Literal["involcode-triangulation/1"]
    num_vertices: int = Field(ge=0)
    tetrahedra: List[List[int]]
    involution: List[int]


def _field_path(loc: Tuple[Union[int, str], ...]) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def parse_triangulation(text: str) -> Tuple[SimplicialComplex, Involution]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TriangulationFormatError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    try:
        doc = TriangulationFile.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise TriangulationFormatError(first["msg"].lower(), field=_field_path(tuple(first["loc"])) or None) from exc

    for i, tet in enumerate(doc.tetrahedra):
        if len(tet) != 4:
            raise TriangulationFormatError(f"tetrahedron has {len(tet)} vertices", field=f"tetrahedra[{i}]")
    # Repeated or out-of-range vertices surface as malformed facets.
    c = from_facets(doc.num_vertices, doc.tetrahedra)
    for i, tet in enumerate(doc.tetrahedra):
        if tet != sorted(tet):
            raise TriangulationFormatError("tetrahedron is not strictly increasing", field=f"tetrahedra[{i}]")
    if doc.tetrahedra != sorted(doc.tetrahedra):
        raise TriangulationFormatError("tetrahedra are not lexicographically sorted", field="tetrahedra")
    if len(set(map(tuple, doc.tetrahedra))) != len(doc.tetrahedra):
        raise TriangulationFormatError("duplicate tetrahedron", field="tetrahedra")
    return c, validate_involution(c, doc.involution)


def load_triangulation(path: Union[str, Path]) -> Tuple[SimplicialComplex, Involution]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    c, tau = parse_triangulation(text)
    audit_event(log, "loaded", path=str(path), f_vector=c.f_vector())
    return c, tau


def serialize_triangulation(c: SimplicialComplex, tau: Involution) -> str:
    if c.dim != 3:
        raise InputError(f"only 3-dimensional complexes can be written, got dimension {c.dim}")
    payload = {
        "format": FORMAT_TAG,
        "num_vertices": c.num_vertices,
        "tetrahedra": [list(t) for t in c.simplices[3]],
        "involution": list(tau.vertex_perm),
    }
    return json.dumps(payload, separators=(",", ":")) + "\n"


def dump_triangulation(c: SimplicialComplex, tau: Involution, path: Union[str, Path]) -> Path:
    path = Path(path)
    text = serialize_triangulation(c, tau)
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    audit_event(log, "written", path=str(path), tetrahedra=c.count(3))
    return path
