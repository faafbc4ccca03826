from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from .atlas import AtlasEntry, SphereSuspensionEntry, TorusConjugationEntry, load_triangulation
from .audit import StageTimer, audit_event, get_logger
from .codes import BinaryCode, WeightEnumerator, is_doubly_even, match_known_code, weight_enumerator
from .config import EngineSettings
from .equivariant import (
    EquivariantManifold,
    Involution,
    boundary_homology_map,
    check_maximal,
    extract_code,
    regularize,
)
from .errors import EnumerationLimitError, InputError, PreconditionError
from .report import (
    AtlasEntryOut,
    AtlasReport,
    CodeOut,
    ExtractionReport,
    KnownMatchOut,
    MaximalityOut,
    ValidationReport,
)
from .simplicial import SimplicialComplex, validate_closed_3manifold

log = get_logger("service")


class AtlasRegistry:
    def __init__(self) -> None:
        self._factories = {
            "sphere_suspension": SphereSuspensionEntry,
            "torus_conjugation": TorusConjugationEntry,
        }

    def names(self) -> List[str]:
        return sorted(self._factories)

    def is_known(self, spec: str) -> bool:
        return spec.partition(":")[0] in self._factories

    def create(self, spec: str) -> AtlasEntry:
        name, _, arg = spec.partition(":")
        entry_cls = self._factories.get(name)
        if not entry_cls:
            raise InputError(f"unknown atlas entry: {spec}")
        settings: Dict = {}
        if arg:
            if entry_cls.parameter is None:
                raise InputError(f"atlas entry {name} takes no parameter")
            try:
                settings[entry_cls.parameter] = int(arg)
            except ValueError as exc:
                raise InputError(f"atlas parameter must be an integer, got {arg!r}") from exc
        return entry_cls(spec, settings)


@dataclass(frozen=True)
class LoadedInput:
    name: str
    complex: SimplicialComplex
    tau: Involution


class ExtractionService:
    """Runs the pipeline for one input and assembles reports."""

    def __init__(self, settings: Optional[EngineSettings] = None) -> None:
        self.settings = settings or EngineSettings.from_env()
        self.registry = AtlasRegistry()

    def load(self, source: str) -> LoadedInput:
        # A file on disk wins over an atlas name.
        if Path(source).is_file():
            c, tau = load_triangulation(source)
        elif self.registry.is_known(source):
            c, tau = self.registry.create(source).build()
        else:
            raise InputError(f"no such file or atlas entry: {source}")
        return LoadedInput(name=source, complex=c, tau=tau)

    def regularize(self, loaded: LoadedInput, extra_subdivisions: int = 0) -> EquivariantManifold:
        return regularize(loaded.complex, loaded.tau, self.settings, extra_subdivisions=extra_subdivisions)

    def validate(self, source: str) -> ValidationReport:
        try:
            loaded = self.load(source)
        except PreconditionError as exc:
            return ValidationReport(input=source, ok=False, diagnostics=[exc.message], stage=exc.stage)
        diagnostics = validate_closed_3manifold(loaded.complex)
        if not diagnostics.ok:
            return ValidationReport(input=source, ok=False, diagnostics=diagnostics.lines(), stage="validate")
        try:
            em = self.regularize(loaded)
        except PreconditionError as exc:
            diagnostic = exc.message if exc.simplex is None else f"{exc.message} at {tuple(exc.simplex)}"
            return ValidationReport(input=source, ok=False, diagnostics=[diagnostic], stage=exc.stage)
        return ValidationReport(
            input=source,
            ok=True,
            diagnostics=diagnostics.lines(),
            fixed_vertices=em.k,
            subdivisions=em.subdivisions,
        )

    def extract(self, source: str, extra_subdivisions: int = 0, timings: bool = False) -> ExtractionReport:
        timer = StageTimer()
        with timer.stage("load"):
            loaded = self.load(source)
        with timer.stage("regularize"):
            em = self.regularize(loaded, extra_subdivisions)
        with timer.stage("build_W"):
            bm = boundary_homology_map(em, self.settings)
        with timer.stage("extract"):
            code = extract_code(em, self.settings, bm)
        with timer.stage("maximal"):
            maximality = check_maximal(em, self.settings, bm)
        with timer.stage("analyze"):
            enumerator = self._enumerator(code)
            match = self._match(code)

        report = ExtractionReport(
            input=loaded.name,
            k=em.k,
            fixed_vertices=list(em.fixed_vertices),
            subdivisions=em.subdivisions,
            maximality=MaximalityOut(
                maximal=maximality.maximal,
                k=maximality.k,
                total_dimension=maximality.total_dimension,
                rank=maximality.rank,
                b1_w=maximality.b1_w,
            ),
            code=CodeOut.from_code(code, enumerator),
            matched=KnownMatchOut(name=match[0], permutation=list(match[1])) if match else None,
            timings={k: round(v, 6) for k, v in timer.timings.items()} if timings else None,
        )
        audit_event(
            log,
            "extraction_done",
            input=loaded.name,
            k=em.k,
            maximal=maximality.maximal,
            doubly_even=is_doubly_even(code),
            timings=timer.timings,
        )
        return report

    def _enumerator(self, code: BinaryCode) -> Optional[WeightEnumerator]:
        try:
            return weight_enumerator(code, self.settings)
        except EnumerationLimitError as exc:
            audit_event(log, "enumerator_skipped", level=logging.WARNING, reason=str(exc))
            return None

    def _match(self, code: BinaryCode):
        try:
            return match_known_code(code, self.settings)
        except EnumerationLimitError as exc:
            audit_event(log, "match_skipped", level=logging.WARNING, reason=str(exc))
            return None

    def atlas_listing(self) -> AtlasReport:
        entries = []
        for name in self.registry.names():
            entry = self.registry.create(name)
            expected = entry.expected
            entries.append(
                AtlasEntryOut(
                    name=name,
                    description=entry.description,
                    k=expected.k,
                    maximal=expected.maximal,
                    code_name=expected.code_name,
                    doubly_even=expected.doubly_even,
                )
            )
        return AtlasReport(entries=entries)
