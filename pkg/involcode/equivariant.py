"""Involutions on triangulated 3-manifolds and the code of their fixed points.

Pipeline: validate_involution -> regularize -> build_W -> extract_code.
The orbit space W is M minus open stars of the fixed vertices, divided by
the involution; its boundary has one projective-plane component per
fixed vertex, and the code is the kernel of H1(boundary) -> H1(W).
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .audit import audit_event, get_logger
from .codes import BinaryCode, is_self_dual
from .config import DEFAULT_SETTINGS, EngineSettings
from .errors import (
    BoundaryAnomaly,
    ConsistencyError,
    NotAnInvolutionError,
    NotSimplicialError,
    PreconditionError,
    SelfDualityViolation,
)
from .gf2 import Gf2Matrix, iter_bits, nullspace_basis, rank
from .simplicial import (
    PROJECTIVE_PLANE,
    CellComplex,
    Diagnostics,
    Finding,
    HomologyBasis,
    Simplex,
    SimplicialComplex,
    SurfaceKind,
    barycentric_subdivision,
    classify_surface,
    collapse,
    faces,
    from_cells,
    from_facets,
    homology,
    induced_H1_map,
    maximal_simplices,
    orientation,
    permutation_sign,
    total_mod2_dimension,
    validate_closed_3manifold,
)

log = get_logger("equivariant")


@dataclass(frozen=True)
class Involution:
    vertex_perm: Tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.vertex_perm[v]

    def image(self, simplex: Sequence[int]) -> Simplex:
        return tuple(sorted(self.vertex_perm[v] for v in simplex))

    def fixes(self, v: int) -> bool:
        return self.vertex_perm[v] == v


def validate_involution(c: SimplicialComplex, perm: Sequence[int]) -> Involution:
    perm = tuple(perm)
    n = c.num_vertices
    if len(perm) != n:
        raise NotAnInvolutionError(f"permutation has {len(perm)} entries for {n} vertices")
    for v, p in enumerate(perm):
        if not isinstance(p, int) or isinstance(p, bool) or not 0 <= p < n:
            raise NotAnInvolutionError(f"vertex {v} maps to {p!r}")
    for v, p in enumerate(perm):
        if perm[p] != v:
            raise NotAnInvolutionError(f"vertex {v} -> {p} -> {perm[p]}")
    tau = Involution(perm)
    # Images of faces are faces of images, so maximal simplices suffice.
    for s in maximal_simplices(c):
        if tau.image(s) not in c:
            raise NotSimplicialError(s)
    return tau


def fixed_vertices(c: SimplicialComplex, tau: Involution) -> List[int]:
    return [v for v in c.vertices if tau.fixes(v)]


def transport_involution(tau: Involution, vertex_map: Mapping[Simplex, int], sd: SimplicialComplex) -> Involution:
    """The barycentre of s goes to the barycentre of tau(s)."""
    perm = [0] * sd.num_vertices
    for s, v in vertex_map.items():
        perm[v] = vertex_map[tau.image(s)]
    return Involution(tuple(perm))


def orientation_character(c: SimplicialComplex, tau: Involution) -> int:
    """+1 if tau preserves the fundamental class of c, -1 if it reverses it."""
    signs = orientation(c)
    if signs is None:
        raise PreconditionError("manifold is not orientable", stage="regularize")
    t = c.simplices[c.dim][0]
    return signs[t] * signs[tau.image(t)] * permutation_sign([tau(v) for v in t])


# ---------------------------------------------------------------------------
# Regularization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivariantManifold:
    m: SimplicialComplex
    tau: Involution
    fixed_vertices: Tuple[int, ...]
    regularized: bool = False
    source: Optional[SimplicialComplex] = field(default=None, compare=False, repr=False)
    subdivisions: int = 0
    # Sum of mod-2 Betti numbers of the manifold.
    total_dimension: Optional[int] = None

    @property
    def k(self) -> int:
        return len(self.fixed_vertices)


def _pointwise_fixed_edge(c: SimplicialComplex, tau: Involution) -> Optional[Simplex]:
    # Any pointwise-fixed simplex of positive dimension contains such an edge.
    if c.dim < 1:
        return None
    for a, b in c.simplices[1]:
        if tau.fixes(a) and tau.fixes(b):
            return (a, b)
    return None


def regularity_diagnostics(c: SimplicialComplex, tau: Involution) -> Diagnostics:
    """Checks the invariants a regularized manifold must satisfy, first offender each."""
    perm = tau.vertex_perm
    fixed = fixed_vertices(c, tau)
    findings: List[Finding] = []

    for s in c:
        if len(s) > 1 and tau.image(s) == s:
            findings.append(Finding("setwise", "invariant simplex is not a fixed vertex", s))
            break

    neighbours: Dict[int, set] = defaultdict(set)
    for a, b in c.simplices[1] if c.dim >= 1 else ():
        neighbours[a].add(b)
        neighbours[b].add(a)
        if perm[a] == b:
            findings.append(Finding("orbit", "simplex contains two vertices of one orbit", (a, b)))
    findings = _first_per_condition(findings)

    owner: Dict[int, int] = {}
    for x in fixed:
        star = neighbours[x] | {x}
        if {perm[u] for u in star} != star:
            findings.append(Finding("invariant-star", "closed star is not invariant", (x,)))
            break
        clash = next((owner[u] for u in sorted(star) if u in owner), None)
        if clash is not None:
            findings.append(Finding("disjoint-stars", "closed stars of fixed vertices meet", (clash, x)))
            break
        for u in star:
            owner[u] = x
    return Diagnostics(tuple(findings))


def _orbit_collision(c: SimplicialComplex, tau: Involution) -> Optional[Simplex]:
    """A simplex off the fixed vertices whose vertex orbits match another simplex orbit's."""
    perm = tau.vertex_perm
    seen: Dict[Simplex, Simplex] = {}
    for s in c:
        if any(tau.fixes(v) for v in s):
            continue
        key = tuple(sorted(min(v, perm[v]) for v in s))
        rep = min(s, tau.image(s))
        if seen.setdefault(key, rep) != rep:
            return s
    return None


def _first_per_condition(findings: List[Finding]) -> List[Finding]:
    out: List[Finding] = []
    seen: set = set()
    for f in findings:
        if f.condition not in seen:
            seen.add(f.condition)
            out.append(f)
    return out


def _subdivide(c: SimplicialComplex, tau: Involution) -> Tuple[SimplicialComplex, Involution]:
    sd, vertex_map = barycentric_subdivision(c)
    return sd, transport_involution(tau, vertex_map, sd)


def regularize(
    c: SimplicialComplex,
    tau: Involution,
    settings: Optional[EngineSettings] = None,
    extra_subdivisions: int = 0,
) -> EquivariantManifold:
    settings = settings or DEFAULT_SETTINGS
    validate_closed_3manifold(c).raise_if_failed(stage="regularize")

    current, current_tau, rounds = c, tau, 0
    while True:
        edge = _pointwise_fixed_edge(current, current_tau)
        if edge is not None:
            raise PreconditionError("fixed-point set not isolated", stage="regularize", simplex=edge)
        diagnostics = regularity_diagnostics(current, current_tau)
        audit_event(log, "regularity_check", level=logging.DEBUG, round=rounds, problems=diagnostics.lines())
        if diagnostics.ok:
            break
        if rounds >= settings.max_subdivisions:
            first = diagnostics.first()
            raise PreconditionError(
                f"regularization failed after {rounds} subdivisions: {first.message}",
                stage="regularize",
                simplex=first.simplex,
            )
        current, current_tau = _subdivide(current, current_tau)
        rounds += 1

    # Invariants survive further subdivision and fixed vertices keep their ids.
    for _ in range(extra_subdivisions):
        current, current_tau = _subdivide(current, current_tau)
        rounds += 1

    if orientation_character(c, tau) != -1:
        raise PreconditionError("orientation-preserving involution", stage="regularize")

    em = EquivariantManifold(
        m=current,
        tau=current_tau,
        fixed_vertices=tuple(fixed_vertices(current, current_tau)),
        regularized=True,
        source=c,
        subdivisions=rounds,
        total_dimension=total_mod2_dimension(c, settings),
    )
    smith_bound(em, settings)
    if em.k % 2:
        raise ConsistencyError(f"odd number of fixed points: {em.k}", stage="regularize")
    audit_event(log, "regularized", subdivisions=rounds, fixed=em.k, f_vector=current.f_vector())
    return em


def smith_bound(em: EquivariantManifold, settings: Optional[EngineSettings] = None) -> Tuple[int, int]:
    """(k, total mod-2 Betti number); k never exceeds the total."""
    total = em.total_dimension
    if total is None:
        total = total_mod2_dimension(em.source or em.m, settings)
    if em.k > total:
        raise ConsistencyError(f"{em.k} fixed points exceed the Smith bound {total}", stage="regularize")
    return em.k, total


# ---------------------------------------------------------------------------
# Orbit space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryComponent:
    fixed_vertex: int
    complex: CellComplex
    kind: SurfaceKind


@dataclass(frozen=True)
class OrbitComplexW:
    # One cell per orbit of simplices of M missing the fixed vertices.
    w: CellComplex
    boundary_components: Tuple[BoundaryComponent, ...]
    # The two vertices of M in each vertex orbit off the fixed set, by smaller member.
    vertex_orbits: Tuple[Tuple[int, ...], ...]
    orbit_map: Mapping[Simplex, Simplex] = field(default_factory=dict, compare=False, repr=False)

    @property
    def k(self) -> int:
        return len(self.boundary_components)

    def boundary_triangles(self) -> set:
        return {t for comp in self.boundary_components for t in comp.complex.simplices[2]}


def build_W(em: EquivariantManifold) -> OrbitComplexW:
    if not em.regularized:
        raise PreconditionError("manifold is not regularized", stage="build_W")
    perm = em.tau.vertex_perm
    fixed = set(em.fixed_vertices)
    vertex_orbits = tuple(sorted({tuple(sorted({v, perm[v]})) for v in em.m.vertices if v not in fixed}))

    orbit_map: Dict[Simplex, Simplex] = {}
    kept = [0] * (em.m.dim + 1)
    for s in em.m:
        if fixed.intersection(s):
            continue
        image = em.tau.image(s)
        if image == s:
            raise BoundaryAnomaly("simplex is invariant under the involution", simplex=s)
        orbit_map[s] = min(s, image)
        kept[len(s) - 1] += 1

    boundaries: Dict[Simplex, Tuple[Simplex, ...]] = {}
    for rep in set(orbit_map.values()):
        if len(rep) > 1:
            bound = tuple(orbit_map[f] for f in faces(rep))
            if len(set(bound)) != len(bound):
                raise BoundaryAnomaly("two faces of a simplex lie in one orbit", simplex=rep)
            boundaries[rep] = bound
    w = from_cells(boundaries, (rep for rep in orbit_map.values() if len(rep) == 1))
    for d, n in enumerate(kept):
        if n != 2 * w.count(d):
            raise BoundaryAnomaly(f"{n} simplices of dimension {d} give {w.count(d)} orbit cells")

    link_triangles: Dict[int, List[Simplex]] = defaultdict(list)
    for t in em.m.simplices[3]:
        for v in t:
            if v in fixed:
                link_triangles[v].append(tuple(u for u in t if u != v))

    components = []
    for x in em.fixed_vertices:
        comp = w.closure(orbit_map[tri] for tri in link_triangles[x])
        try:
            kind = classify_surface(comp)
        except PreconditionError as exc:
            raise BoundaryAnomaly(f"component around vertex {x}: {exc.message}", simplex=(x,)) from exc
        if kind.tag != PROJECTIVE_PLANE:
            raise BoundaryAnomaly(f"component around vertex {x} is {kind.tag}", simplex=(x,))
        components.append(BoundaryComponent(fixed_vertex=x, complex=comp, kind=kind))

    ow = OrbitComplexW(w=w, boundary_components=tuple(components), vertex_orbits=vertex_orbits, orbit_map=orbit_map)
    _check_triangle_incidence(ow)
    audit_event(log, "orbit_complex", level=logging.DEBUG, f_vector=w.f_vector(), components=ow.k)
    return ow


def _check_triangle_incidence(ow: OrbitComplexW) -> None:
    cofaces: Dict[Simplex, int] = defaultdict(int)
    for t in ow.w.simplices[3] if ow.w.dim >= 3 else ():
        for f in ow.w.faces_of(t):
            cofaces[f] += 1
    boundary = ow.boundary_triangles()
    for tri in ow.w.simplices[2] if ow.w.dim >= 2 else ():
        expected = 1 if tri in boundary else 2
        if cofaces[tri] != expected:
            raise BoundaryAnomaly(f"triangle lies in {cofaces[tri]} tetrahedra, expected {expected}", simplex=tri)


def simplicial_quotient(em: EquivariantManifold) -> SimplicialComplex:
    """W as a simplicial complex on vertex orbits, after further subdivision.

    Vertex orbits name simplex orbits only once the manifold is subdivided
    again; two more rounds always suffice. Every round multiplies the
    tetrahedra by 24, so extraction runs on the orbit cells of build_W and
    this serves as a cross-check.
    """
    if not em.regularized:
        raise PreconditionError("manifold is not regularized", stage="build_W")
    m, tau = _subdivide(em.m, em.tau)
    rounds = 1
    while _orbit_collision(m, tau) is not None:
        if rounds == 2:
            raise ConsistencyError("vertex orbits still collide after two subdivisions", stage="build_W")
        m, tau = _subdivide(m, tau)
        rounds += 1

    fixed = set(fixed_vertices(m, tau))
    reps = sorted({min(v, tau(v)) for v in m.vertices if v not in fixed})
    orbit_id = {}
    for i, r in enumerate(reps):
        orbit_id[r] = orbit_id[tau(r)] = i
    facets = {tuple(orbit_id[v] for v in s) for s in m.simplices[3] if not fixed.intersection(s)}
    quotient = from_facets(len(reps), facets)
    audit_event(log, "simplicial_quotient", level=logging.DEBUG, rounds=rounds, f_vector=quotient.f_vector())
    return quotient


# ---------------------------------------------------------------------------
# Code extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundaryMap:
    """Matrix of H1(boundary of W) -> H1(W); column i is component i."""

    orbit: OrbitComplexW
    matrix: Gf2Matrix
    w_homology: HomologyBasis = field(compare=False, repr=False)
    # The collapsed W that homology ran on.
    work: Optional[CellComplex] = field(default=None, compare=False, repr=False)


def boundary_homology_map(em: EquivariantManifold, settings: Optional[EngineSettings] = None) -> BoundaryMap:
    settings = settings or DEFAULT_SETTINGS
    ow = build_W(em)
    component_homology = [homology(comp.complex, 1, settings) for comp in ow.boundary_components]
    if settings.collapse:
        # Only the edges of each boundary cycle have to survive.
        cycle_edges = [
            comp.complex.simplices[1][j]
            for comp, h in zip(ow.boundary_components, component_homology)
            for row in h.cycle_reps.data
            for j in iter_bits(row)
        ]
        work = collapse(ow.w, cycle_edges)
    else:
        work = ow.w
    h1 = homology(work, 1, settings)
    columns: List[int] = []
    for comp, comp_h1 in zip(ow.boundary_components, component_homology):
        column = induced_H1_map(comp.complex, work, None, settings, amb_homology=h1, sub_homology=comp_h1)
        if column.cols != 1:
            raise BoundaryAnomaly(f"component around vertex {comp.fixed_vertex} has {column.cols} homology classes")
        columns.append(column.transpose().data[0])
    matrix = Gf2Matrix(len(columns), h1.betti, tuple(columns)).transpose()
    audit_event(log, "boundary_map", level=logging.DEBUG, k=ow.k, b1_w=h1.betti, work_f_vector=work.f_vector())
    return BoundaryMap(orbit=ow, matrix=matrix, w_homology=h1, work=work)


def restriction_image(
    em: EquivariantManifold,
    settings: Optional[EngineSettings] = None,
    boundary_map: Optional[BoundaryMap] = None,
) -> BinaryCode:
    """Image of H^1(W) -> H^1(boundary), i.e. the row space of the boundary map."""
    bm = boundary_map or boundary_homology_map(em, settings)
    return BinaryCode.from_generators(bm.matrix)


def extract_code(
    em: EquivariantManifold,
    settings: Optional[EngineSettings] = None,
    boundary_map: Optional[BoundaryMap] = None,
) -> BinaryCode:
    bm = boundary_map or boundary_homology_map(em, settings)
    code = BinaryCode.from_generators(nullspace_basis(bm.matrix, settings))
    if not is_self_dual(code):
        raise SelfDualityViolation(f"kernel has dimension {code.dimension} for {code.length} fixed points")
    # Kernel and restriction image are annihilators of each other.
    if restriction_image(em, settings, bm) != code:
        raise SelfDualityViolation("kernel differs from the restriction image")
    if code.length and not code.contains_all_ones():
        raise ConsistencyError("all-ones word missing from the extracted code", stage="extract")
    audit_event(log, "extracted", k=code.length, dimension=code.dimension, generator=code.bitstrings())
    return code


@dataclass(frozen=True)
class MaximalityReport:
    maximal: bool
    k: int
    total_dimension: int
    rank: int
    b1_w: int

    @property
    def surjective(self) -> bool:
        return self.rank == self.b1_w

    @property
    def rank_deficit(self) -> int:
        return self.b1_w - self.rank


def check_maximal(
    em: EquivariantManifold,
    settings: Optional[EngineSettings] = None,
    boundary_map: Optional[BoundaryMap] = None,
) -> MaximalityReport:
    if not em.regularized:
        raise PreconditionError("manifold is not regularized", stage="maximal")
    k, total = smith_bound(em, settings)
    bm = boundary_map or boundary_homology_map(em, settings)
    report = MaximalityReport(
        maximal=k == total,
        k=k,
        total_dimension=total,
        rank=rank(bm.matrix, settings),
        b1_w=bm.matrix.rows,
    )
    if report.maximal != report.surjective:
        raise ConsistencyError(
            f"maximality criteria disagree: k={k}, total={total}, rank={report.rank}, b1(W)={report.b1_w}",
            stage="maximal",
        )
    return report
