"""Finite abstract simplicial complexes and their mod-2 homology."""
from __future__ import annotations

import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from .audit import audit_event, get_logger
from .config import DEFAULT_SETTINGS, EngineSettings
from .errors import ConsistencyError, InputError, MalformedFacetError, PreconditionError
from .gf2 import Gf2Matrix, Gf2Vector, QuotientMap, bits_to_int, nullspace_basis, rank

log = get_logger("simplicial")

Simplex = Tuple[int, ...]
VertexMap = Union[Mapping[int, int], Sequence[int], None]


def faces(simplex: Simplex) -> List[Simplex]:
    """Codimension-one faces, face i omitting vertex i."""
    return [simplex[:i] + simplex[i + 1 :] for i in range(len(simplex))] if len(simplex) > 1 else []


@dataclass(frozen=True)
class SimplicialComplex:
    num_vertices: int
    simplices: Tuple[Tuple[Simplex, ...], ...] = ()

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self, d: int) -> int:
        return len(self.simplices[d]) if 0 <= d < len(self.simplices) else 0

    def f_vector(self) -> List[int]:
        return [len(level) for level in self.simplices]

    @property
    def vertices(self) -> List[int]:
        return [s[0] for s in self.simplices[0]] if self.simplices else []

    @cached_property
    def _index(self) -> List[Dict[Simplex, int]]:
        return [{s: i for i, s in enumerate(level)} for level in self.simplices]

    def index(self, d: int) -> Dict[Simplex, int]:
        return self._index[d] if 0 <= d < len(self.simplices) else {}

    def __contains__(self, simplex: object) -> bool:
        if not isinstance(simplex, tuple) or not simplex:
            return False
        return simplex in self.index(len(simplex) - 1)

    def __iter__(self) -> Iterator[Simplex]:
        for level in self.simplices:
            yield from level

    def faces_of(self, simplex: Simplex) -> List[Simplex]:
        return faces(simplex)

    def restricted(self, alive: Iterable[Simplex]) -> "SimplicialComplex":
        """The simplices in `alive`, which must be closed under faces."""
        return SimplicialComplex(self.num_vertices, _levels(alive))

    @cached_property
    def _hash(self) -> int:
        return hash((self.num_vertices, self.simplices))

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True)
class CellComplex:
    """Cells named by simplices, each with an explicit list of codimension-one faces.

    A quotient of a simplicial complex by an involution that moves every
    simplex lands here: one cell per orbit, named by its smaller member,
    bounded by the orbits of that member's faces.
    """

    simplices: Tuple[Tuple[Simplex, ...], ...] = ()
    boundaries: Mapping[Simplex, Tuple[Simplex, ...]] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def num_vertices(self) -> int:
        return self.count(0)

    def count(self, d: int) -> int:
        return len(self.simplices[d]) if 0 <= d < len(self.simplices) else 0

    def f_vector(self) -> List[int]:
        return [len(level) for level in self.simplices]

    @cached_property
    def _index(self) -> List[Dict[Simplex, int]]:
        return [{s: i for i, s in enumerate(level)} for level in self.simplices]

    def index(self, d: int) -> Dict[Simplex, int]:
        return self._index[d] if 0 <= d < len(self.simplices) else {}

    def __contains__(self, cell: object) -> bool:
        if not isinstance(cell, tuple) or not cell:
            return False
        return cell in self.index(len(cell) - 1)

    def __iter__(self) -> Iterator[Simplex]:
        for level in self.simplices:
            yield from level

    def faces_of(self, cell: Simplex) -> List[Simplex]:
        return list(self.boundaries.get(cell, ()))

    def closure(self, cells: Iterable[Simplex]) -> "CellComplex":
        """Smallest subcomplex containing `cells`."""
        kept: set = set()
        stack = list(cells)
        while stack:
            cell = stack.pop()
            if cell not in kept:
                kept.add(cell)
                stack.extend(self.faces_of(cell))
        return self.restricted(kept)

    def restricted(self, alive: Iterable[Simplex]) -> "CellComplex":
        """The cells in `alive`, which must be closed under faces."""
        levels = _levels(alive)
        return CellComplex(levels, {s: self.boundaries[s] for level in levels[1:] for s in level})

    @cached_property
    def _hash(self) -> int:
        return hash(self.simplices)

    def __hash__(self) -> int:
        return self._hash


Complex = Union[SimplicialComplex, CellComplex]


def _levels(cells: Iterable[Simplex]) -> Tuple[Tuple[Simplex, ...], ...]:
    by_dim: Dict[int, List[Simplex]] = defaultdict(list)
    for s in cells:
        by_dim[len(s) - 1].append(s)
    top = max(by_dim) if by_dim else -1
    return tuple(tuple(sorted(by_dim[d])) for d in range(top + 1))


def _closure(num_vertices: int, facets: Iterable[Simplex]) -> SimplicialComplex:
    by_dim: Dict[int, set] = defaultdict(set)
    for facet in facets:
        by_dim[len(facet) - 1].add(facet)
    if not by_dim:
        return SimplicialComplex(num_vertices, ())
    top = max(by_dim)
    for d in range(top, 0, -1):
        lower = by_dim[d - 1]
        for s in by_dim[d]:
            lower.update(faces(s))
    levels = tuple(tuple(sorted(by_dim[d])) for d in range(top + 1))
    return SimplicialComplex(num_vertices, levels)


def from_facets(num_vertices: int, facets: Iterable[Sequence[int]]) -> SimplicialComplex:
    checked: List[Simplex] = []
    for raw in facets:
        facet = tuple(raw)
        if not facet:
            raise MalformedFacetError(facet, "empty facet")
        for v in facet:
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < num_vertices:
                raise MalformedFacetError(facet, f"vertex {v!r} outside [0, {num_vertices})")
        if len(set(facet)) != len(facet):
            raise MalformedFacetError(facet, "repeated vertex")
        checked.append(tuple(sorted(facet)))
    return _closure(num_vertices, checked)


def from_cells(boundaries: Mapping[Simplex, Sequence[Simplex]], vertices: Iterable[Simplex] = ()) -> CellComplex:
    """Cells of positive dimension come from `boundaries`; `vertices` adds bare 0-cells."""
    cells = set(vertices) | set(boundaries)
    for cell, bound in boundaries.items():
        for f in bound:
            if len(f) != len(cell) - 1:
                raise MalformedFacetError(cell, f"face {f} has the wrong dimension")
            cells.add(f)
        if len(set(bound)) != len(bound):
            raise MalformedFacetError(cell, "face listed twice")
    missing = [f for f in cells if len(f) > 1 and f not in boundaries]
    if missing:
        raise MalformedFacetError(min(missing), "cell without a boundary")
    return CellComplex(_levels(cells), {cell: tuple(bound) for cell, bound in boundaries.items()})


def maximal_simplices(c: SimplicialComplex) -> List[Simplex]:
    covered: set = set()
    for level in c.simplices[1:]:
        for s in level:
            covered.update(faces(s))
    return [s for s in c if s not in covered]


def euler_characteristic(c: Complex) -> int:
    return sum((-1) ** d * n for d, n in enumerate(c.f_vector()))


def is_subcomplex(sub: SimplicialComplex, amb: SimplicialComplex) -> bool:
    return all(s in amb for s in sub)


def closed_star(c: SimplicialComplex, simplex: Simplex) -> SimplicialComplex:
    target = set(simplex)
    return _closure(c.num_vertices, [s for s in maximal_simplices(c) if target <= set(s)])


def link(c: SimplicialComplex, simplex: Simplex) -> SimplicialComplex:
    target = set(simplex)
    opposite = []
    for s in maximal_simplices(c):
        if target <= set(s):
            rest = tuple(v for v in s if v not in target)
            if rest:
                opposite.append(rest)
    return _closure(c.num_vertices, opposite)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Finding:
    condition: str
    message: str
    simplex: Optional[Simplex] = None

    def describe(self) -> str:
        where = f" at {self.simplex}" if self.simplex is not None else ""
        return f"({self.condition}) {self.message}{where}"


@dataclass(frozen=True)
class Diagnostics:
    findings: Tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def first(self) -> Optional[Finding]:
        return self.findings[0] if self.findings else None

    def lines(self) -> List[str]:
        return [f.describe() for f in self.findings] or ["ok"]

    def raise_if_failed(self, stage: str = "validate") -> None:
        first = self.first()
        if first is not None:
            raise PreconditionError(f"not a closed 3-manifold: ({first.condition}) {first.message}", stage=stage, simplex=first.simplex)


def _is_single_circle(edges: Sequence[Tuple[int, int]]) -> bool:
    if not edges:
        return False
    graph = nx.Graph()
    graph.add_edges_from(edges)
    if graph.number_of_edges() != len(edges):
        return False
    return all(deg == 2 for _, deg in graph.degree()) and nx.is_connected(graph)


def _surface_findings(c: SimplicialComplex) -> List[Finding]:
    """Checks that c is a closed connected surface."""
    if c.dim != 2:
        return [Finding("surface", f"expected a 2-complex, got dimension {c.dim}")]
    incidence: Dict[Simplex, List[Simplex]] = defaultdict(list)
    for t in c.simplices[2]:
        for e in faces(t):
            incidence[e].append(t)
    for e in c.simplices[1]:
        if len(incidence[e]) != 2:
            return [Finding("surface", f"edge lies in {len(incidence[e])} triangles", e)]
    opposite: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for a, b, d in c.simplices[2]:
        opposite[a].append((b, d))
        opposite[b].append((a, d))
        opposite[d].append((a, b))
    for (v,) in c.simplices[0]:
        if not _is_single_circle(opposite[v]):
            return [Finding("surface", "vertex link is not a circle", (v,))]
    if not _is_connected(c):
        return [Finding("surface", "surface is disconnected")]
    return []


def _is_connected(c: SimplicialComplex) -> bool:
    if not c.simplices:
        return False
    graph = nx.Graph()
    graph.add_nodes_from(c.vertices)
    if c.dim >= 1:
        graph.add_edges_from(c.simplices[1])
    return nx.is_connected(graph)


def validate_closed_3manifold(c: SimplicialComplex) -> Diagnostics:
    if c.dim != 3:
        return Diagnostics((Finding("dimension", f"expected dimension 3, got {c.dim}"),))
    findings: List[Finding] = []

    cofaces: Dict[Simplex, int] = defaultdict(int)
    for t in c.simplices[3]:
        for f in faces(t):
            cofaces[f] += 1
    for tri in c.simplices[2]:
        if cofaces[tri] != 2:
            findings.append(Finding("a", f"triangle is a face of {cofaces[tri]} tetrahedra", tri))
            break

    vertex_tets: Dict[int, List[Simplex]] = defaultdict(list)
    for t in c.simplices[3]:
        for v in t:
            vertex_tets[v].append(t)
    for (v,) in c.simplices[0]:
        triangles = [tuple(u for u in t if u != v) for t in vertex_tets[v]]
        lk = _closure(c.num_vertices, triangles)
        if not triangles or _surface_findings(lk) or euler_characteristic(lk) != 2:
            findings.append(Finding("b", "vertex link is not a 2-sphere", (v,)))
            break

    edge_links: Dict[Simplex, List[Tuple[int, int]]] = defaultdict(list)
    for t in c.simplices[3]:
        for a, b in combinations(range(4), 2):
            rest = tuple(t[i] for i in range(4) if i not in (a, b))
            edge_links[(t[a], t[b])].append(rest)  # type: ignore[arg-type]
    for e in c.simplices[1]:
        if not _is_single_circle(edge_links[e]):
            findings.append(Finding("c", "edge link is not a single circle", e))
            break

    if not _is_connected(c):
        findings.append(Finding("d", "complex is disconnected"))
    return Diagnostics(tuple(findings))


# ---------------------------------------------------------------------------
# Orientation
# ---------------------------------------------------------------------------

def _orient_top(c: SimplicialComplex) -> Optional[Dict[Simplex, int]]:
    """Signs relative to sorted vertex order, or None if non-orientable."""
    if c.dim < 1:
        return {s: 1 for s in c.simplices[0]} if c.simplices else {}
    top = c.simplices[c.dim]
    incidence: Dict[Simplex, List[Tuple[Simplex, int]]] = defaultdict(list)
    for s in top:
        for i, f in enumerate(faces(s)):
            incidence[f].append((s, i))
    sign: Dict[Simplex, int] = {}
    for start in top:
        if start in sign:
            continue
        sign[start] = 1
        stack = [start]
        while stack:
            s = stack.pop()
            for i, f in enumerate(faces(s)):
                for u, j in incidence[f]:
                    if u == s:
                        continue
                    # Neighbours induce opposite orientations on the shared face.
                    want = -sign[s] * (-1) ** (i + j)
                    have = sign.get(u)
                    if have is None:
                        sign[u] = want
                        stack.append(u)
                    elif have != want:
                        return None
    return sign


def orientation(c: SimplicialComplex) -> Optional[Dict[Simplex, int]]:
    validate_closed_3manifold(c).raise_if_failed(stage="orientation")
    return _orient_top(c)


def permutation_sign(images: Sequence[int]) -> int:
    """Sign of the permutation that sorts `images`."""
    seen = list(images)
    sign = 1
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Subdivision
# ---------------------------------------------------------------------------

def barycentric_subdivision(c: SimplicialComplex) -> Tuple[SimplicialComplex, Dict[Simplex, int]]:
    """Original vertices keep their ids; barycentres of higher simplices follow."""
    vertex_map: Dict[Simplex, int] = {}
    next_id = c.num_vertices
    for d, level in enumerate(c.simplices):
        for s in level:
            if d == 0:
                vertex_map[s] = s[0]
            else:
                vertex_map[s] = next_id
                next_id += 1
    chains: List[Simplex] = []
    for s in maximal_simplices(c):
        for order in permutations(s):
            chains.append(tuple(sorted(vertex_map[tuple(sorted(order[: i + 1]))] for i in range(len(order)))))
    sd = _closure(next_id, chains)
    audit_event(log, "subdivided", level=logging.DEBUG, before=c.f_vector(), after=sd.f_vector())
    return sd, vertex_map


# ---------------------------------------------------------------------------
# Chains and homology
# ---------------------------------------------------------------------------

def boundary_matrix(c: Complex, d: int) -> Gf2Matrix:
    """Rows index (d-1)-simplices, columns index d-simplices."""
    if d < 1:
        raise InputError(f"boundary degree must be >= 1, got {d}")
    lower = c.index(d - 1)
    rows: List[List[int]] = [[] for _ in range(c.count(d - 1))]
    for j, s in enumerate(c.simplices[d] if d <= c.dim else ()):
        for f in c.faces_of(s):
            rows[lower[f]].append(j)
    return Gf2Matrix(len(rows), c.count(d), tuple(bits_to_int(r) for r in rows))


def boundary_rows(c: Complex, d: int) -> Gf2Matrix:
    """Transpose of boundary_matrix(c, d): one row per d-simplex."""
    lower = c.index(d - 1)
    data = tuple(bits_to_int(lower[f] for f in c.faces_of(s)) for s in (c.simplices[d] if 0 < d <= c.dim else ()))
    return Gf2Matrix(len(data), c.count(d - 1), data)


@dataclass(frozen=True)
class HomologyBasis:
    degree: int
    cycle_reps: Gf2Matrix
    boundary_basis: Gf2Matrix
    betti: int
    quotient: Optional[QuotientMap] = field(default=None, compare=False, repr=False)

    def coordinates(self, cycle: Gf2Vector) -> Gf2Vector:
        quotient = self.quotient
        if quotient is None:
            quotient = QuotientMap(self.cycle_reps.stack(self.boundary_basis), self.boundary_basis)
        return quotient.coordinates(cycle)


def homology(c: Complex, d: int, settings: Optional[EngineSettings] = None) -> HomologyBasis:
    if d < 0 or d > max(c.dim, 0):
        raise InputError(f"homology degree {d} outside [0, {c.dim}]")
    n = c.count(d)
    if d == 0:
        cycles = Gf2Matrix.identity(n)
    else:
        cycles = nullspace_basis(boundary_matrix(c, d), settings)
    boundaries = boundary_rows(c, d + 1) if d + 1 <= c.dim else Gf2Matrix.zeros(0, n)
    quotient = QuotientMap(cycles, boundaries, settings)
    return HomologyBasis(
        degree=d,
        cycle_reps=quotient.complement,
        boundary_basis=quotient.subspace,
        betti=quotient.dimension,
        quotient=quotient,
    )


def collapse(c: Complex, protected: Iterable[Simplex] = ()) -> Complex:
    """Elementary free-face collapses; protected cells and their faces survive.

    Works on cell complexes too, provided each face appears at most once in a
    cell's boundary.
    """
    keep: set = set()
    stack = [tuple(sorted(s)) for s in protected]
    while stack:
        s = stack.pop()
        if s not in keep:
            keep.add(s)
            stack.extend(c.faces_of(s))

    alive = set(c)
    cofacets: Dict[Simplex, set] = {s: set() for s in alive}
    for s in alive:
        for f in c.faces_of(s):
            cofacets[f].add(s)

    heap = [(-len(s), s) for s in alive if len(cofacets[s]) == 1]
    heapq.heapify(heap)
    removed = 0
    while heap:
        _, s = heapq.heappop(heap)
        if s not in alive or s in keep or len(cofacets[s]) != 1:
            continue
        (t,) = cofacets[s]
        if t in keep or cofacets[t]:
            continue
        for gone in (t, s):
            alive.discard(gone)
            for f in c.faces_of(gone):
                cofacets[f].discard(gone)
        touched = set(c.faces_of(t)) | set(c.faces_of(s))
        for f in list(touched):
            touched.update(c.faces_of(f))
        for f in touched:
            if f in alive and len(cofacets[f]) == 1:
                heapq.heappush(heap, (-len(f), f))
        removed += 2

    if removed:
        audit_event(log, "collapsed", level=logging.DEBUG, removed=removed, remaining=len(alive))
    return c.restricted(alive)


def betti_numbers(c: Complex, settings: Optional[EngineSettings] = None, protected: Iterable[Simplex] = ()) -> List[int]:
    """Production path: optional collapse, then ranks only (no bases)."""
    settings = settings or DEFAULT_SETTINGS
    if c.dim < 0:
        return []
    work = collapse(c, protected) if settings.collapse else c
    ranks = [0] * (c.dim + 2)
    for d in range(1, work.dim + 1):
        ranks[d] = rank(boundary_matrix(work, d), settings)
    return [work.count(d) - ranks[d] - ranks[d + 1] for d in range(c.dim + 1)]


def total_mod2_dimension(c: SimplicialComplex, settings: Optional[EngineSettings] = None) -> int:
    return sum(betti_numbers(c, settings))


def _vertex_lookup(vertex_inclusion: VertexMap):
    if vertex_inclusion is None:
        return lambda v: v
    if isinstance(vertex_inclusion, Mapping):
        return vertex_inclusion.__getitem__
    seq = list(vertex_inclusion)
    return seq.__getitem__


def push_forward(sub: Complex, amb: Complex, vertex_inclusion: VertexMap, d: int, chain: Gf2Vector) -> Gf2Vector:
    f = _vertex_lookup(vertex_inclusion)
    target = amb.index(d)
    bits = 0
    for j, s in enumerate(sub.simplices[d]):
        if (chain.bits >> j) & 1:
            image = tuple(sorted(f(v) for v in s))
            idx = target.get(image)
            if idx is None or len(set(image)) != len(image):
                raise PreconditionError("vertex inclusion does not embed sub as a subcomplex", simplex=s)
            bits ^= 1 << idx
    return Gf2Vector(amb.count(d), bits)


def induced_H1_map(
    sub: Complex,
    amb: Complex,
    vertex_inclusion: VertexMap = None,
    settings: Optional[EngineSettings] = None,
    amb_homology: Optional[HomologyBasis] = None,
    sub_homology: Optional[HomologyBasis] = None,
) -> Gf2Matrix:
    """Matrix of H1(sub) -> H1(amb); column j is the image of sub's j-th class."""
    src = sub_homology or homology(sub, 1, settings)
    dst = amb_homology or homology(amb, 1, settings)
    d1 = boundary_matrix(amb, 1)
    columns: List[int] = []
    for i in range(src.cycle_reps.rows):
        image = push_forward(sub, amb, vertex_inclusion, 1, src.cycle_reps.row_vector(i))
        if d1.mul_vector(image).bits:
            raise ConsistencyError("pushed-forward cycle is not a cycle in the ambient complex")
        columns.append(dst.coordinates(image).bits)
    return Gf2Matrix(len(columns), dst.betti, tuple(columns)).transpose()


# ---------------------------------------------------------------------------
# Surfaces
# ---------------------------------------------------------------------------

SPHERE = "Sphere"
PROJECTIVE_PLANE = "ProjectivePlane"
OTHER = "Other"


@dataclass(frozen=True)
class SurfaceKind:
    tag: str
    euler: int
    # None when mod-2 cell data cannot decide (even Euler characteristic below 2).
    orientable: Optional[bool]


def _cell_surface_findings(c: CellComplex) -> List[Finding]:
    if c.dim != 2:
        return [Finding("surface", f"expected a 2-complex, got dimension {c.dim}")]
    incidence: Dict[Simplex, int] = defaultdict(int)
    for t in c.simplices[2]:
        for e in c.faces_of(t):
            incidence[e] += 1
    for e in c.simplices[1]:
        if incidence[e] != 2:
            return [Finding("surface", f"edge cell lies in {incidence[e]} 2-cells", e)]
    graph = nx.Graph()
    graph.add_nodes_from(c.simplices[0])
    graph.add_edges_from(tuple(c.faces_of(e)) for e in c.simplices[1])
    if not nx.is_connected(graph):
        return [Finding("surface", "surface is disconnected")]
    return []


def classify_surface(c: Complex) -> SurfaceKind:
    if isinstance(c, CellComplex):
        problems = _cell_surface_findings(c)
    else:
        problems = _surface_findings(c)
    if problems:
        raise PreconditionError(f"not a closed surface: {problems[0].message}", simplex=problems[0].simplex)
    euler = euler_characteristic(c)
    orientable: Optional[bool]
    if isinstance(c, SimplicialComplex):
        orientable = _orient_top(c) is not None
    elif euler % 2:
        orientable = False
    else:
        orientable = True if euler == 2 else None
    if euler == 2:
        tag = SPHERE
    elif euler == 1:
        tag = PROJECTIVE_PLANE
    else:
        tag = OTHER
    return SurfaceKind(tag=tag, euler=euler, orientable=orientable)
