from __future__ import annotations

from itertools import permutations, product
from typing import Tuple

from ..equivariant import Involution, validate_involution
from ..errors import InputError
from ..simplicial import SimplicialComplex, from_facets
from .base import AtlasEntry, Expectation

DEFAULT_RESOLUTION = 4


def _vertex(x: int, y: int, z: int, m: int) -> int:
    return (x % m) * m * m + (y % m) * m + (z % m)


def torus_conjugation(m: int = DEFAULT_RESOLUTION) -> Tuple[SimplicialComplex, Involution]:
    """Kuhn triangulation of the m x m x m grid torus with x -> -x mod m."""
    if m < 4 or m % 2:
        raise InputError(f"grid resolution must be even and at least 4, got {m}")
    tets = []
    for base in product(range(m), repeat=3):
        # One tetrahedron per axis order: walk from the corner, one step per axis.
        for axes in permutations(range(3)):
            point = list(base)
            chain = [_vertex(*point, m)]
            for axis in axes:
                point[axis] += 1
                chain.append(_vertex(*point, m))
            tets.append(chain)
    c = from_facets(m**3, tets)
    perm = [_vertex(-x, -y, -z, m) for x, y, z in product(range(m), repeat=3)]
    return c, validate_involution(c, perm)


class TorusConjugationEntry(AtlasEntry):
    parameter = "m"

    @property
    def resolution(self) -> int:
        return int(self.settings.get("m", DEFAULT_RESOLUTION))

    @property
    def description(self) -> str:
        return f"3-torus with coordinate negation, Kuhn triangulation at m={self.resolution}"

    @property
    def expected(self) -> Expectation:
        return Expectation(k=8, maximal=True, code_name="extended_hamming8", doubly_even=True)

    def build(self) -> Tuple[SimplicialComplex, Involution]:
        return torus_conjugation(self.resolution)
