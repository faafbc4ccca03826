from __future__ import annotations

from itertools import product
from typing import Tuple

from ..equivariant import Involution, validate_involution
from ..simplicial import SimplicialComplex, from_facets
from .base import AtlasEntry, Expectation


def sphere_suspension() -> Tuple[SimplicialComplex, Involution]:
    """Boundary of the 4-dimensional cross-polytope.

    Vertex 2i is +e_i and 2i+1 is -e_i. The involution negates the first
    three coordinates, so +e_4 and -e_4 (vertices 6 and 7) are fixed.
    """
    tets = [tuple(2 * i + sign for i, sign in enumerate(signs)) for signs in product((0, 1), repeat=4)]
    c = from_facets(8, tets)
    perm = [v ^ 1 if v < 6 else v for v in range(8)]
    return c, validate_involution(c, perm)


class SphereSuspensionEntry(AtlasEntry):
    @property
    def description(self) -> str:
        return "suspension of the antipodal map on the boundary of the 4-cross-polytope"

    @property
    def expected(self) -> Expectation:
        return Expectation(k=2, maximal=True, code_name="repetition2", doubly_even=False)

    def build(self) -> Tuple[SimplicialComplex, Involution]:
        return sphere_suspension()
