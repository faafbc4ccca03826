from __future__ import annotations

import logging
import random
from typing import List

import numpy as np
import pytest

from involcode.atlas import sphere_suspension, torus_conjugation
from involcode.audit import ROOT_CHANNEL
from involcode.equivariant import regularize
from involcode.simplicial import SimplicialComplex, from_facets

# Minimal 6-vertex projective plane.
RP2_TRIANGLES = [
    (0, 1, 3), (0, 1, 5), (0, 2, 4), (0, 2, 5), (0, 3, 4),
    (1, 2, 3), (1, 2, 4), (1, 4, 5), (2, 3, 5), (3, 4, 5),
]
# Octahedron: vertices 2i and 2i+1 are antipodal.
OCTAHEDRON_TRIANGLES = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
# Seven-vertex torus.
TORUS7_TRIANGLES = [tuple(sorted({i, (i + 1) % 7, (i + 3) % 7})) for i in range(7)] + [
    tuple(sorted({i, (i + 2) % 7, (i + 3) % 7})) for i in range(7)
]


def simplex_boundary(n: int) -> SimplicialComplex:
    """Boundary of the n-simplex on vertices 0..n."""
    return from_facets(n + 1, [tuple(v for v in range(n + 1) if v != i) for i in range(n + 1)])


def rp2() -> SimplicialComplex:
    return from_facets(6, RP2_TRIANGLES)


def octahedron() -> SimplicialComplex:
    return from_facets(6, OCTAHEDRON_TRIANGLES)


def rp2_prism() -> SimplicialComplex:
    """RP^2 x [0, 1]; vertex v sits at the bottom, v + 6 at the top."""
    tets = []
    for a, b, c in RP2_TRIANGLES:
        ta, tb, tc = a + 6, b + 6, c + 6
        tets += [(a, b, c, tc), (a, b, tb, tc), (a, ta, tb, tc)]
    return from_facets(12, tets)


def random_complex(seed: int) -> SimplicialComplex:
    rng = random.Random(seed)
    n = rng.randint(5, 9)
    facets = [rng.sample(range(n), rng.randint(1, 4)) for _ in range(rng.randint(3, 12))]
    return from_facets(n, facets)


# ---------------------------------------------------------------------------
# Naive oracle: dense numpy elimination, no shared code with the engine.
# ---------------------------------------------------------------------------

def naive_rank(arr: np.ndarray) -> int:
    m = (np.array(arr, dtype=np.uint8) % 2).copy()
    if m.ndim != 2 or m.size == 0:
        return 0
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        pivot = r + hits[0]
        m[[r, pivot]] = m[[pivot, r]]
        others = np.nonzero(m[:, c])[0]
        for i in others:
            if i != r:
                m[i] ^= m[r]
        r += 1
        if r == rows:
            break
    return r


def naive_boundary(c: SimplicialComplex, d: int) -> np.ndarray:
    lower = {s: i for i, s in enumerate(c.simplices[d - 1])}
    out = np.zeros((c.count(d - 1), c.count(d)), dtype=np.uint8)
    for j, s in enumerate(c.simplices[d]):
        for i in range(len(s)):
            out[lower[s[:i] + s[i + 1 :]], j] = 1
    return out


def naive_betti(c: SimplicialComplex) -> List[int]:
    ranks = [0] * (c.dim + 2)
    for d in range(1, c.dim + 1):
        ranks[d] = naive_rank(naive_boundary(c, d))
    return [c.count(d) - ranks[d] - ranks[d + 1] for d in range(c.dim + 1)]


# ---------------------------------------------------------------------------
# Shared fixtures; regularized manifolds are computed once per session.
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def sphere():
    return sphere_suspension()


@pytest.fixture(scope="session")
def sphere_em(sphere):
    return regularize(*sphere)


@pytest.fixture(scope="session")
def torus():
    return torus_conjugation(4)


@pytest.fixture(scope="session")
def torus_em(torus):
    return regularize(*torus)


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger(ROOT_CHANNEL)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()
    root.propagate = True
