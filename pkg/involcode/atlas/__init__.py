# Explicit exports keep atlas discovery predictable.
from .base import AtlasEntry, Expectation
from .fileio import FORMAT_TAG, dump_triangulation, load_triangulation, parse_triangulation, serialize_triangulation
from .sphere import SphereSuspensionEntry, sphere_suspension
from .torus import TorusConjugationEntry, torus_conjugation

__all__ = [
    "AtlasEntry",
    "Expectation",
    "FORMAT_TAG",
    "SphereSuspensionEntry",
    "TorusConjugationEntry",
    "dump_triangulation",
    "load_triangulation",
    "parse_triangulation",
    "serialize_triangulation",
    "sphere_suspension",
    "torus_conjugation",
]
