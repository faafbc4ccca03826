"""Binary self-dual codes of involutions with isolated fixed points on triangulated 3-manifolds."""
from .codes import BinaryCode, WeightEnumerator, are_equivalent, dual, known_code, weight_enumerator
from .config import EngineSettings
from .equivariant import EquivariantManifold, Involution, check_maximal, extract_code, regularize, validate_involution
from .errors import ConsistencyError, InputError, InvolcodeError, PreconditionError
from .simplicial import SimplicialComplex, from_facets

__version__ = "0.1.0"

__all__ = [
    "BinaryCode",
    "ConsistencyError",
    "EngineSettings",
    "EquivariantManifold",
    "InputError",
    "Involution",
    "InvolcodeError",
    "PreconditionError",
    "SimplicialComplex",
    "WeightEnumerator",
    "are_equivalent",
    "check_maximal",
    "dual",
    "extract_code",
    "from_facets",
    "known_code",
    "regularize",
    "validate_involution",
    "weight_enumerator",
]
