from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..equivariant import Involution
from ..simplicial import SimplicialComplex


@dataclass(frozen=True)
class Expectation:
    """What extraction should report for an atlas entry."""

    k: int
    maximal: Optional[bool] = None
    code_name: Optional[str] = None
    doubly_even: Optional[bool] = None


class AtlasEntry(ABC):
    """Built-in equivariant manifold with a known code."""

    # Name of the single integer setting accepted as "name:value", if any.
    parameter: Optional[str] = None

    def __init__(self, name: str, settings: Optional[Dict] = None) -> None:
        self.name = name
        self.settings = settings or {}

    @property
    @abstractmethod
    def description(self) -> str:
        raise NotImplementedError

    @property
    @abstractmethod
    def expected(self) -> Expectation:
        raise NotImplementedError

    @abstractmethod
    def build(self) -> Tuple[SimplicialComplex, Involution]:
        raise NotImplementedError
