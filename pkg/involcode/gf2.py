"""Exact linear algebra over GF(2).

Rows are stored as Python ints used as bitsets (bit j = column j), so row
operations are word-level XORs. Large sparse matrices are reduced on a
column-indexed set representation with Markowitz-style pivot-row choice;
both paths finish with the same back-substitution and therefore return the
same canonical reduced row echelon form.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .audit import audit_event, get_logger
from .config import DEFAULT_SETTINGS, EngineSettings
from .errors import InputError

log = get_logger("gf2")


def iter_bits(x: int) -> Iterator[int]:
    """Yield the set bit positions of x in ascending order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def bits_to_int(indices: Iterable[int]) -> int:
    x = 0
    for j in indices:
        x |= 1 << j
    return x


def _int_from_bitarray(row: np.ndarray) -> int:
    packed = np.packbits(np.asarray(row, dtype=np.uint8) & 1, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _int_to_bitarray(x: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(x.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


@dataclass(frozen=True)
class Gf2Vector:
    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise InputError(f"vector length must be >= 0, got {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise InputError(f"vector entries exceed declared length {self.length}")

    @classmethod
    def zeros(cls, length: int) -> "Gf2Vector":
        return cls(length, 0)

    @classmethod
    def from_list(cls, entries: Sequence[int]) -> "Gf2Vector":
        bits = 0
        for j, value in enumerate(entries):
            if value not in (0, 1):
                raise InputError(f"entry {j} is {value!r}; expected 0 or 1")
            if value:
                bits |= 1 << j
        return cls(len(entries), bits)

    @classmethod
    def from_bitstring(cls, text: str) -> "Gf2Vector":
        if any(ch not in "01" for ch in text):
            raise InputError(f"malformed bitstring {text!r}")
        return cls.from_list([int(ch) for ch in text])

    def to_list(self) -> List[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def to_array(self) -> np.ndarray:
        return _int_to_bitarray(self.bits, self.length)

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.to_list())

    def weight(self) -> int:
        return self.bits.bit_count()

    def dot(self, other: "Gf2Vector") -> int:
        if other.length != self.length:
            raise InputError(f"length mismatch: {self.length} vs {other.length}")
        return (self.bits & other.bits).bit_count() & 1

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __xor__(self, other: "Gf2Vector") -> "Gf2Vector":
        if other.length != self.length:
            raise InputError(f"length mismatch: {self.length} vs {other.length}")
        return Gf2Vector(self.length, self.bits ^ other.bits)

    def __len__(self) -> int:
        return self.length


@dataclass(frozen=True)
class Gf2Matrix:
    rows: int
    cols: int
    data: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise InputError(f"bad matrix shape {self.rows}x{self.cols}")
        if len(self.data) != self.rows:
            raise InputError(f"matrix declares {self.rows} rows but carries {len(self.data)}")
        for i, row in enumerate(self.data):
            if row < 0 or row >> self.cols:
                raise InputError(f"row {i} has entries beyond column {self.cols}")

    # -- construction ---------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_ints(cls, data: Iterable[int], cols: int) -> "Gf2Matrix":
        rows = tuple(data)
        return cls(len(rows), cols, rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "Gf2Matrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        data = []
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise InputError(f"row {i} has length {len(row)}, expected {cols}")
            data.append(Gf2Vector.from_list(list(row)).bits)
        return cls(len(data), cols, tuple(data))

    @classmethod
    def from_bitstrings(cls, strings: Sequence[str], cols: Optional[int] = None) -> "Gf2Matrix":
        vectors = [Gf2Vector.from_bitstring(s) for s in strings]
        if cols is None:
            cols = vectors[0].length if vectors else 0
        for s, v in zip(strings, vectors):
            if v.length != cols:
                raise InputError(f"bitstring {s!r} has length {v.length}, expected {cols}")
        return cls(len(vectors), cols, tuple(v.bits for v in vectors))

    @classmethod
    def from_vectors(cls, vectors: Sequence[Gf2Vector], cols: int) -> "Gf2Matrix":
        for v in vectors:
            if v.length != cols:
                raise InputError(f"vector length {v.length} does not match {cols} columns")
        return cls(len(vectors), cols, tuple(v.bits for v in vectors))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Gf2Matrix":
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise InputError(f"expected a 2-d array, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise InputError("array entries must be 0 or 1")
        rows, cols = arr.shape
        return cls(rows, cols, tuple(_int_from_bitarray(arr[i]) for i in range(rows)))

    # -- views ----------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for i, row in enumerate(self.data):
            if row:
                out[i] = _int_to_bitarray(row, self.cols)
        return out

    def to_lists(self) -> List[List[int]]:
        return [[(row >> j) & 1 for j in range(self.cols)] for row in self.data]

    def bitstrings(self) -> List[str]:
        return ["".join(str((row >> j) & 1) for j in range(self.cols)) for row in self.data]

    def row_vector(self, i: int) -> Gf2Vector:
        return Gf2Vector(self.cols, self.data[i])

    def nnz(self) -> int:
        return sum(row.bit_count() for row in self.data)

    def is_zero(self) -> bool:
        return not any(self.data)

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(index)
        return (self.data[i] >> j) & 1

    # -- arithmetic -----------------------------------------------------

    def transpose(self) -> "Gf2Matrix":
        cols: List[List[int]] = [[] for _ in range(self.cols)]
        for i, row in enumerate(self.data):
            for j in iter_bits(row):
                cols[j].append(i)
        return Gf2Matrix(self.cols, self.rows, tuple(bits_to_int(c) for c in cols))

    def mul_vector(self, v: Gf2Vector) -> Gf2Vector:
        if v.length != self.cols:
            raise InputError(f"vector length {v.length} does not match {self.cols} columns")
        out = 0
        for i, row in enumerate(self.data):
            if (row & v.bits).bit_count() & 1:
                out |= 1 << i
        return Gf2Vector(self.rows, out)

    def matmul(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if self.cols != other.rows:
            raise InputError(f"cannot multiply {self.shape} by {other.shape}")
        data = []
        for row in self.data:
            acc = 0
            for j in iter_bits(row):
                acc ^= other.data[j]
            data.append(acc)
        return Gf2Matrix(self.rows, other.cols, tuple(data))

    __matmul__ = matmul

    def stack(self, other: "Gf2Matrix") -> "Gf2Matrix":
        if other.cols != self.cols:
            raise InputError(f"cannot stack {self.shape} on {other.shape}")
        return Gf2Matrix(self.rows + other.rows, self.cols, self.data + other.data)


# ---------------------------------------------------------------------------
# Reduction engines
# ---------------------------------------------------------------------------

def _back_substitute(pivots: Dict[int, int]) -> Tuple[List[int], List[int]]:
    # Each pivot row has its lowest set bit at its pivot column.
    order = sorted(pivots)
    reduced: Dict[int, int] = {}
    mask = 0
    for c in reversed(order):
        row = pivots[c]
        hits = row & mask
        while hits:
            low = hits & -hits
            row ^= reduced[low.bit_length() - 1]
            hits ^= low
        reduced[c] = row
        mask |= 1 << c
    return [reduced[c] for c in order], order


def _reduce_dense(data: Tuple[int, ...]) -> Tuple[List[int], List[int]]:
    pivots: Dict[int, int] = {}
    for row in data:
        while row:
            c = (row & -row).bit_length() - 1
            pivot = pivots.get(c)
            if pivot is None:
                pivots[c] = row
                break
            row ^= pivot
    return _back_substitute(pivots)


def _reduce_sparse(data: Tuple[int, ...]) -> Tuple[List[int], List[int]]:
    rows = [set(iter_bits(x)) for x in data]
    col_rows: Dict[int, set] = defaultdict(set)
    for i, row in enumerate(rows):
        for c in row:
            col_rows[c].add(i)

    pivots: Dict[int, int] = {}
    for c in sorted(col_rows):
        candidates = col_rows[c]
        if not candidates:
            continue
        # Markowitz: the shortest row fills in least; ties go to the lower index.
        p = min(candidates, key=lambda i: (len(rows[i]), i))
        prow = rows[p]
        for cc in prow:
            col_rows[cc].discard(p)
        for i in list(candidates):
            row = rows[i]
            for cc in prow:
                if cc in row:
                    row.discard(cc)
                    col_rows[cc].discard(i)
                else:
                    row.add(cc)
                    col_rows[cc].add(i)
        pivots[c] = bits_to_int(prow)
    return _back_substitute(pivots)


def choose_path(m: Gf2Matrix, settings: Optional[EngineSettings] = None) -> str:
    settings = settings or DEFAULT_SETTINGS
    size = m.rows * m.cols
    if size == 0 or size < settings.sparse_min_entries:
        return "dense"
    return "sparse" if m.nnz() / size <= settings.sparse_threshold else "dense"


def _reduce(m: Gf2Matrix, settings: Optional[EngineSettings] = None, path: Optional[str] = None) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    path = path or choose_path(m, settings)
    if m.rows * m.cols >= (settings or DEFAULT_SETTINGS).sparse_min_entries:
        audit_event(log, "reduce", level=logging.DEBUG, path=path, rows=m.rows, cols=m.cols)
    if path == "sparse":
        rows, pivots = _reduce_sparse(m.data)
    else:
        rows, pivots = _reduce_dense(m.data)
    return tuple(rows), tuple(pivots)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def rref(m: Gf2Matrix, settings: Optional[EngineSettings] = None, path: Optional[str] = None) -> Tuple[Gf2Matrix, List[int]]:
    rows, pivots = _reduce(m, settings, path)
    data = rows + (0,) * (m.rows - len(rows))
    return Gf2Matrix(m.rows, m.cols, data), list(pivots)


def row_basis(m: Gf2Matrix, settings: Optional[EngineSettings] = None) -> Gf2Matrix:
    """Nonzero rows of rref(m): the canonical basis of the row space."""
    rows, _ = _reduce(m, settings)
    return Gf2Matrix(len(rows), m.cols, rows)


def rank(m: Gf2Matrix, settings: Optional[EngineSettings] = None) -> int:
    return len(_reduce(m, settings)[1])


def nullspace_basis(m: Gf2Matrix, settings: Optional[EngineSettings] = None) -> Gf2Matrix:
    rows, pivots = _reduce(m, settings)
    pivot_set = set(pivots)
    free = [c for c in range(m.cols) if c not in pivot_set]
    slot = {c: i for i, c in enumerate(free)}
    basis = [1 << c for c in free]
    for row, p in zip(rows, pivots):
        for f in iter_bits(row ^ (1 << p)):
            basis[slot[f]] |= 1 << p
    return Gf2Matrix(len(basis), m.cols, tuple(basis))


def solve(m: Gf2Matrix, b: Gf2Vector, settings: Optional[EngineSettings] = None) -> Optional[Gf2Vector]:
    if b.length != m.rows:
        raise InputError(f"right-hand side has length {b.length}, matrix has {m.rows} rows")
    n = m.cols
    augmented = Gf2Matrix(m.rows, n + 1, tuple(row | (((b.bits >> i) & 1) << n) for i, row in enumerate(m.data)))
    rows, pivots = _reduce(augmented, settings)
    if pivots and pivots[-1] == n:
        return None
    x = 0
    for row, p in zip(rows, pivots):
        if (row >> n) & 1:
            x |= 1 << p
    return Gf2Vector(n, x)


def row_space_contains(m: Gf2Matrix, v: Gf2Vector, settings: Optional[EngineSettings] = None) -> bool:
    return QuotientMap(m, Gf2Matrix.zeros(0, m.cols), settings).contains(v)


class QuotientMap:
    """Coordinates on span(space) / span(subspace).

    The complement basis is the rref of the space rows after reduction
    modulo the subspace rref, so it is canonical and its pivots avoid the
    subspace pivots.
    """

    def __init__(self, space_basis: Gf2Matrix, subspace_basis: Gf2Matrix, settings: Optional[EngineSettings] = None) -> None:
        if space_basis.cols != subspace_basis.cols:
            raise InputError(f"space has {space_basis.cols} columns, subspace has {subspace_basis.cols}")
        self.cols = space_basis.cols
        sub_rows, sub_pivots = _reduce(subspace_basis, settings)
        self._sub = dict(zip(sub_pivots, sub_rows))
        self._sub_mask = bits_to_int(sub_pivots)
        self.subspace = Gf2Matrix(len(sub_rows), self.cols, sub_rows)

        reduced = Gf2Matrix(space_basis.rows, self.cols, tuple(self._mod_subspace(r) for r in space_basis.data))
        comp_rows, comp_pivots = _reduce(reduced, settings)
        self._comp_rows = comp_rows
        self._comp_pivots = comp_pivots
        self.complement = Gf2Matrix(len(comp_rows), self.cols, comp_rows)

    @property
    def dimension(self) -> int:
        return len(self._comp_rows)

    def _mod_subspace(self, x: int) -> int:
        hits = x & self._sub_mask
        while hits:
            low = hits & -hits
            x ^= self._sub[low.bit_length() - 1]
            hits ^= low
        return x

    def _split(self, bits: int) -> Tuple[int, int]:
        residue = self._mod_subspace(bits)
        coords = 0
        acc = 0
        for i, (row, p) in enumerate(zip(self._comp_rows, self._comp_pivots)):
            if (residue >> p) & 1:
                coords |= 1 << i
                acc ^= row
        return coords, acc ^ residue

    def contains(self, v: Gf2Vector) -> bool:
        return self._split(v.bits)[1] == 0

    def coordinates(self, v: Gf2Vector) -> Gf2Vector:
        if v.length != self.cols:
            raise InputError(f"vector length {v.length} does not match ambient dimension {self.cols}")
        coords, leftover = self._split(v.bits)
        if leftover:
            raise InputError("vector outside ambient space")
        return Gf2Vector(self.dimension, coords)


def quotient_coordinates(space_basis: Gf2Matrix, subspace_basis: Gf2Matrix, v: Gf2Vector, settings: Optional[EngineSettings] = None) -> Gf2Vector:
    return QuotientMap(space_basis, subspace_basis, settings).coordinates(v)
