"""Binary linear codes in canonical (rref) generator form."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .audit import audit_event, get_logger
from .config import DEFAULT_SETTINGS, EngineSettings
from .errors import EnumerationLimitError, InputError
from .gf2 import Gf2Matrix, Gf2Vector, QuotientMap, nullspace_basis, row_basis

log = get_logger("codes")

MAX_CLASSIFICATION_LENGTH = 10


@dataclass(frozen=True)
class BinaryCode:
    length: int
    generator: Gf2Matrix

    def __post_init__(self) -> None:
        if self.generator.cols != self.length:
            raise InputError(f"generator has {self.generator.cols} columns, code length is {self.length}")
        if row_basis(self.generator) != self.generator:
            raise InputError("generator is not in canonical reduced row echelon form")

    @classmethod
    def from_generators(cls, generators: Union[Gf2Matrix, Sequence[str]], length: Optional[int] = None) -> "BinaryCode":
        if not isinstance(generators, Gf2Matrix):
            generators = Gf2Matrix.from_bitstrings(list(generators), cols=length)
        if length is not None and generators.cols != length:
            raise InputError(f"generators have length {generators.cols}, expected {length}")
        return cls(generators.cols, row_basis(generators))

    @classmethod
    def zero(cls, n: int) -> "BinaryCode":
        return cls(n, Gf2Matrix.zeros(0, n))

    @classmethod
    def full(cls, n: int) -> "BinaryCode":
        return cls(n, Gf2Matrix.identity(n))

    @property
    def dimension(self) -> int:
        return self.generator.rows

    def bitstrings(self) -> List[str]:
        return self.generator.bitstrings()

    def contains(self, word: Gf2Vector) -> bool:
        return QuotientMap(self.generator, Gf2Matrix.zeros(0, self.length)).contains(word)

    def contains_all_ones(self) -> bool:
        return self.contains(Gf2Vector(self.length, (1 << self.length) - 1))

    def permute(self, perm: Sequence[int]) -> "BinaryCode":
        """Coordinate i moves to position perm[i]."""
        if sorted(perm) != list(range(self.length)):
            raise InputError(f"not a permutation of {self.length} coordinates: {list(perm)}")
        rows = []
        for row in self.generator.data:
            out = 0
            for i in range(self.length):
                if (row >> i) & 1:
                    out |= 1 << perm[i]
            rows.append(out)
        return BinaryCode.from_generators(Gf2Matrix.from_ints(rows, self.length))

    def codewords(self, settings: Optional[EngineSettings] = None) -> np.ndarray:
        """All codewords as a (2^dim, length) uint8 array in Gray-free binary order."""
        _guard(self, settings)
        words = _word_table(self.generator.data, _n_words(self.length))
        bits = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.length]


def direct_sum(a: BinaryCode, b: BinaryCode) -> BinaryCode:
    shifted = [row << a.length for row in b.generator.data]
    rows = list(a.generator.data) + shifted
    return BinaryCode.from_generators(Gf2Matrix.from_ints(rows, a.length + b.length))


@dataclass(frozen=True)
class WeightEnumerator:
    coefficients: Tuple[int, ...]

    def __getitem__(self, w: int) -> int:
        return self.coefficients[w] if 0 <= w < len(self.coefficients) else 0

    @property
    def length(self) -> int:
        return len(self.coefficients) - 1

    def as_polynomial(self, var: str = "z") -> str:
        terms = []
        for w, a in enumerate(self.coefficients):
            if not a:
                continue
            if w == 0:
                terms.append(str(a))
            else:
                coeff = "" if a == 1 else str(a)
                power = var if w == 1 else f"{var}^{w}"
                terms.append(f"{coeff}{power}")
        return " + ".join(terms) or "0"


# ---------------------------------------------------------------------------
# Enumeration helpers
# ---------------------------------------------------------------------------

def _n_words(length: int) -> int:
    return max(1, (length + 63) // 64)


def _int_to_words(x: int, n_words: int) -> np.ndarray:
    return np.frombuffer(x.to_bytes(8 * n_words, "little"), dtype=np.uint64).copy()


def _word_table(rows: Sequence[int], n_words: int) -> np.ndarray:
    table = np.zeros((1, n_words), dtype=np.uint64)
    for row in rows:
        table = np.concatenate([table, table ^ _int_to_words(row, n_words)])
    return table


def _guard(code: BinaryCode, settings: Optional[EngineSettings]) -> None:
    limit = (settings or DEFAULT_SETTINGS).enumeration_limit
    if code.dimension > limit:
        raise EnumerationLimitError(code.dimension, limit)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def dual(c: BinaryCode) -> BinaryCode:
    return BinaryCode.from_generators(nullspace_basis(c.generator))


def _pairwise_even(rows: Sequence[int]) -> bool:
    for i, a in enumerate(rows):
        for b in rows[i:]:
            if (a & b).bit_count() & 1:
                return False
    return True


def is_self_dual(c: BinaryCode) -> bool:
    return 2 * c.dimension == c.length and _pairwise_even(c.generator.data)


def is_doubly_even(c: BinaryCode) -> bool:
    rows = c.generator.data
    return all(row.bit_count() % 4 == 0 for row in rows) and _pairwise_even(rows)


def weight_enumerator(c: BinaryCode, settings: Optional[EngineSettings] = None) -> WeightEnumerator:
    _guard(c, settings)
    n_words = _n_words(c.length)
    rows = c.generator.data
    half = len(rows) // 2
    low = _word_table(rows[:half], n_words)
    high = _word_table(rows[half:], n_words)
    counts = np.zeros(c.length + 1, dtype=np.int64)
    for h in high:
        weights = np.bitwise_count(low ^ h).sum(axis=1).astype(np.int64)
        counts += np.bincount(weights, minlength=c.length + 1)[: c.length + 1]
    return WeightEnumerator(tuple(int(a) for a in counts))


def macwilliams_transform(enumerator: WeightEnumerator, dim: int) -> WeightEnumerator:
    """Enumerator of the dual code via Krawtchouk polynomials, in exact integers."""
    n = enumerator.length
    out = []
    for j in range(n + 1):
        total = 0
        for i, a in enumerate(enumerator.coefficients):
            if a:
                total += a * sum((-1) ** s * comb(i, s) * comb(n - i, j - s) for s in range(j + 1))
        if total % (1 << dim):
            raise InputError("enumerator is not the weight enumerator of a linear code of that dimension")
        out.append(total >> dim)
    return WeightEnumerator(tuple(out))


def minimum_distance(c: BinaryCode, settings: Optional[EngineSettings] = None) -> Optional[int]:
    enum = weight_enumerator(c, settings)
    for w in range(1, c.length + 1):
        if enum[w]:
            return w
    return None


def _coordinate_invariants(words: np.ndarray) -> List[Tuple[int, ...]]:
    # Per coordinate: how many codewords of each weight have a 1 there.
    weights = words.sum(axis=1)
    n = words.shape[1]
    out = []
    for i in range(n):
        hit = weights[words[:, i] == 1]
        out.append(tuple(np.bincount(hit, minlength=n + 1).tolist()))
    return out


def are_equivalent(a: BinaryCode, b: BinaryCode, settings: Optional[EngineSettings] = None) -> Optional[Tuple[int, ...]]:
    """A permutation p with a.permute(p) == b, or None."""
    if a.length != b.length:
        raise InputError(f"length mismatch: {a.length} vs {b.length}")
    n = a.length
    if a.dimension != b.dimension:
        return None
    if a == b:
        return tuple(range(n))
    if weight_enumerator(a, settings) != weight_enumerator(b, settings):
        return None

    words_a = a.codewords(settings).astype(np.int64)
    words_b = b.codewords(settings).astype(np.int64)
    inv_a = _coordinate_invariants(words_a)
    inv_b = _coordinate_invariants(words_b)
    if sorted(inv_a) != sorted(inv_b):
        return None
    candidates = {i: [j for j in range(n) if inv_b[j] == inv_a[i]] for i in range(n)}
    order = sorted(range(n), key=lambda i: (len(candidates[i]), i))

    assignment: Dict[int, int] = {}
    used: set = set()

    def search(depth: int, labels_a: np.ndarray, labels_b: np.ndarray) -> Optional[Tuple[int, ...]]:
        if depth == n:
            perm = tuple(assignment[i] for i in range(n))
            return perm if a.permute(perm) == b else None
        i = order[depth]
        for j in candidates[i]:
            if j in used:
                continue
            # Projections onto the assigned coordinates must agree as multisets.
            joint = np.concatenate([labels_a * 2 + words_a[:, i], labels_b * 2 + words_b[:, j]])
            _, relabeled = np.unique(joint, return_inverse=True)
            next_a, next_b = relabeled[: len(labels_a)], relabeled[len(labels_a) :]
            if not np.array_equal(np.sort(next_a), np.sort(next_b)):
                continue
            assignment[i] = j
            used.add(j)
            found = search(depth + 1, next_a, next_b)
            if found is not None:
                return found
            del assignment[i]
            used.discard(j)
        return None

    zeros = np.zeros(len(words_a), dtype=np.int64)
    return search(0, zeros, zeros.copy())


# ---------------------------------------------------------------------------
# Named codes
# ---------------------------------------------------------------------------

EXTENDED_HAMMING8_ROWS = ("11110000", "00111100", "00001111", "01010101")
KNOWN_CODE_NAMES = ("repetition2", "i2^r", "extended_hamming8", "zero:N", "full:N")


def _parse_count(text: str, name: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise InputError(f"unknown code name {name!r}") from exc
    if value < 0:
        raise InputError(f"unknown code name {name!r}")
    return value


def known_code(name: str) -> BinaryCode:
    key = name.strip()
    if key == "repetition2":
        return BinaryCode.from_generators(["11"])
    if key == "extended_hamming8":
        return BinaryCode.from_generators(list(EXTENDED_HAMMING8_ROWS))
    if key.startswith("i2^"):
        r = _parse_count(key[3:], name)
        if r < 1:
            raise InputError(f"unknown code name {name!r}")
        rows = [0b11 << (2 * i) for i in range(r)]
        return BinaryCode.from_generators(Gf2Matrix.from_ints(rows, 2 * r))
    if key.startswith("zero:"):
        return BinaryCode.zero(_parse_count(key[5:], name))
    if key.startswith("full:"):
        return BinaryCode.full(_parse_count(key[5:], name))
    raise InputError(f"unknown code name {name!r}")


def parse_code(text: str) -> BinaryCode:
    """A known code name, or generator rows as comma-separated bitstrings."""
    text = text.strip()
    if not text:
        raise InputError("empty code description")
    if set(text) <= set("01,"):
        rows = [part.strip() for part in text.split(",")]
        if any(not row for row in rows):
            raise InputError(f"malformed bitstring list {text!r}")
        return BinaryCode.from_generators(rows)
    return known_code(text)


def match_known_code(c: BinaryCode, settings: Optional[EngineSettings] = None) -> Optional[Tuple[str, Tuple[int, ...]]]:
    """First named code equivalent to c, with the permutation taking the named code to c."""
    names: List[str] = []
    if c.length == 2:
        names.append("repetition2")
    if c.length == 8:
        names.append("extended_hamming8")
    if c.length >= 2 and c.length % 2 == 0:
        names.append(f"i2^{c.length // 2}")
    for name in names:
        perm = are_equivalent(known_code(name), c, settings)
        if perm is not None:
            return name, perm
    return None


# ---------------------------------------------------------------------------
# Classification oracle
# ---------------------------------------------------------------------------

def _extensions(code: BinaryCode) -> List[BinaryCode]:
    # Words of the dual outside the code keep the code self-orthogonal.
    perp = dual(code)
    inside = QuotientMap(code.generator, Gf2Matrix.zeros(0, code.length))
    out = []
    words = _word_table(perp.generator.data, _n_words(code.length))
    for word in words:
        x = int.from_bytes(word.tobytes(), "little")
        if inside.contains(Gf2Vector(code.length, x)):
            continue
        rows = list(code.generator.data) + [x]
        out.append(BinaryCode.from_generators(Gf2Matrix.from_ints(rows, code.length)))
    return out


def all_self_dual_codes(n: int) -> List[BinaryCode]:
    if n % 2:
        raise InputError("no self-dual codes in odd length")
    if n > MAX_CLASSIFICATION_LENGTH:
        raise InputError(f"classification is limited to length <= {MAX_CLASSIFICATION_LENGTH}, got {n}")
    if n == 0:
        return [BinaryCode.zero(0)]
    # Every self-dual code contains the all-ones word.
    level = {BinaryCode.from_generators(Gf2Matrix.from_ints([(1 << n) - 1], n))}
    for _ in range(n // 2 - 1):
        nxt: set = set()
        for code in sorted(level, key=lambda c: c.generator.data):
            nxt.update(_extensions(code))
        level = nxt
    return sorted(level, key=lambda c: c.generator.data)


def enumerate_self_dual_classes(n: int, settings: Optional[EngineSettings] = None) -> List[BinaryCode]:
    codes = all_self_dual_codes(n)
    reps: List[Tuple[WeightEnumerator, BinaryCode]] = []
    for code in codes:
        enum = weight_enumerator(code, settings)
        if any(e == enum and are_equivalent(rep, code, settings) is not None for e, rep in reps):
            continue
        reps.append((enum, code))
    audit_event(log, "classified", level=logging.DEBUG, length=n, codes=len(codes), classes=len(reps))
    return [rep for _, rep in reps]
