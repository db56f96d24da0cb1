"""GF(2) polynomials, bit vectors, linear codes, and fixed-weight codeword counting.

Vectors and polynomial coefficient strings are stored as Python ints used as
bitsets: bit i is coefficient/coordinate i.  Codes keep their generator rows in
reduced row echelon form so that equality of codes is plain tuple equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "Poly2",
    "BitVector",
    "BinaryCode",
    "poly_quotient",
    "cyclic_code",
    "dual_code",
    "count_weight",
    "min_weight",
    "enumerate_weight",
    "EnumerationTooLarge",
    "NotADivisor",
]

# count_weight strategy limits: (a) full codeword enumeration, (b) support
# enumeration via meet-in-the-middle syndrome join.
_MAX_ENUM_DIM = 28
_MAX_SUPPORT_WEIGHT = 8


class NotADivisor(ValueError):
    """Raised when an exact polynomial division leaves a remainder."""


class EnumerationTooLarge(ValueError):
    """Raised when neither counting strategy can handle the parameters."""


# ----------------------------------------------------------------------------
# polynomials over GF(2)


@dataclass(frozen=True)
class Poly2:
    """Polynomial over GF(2); bit i of ``coeffs`` is the coefficient of x^i."""

    coeffs: int

    def __post_init__(self) -> None:
        if self.coeffs < 0:
            raise ValueError("negative coefficient mask")

    @property
    def degree(self) -> int:
        return self.coeffs.bit_length() - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return self.coeffs == 0

    def __mul__(self, other: "Poly2") -> "Poly2":
        a, b, out = self.coeffs, other.coeffs, 0
        while b:
            low = b & -b
            out ^= a << (low.bit_length() - 1)
            b ^= low
        return Poly2(out)

    def __add__(self, other: "Poly2") -> "Poly2":
        return Poly2(self.coeffs ^ other.coeffs)

    def __str__(self) -> str:
        if self.coeffs == 0:
            return "0"
        terms = []
        for e in range(self.degree, -1, -1):
            if (self.coeffs >> e) & 1:
                terms.append("1" if e == 0 else ("x" if e == 1 else f"x^{e}"))
        return "+".join(terms)

    @staticmethod
    def from_exponents(exponents: Sequence[int]) -> "Poly2":
        mask = 0
        for e in exponents:
            mask ^= 1 << e
        return Poly2(mask)

    @staticmethod
    def parse(text: str) -> "Poly2":
        """Parse exponent-list form, e.g. ``x^5+x^2+1`` or ``(x^31+1)/(x^5+x^2+1)``."""
        text = text.replace(" ", "")
        if "/" in text:
            num_s, den_s = text.split("/")
            return poly_quotient(Poly2.parse(num_s.strip("()")), Poly2.parse(den_s.strip("()")))
        mask = 0
        for term in text.strip("()").split("+"):
            if term == "1":
                mask ^= 1
            elif term == "x":
                mask ^= 2
            else:
                m = re.fullmatch(r"x\^(\d+)", term)
                if m is None:
                    raise ValueError(f"bad polynomial term: {term!r}")
                mask ^= 1 << int(m.group(1))
        return Poly2(mask)


def _poly_divmod(dividend: int, divisor: int) -> Tuple[int, int]:
    if divisor == 0:
        raise ZeroDivisionError("polynomial division by zero")
    q = 0
    dd = divisor.bit_length()
    r = dividend
    while r.bit_length() >= dd:
        shift = r.bit_length() - dd
        q ^= 1 << shift
        r ^= divisor << shift
    return q, r


def poly_quotient(dividend: Poly2, divisor: Poly2) -> Poly2:
    """Exact quotient over GF(2); rejects inexact division."""
    q, r = _poly_divmod(dividend.coeffs, divisor.coeffs)
    if r:
        raise NotADivisor(f"{divisor} does not divide {dividend}")
    return Poly2(q)


# ----------------------------------------------------------------------------
# bit vectors


@dataclass(frozen=True)
class BitVector:
    """Fixed-length bit vector; ``weight`` is the cached popcount."""

    length: int
    bits: int
    weight: int = field(init=False)

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits out of range for length")
        object.__setattr__(self, "weight", self.bits.bit_count())

    def __xor__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    def dot(self, other: "BitVector") -> int:
        return (self.bits & other.bits).bit_count() & 1

    def support(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.length) if (self.bits >> i) & 1)

    @staticmethod
    def from_support(length: int, support: Sequence[int]) -> "BitVector":
        mask = 0
        for i in support:
            mask |= 1 << i
        return BitVector(length, mask)


# ----------------------------------------------------------------------------
# linear codes


def _rref(rows: Sequence[int]) -> Tuple[int, ...]:
    """Reduced row echelon form with pivot columns ascending; drops zero rows."""
    work: List[int] = []
    for row in rows:
        for basis in work:
            low = basis & -basis
            if row & low:
                row ^= basis
        if row:
            work.append(row)
            # full reduction: clear this pivot from earlier rows
            low = row & -row
            for i, other in enumerate(work[:-1]):
                if other & low:
                    work[i] = other ^ row
    work.sort(key=lambda r: r & -r)
    return tuple(work)


@dataclass(frozen=True)
class BinaryCode:
    """Linear code over GF(2): canonical RREF generator rows (bit i = column i)."""

    length: int
    rows: Tuple[int, ...]

    @staticmethod
    def from_rows(length: int, rows: Sequence[int]) -> "BinaryCode":
        for row in rows:
            if row < 0 or row >> length:
                raise ValueError("row out of range for code length")
        return BinaryCode(length, _rref(rows))

    @property
    def dimension(self) -> int:
        return len(self.rows)

    def contains(self, vec: int) -> bool:
        for basis in self.rows:
            low = basis & -basis
            if vec & low:
                vec ^= basis
        return vec == 0

    def codewords(self) -> Iterator[int]:
        """All 2^dimension codewords (small codes only)."""
        if self.dimension > _MAX_ENUM_DIM:
            raise EnumerationTooLarge(f"dimension {self.dimension} > {_MAX_ENUM_DIM}")
        words = [0]
        for row in self.rows:
            words += [w ^ row for w in words]
        return iter(words)

    def serialize(self) -> str:
        return "\n".join(
            "".join("1" if (row >> i) & 1 else "0" for i in range(self.length))
            for row in self.rows
        )

    @staticmethod
    def deserialize(text: str, length: Optional[int] = None) -> "BinaryCode":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if length is None:
            length = len(lines[0])
        rows = [int(ln[::-1], 2) for ln in lines]
        return BinaryCode.from_rows(length, rows)


def cyclic_code(generator: Poly2, length: int) -> BinaryCode:
    """Code spanned by all cyclic shifts of the generator's coefficient vector."""
    modulus = Poly2((1 << length) | 1)  # x^length + 1
    _, rem = _poly_divmod(modulus.coeffs, generator.coeffs)
    if rem:
        raise NotADivisor(f"generator does not divide x^{length}+1")
    mask_all = (1 << length) - 1
    rows = []
    g = generator.coeffs
    for shift in range(length):
        rotated = ((g << shift) | (g >> (length - shift))) & mask_all if shift else g
        rows.append(rotated)
    code = BinaryCode.from_rows(length, rows)
    assert code.dimension == length - generator.degree
    return code


def dual_code(code: BinaryCode) -> BinaryCode:
    """Kernel of the generator matrix: every row orthogonal to every row of ``code``."""
    n = code.length
    pivots = [(row & -row).bit_length() - 1 for row in code.rows]
    pivot_set = set(pivots)
    rows = []
    for col in range(n):
        if col in pivot_set:
            continue
        vec = 1 << col
        for row, piv in zip(code.rows, pivots):
            if (row >> col) & 1:
                vec |= 1 << piv
        rows.append(vec)
    return BinaryCode.from_rows(n, rows)


# ----------------------------------------------------------------------------
# fixed-weight counting


def _popcounts(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr)


@lru_cache(maxsize=64)
def _weight_histogram(code: BinaryCode) -> Tuple[int, ...]:
    """Weight distribution by full codeword enumeration (strategy (a))."""
    if code.dimension > _MAX_ENUM_DIM:
        raise EnumerationTooLarge(f"dimension {code.dimension} > {_MAX_ENUM_DIM}")
    hist = np.zeros(code.length + 1, dtype=np.int64)
    base_dim = min(code.dimension, 22)
    base = np.zeros(1, dtype=np.uint64)
    for row in code.rows[:base_dim]:
        base = np.concatenate([base, base ^ np.uint64(row)])
    high_rows = code.rows[base_dim:]
    for idx in range(1 << len(high_rows)):
        offset = 0
        for j, row in enumerate(high_rows):
            if (idx >> j) & 1:
                offset ^= row
        hist += np.bincount(_popcounts(base ^ np.uint64(offset)), minlength=code.length + 1)
    return tuple(int(x) for x in hist)


def _check_columns(code: BinaryCode) -> Tuple[np.ndarray, int]:
    """Per-position syndrome columns w.r.t. the dual's generators as checks."""
    checks = dual_code(code).rows
    if len(checks) > 63:
        raise EnumerationTooLarge(f"{len(checks)} check rows exceed one machine word")
    cols = np.zeros(code.length, dtype=np.uint64)
    for i, chk in enumerate(checks):
        for j in range(code.length):
            if (chk >> j) & 1:
                cols[j] |= np.uint64(1 << i)
    return cols, len(checks)


def _side_layers(cols: np.ndarray, positions: Sequence[int], max_t: int,
                 with_masks: bool) -> List[Tuple[np.ndarray, Optional[np.ndarray]]]:
    """Syndromes (and optionally support masks) of all subsets of ``positions`` by size."""
    layers: List[Tuple[np.ndarray, Optional[np.ndarray]]] = [
        (np.zeros(1, dtype=np.uint64), np.zeros(1, dtype=np.uint64) if with_masks else None)
    ]
    for t in range(1, max_t + 1):
        layers.append((np.zeros(0, dtype=np.uint64), np.zeros(0, dtype=np.uint64) if with_masks else None))
    for j in positions:
        col = cols[j]
        bit = np.uint64(1 << j)
        for t in range(min(max_t, len(layers) - 1), 0, -1):
            syn_prev, mask_prev = layers[t - 1]
            syn_t, mask_t = layers[t]
            new_syn = np.concatenate([syn_t, syn_prev ^ col])
            new_mask = np.concatenate([mask_t, mask_prev | bit]) if with_masks else None
            layers[t] = (new_syn, new_mask)
    return layers


def _mitm_layers(code: BinaryCode, w: int, with_masks: bool):
    cols, _ = _check_columns(code)
    n = code.length
    split = n // 2
    left = _side_layers(cols, range(split), w, with_masks)
    right = _side_layers(cols, range(split, n), w, with_masks)
    return left, right


def _count_by_support_mitm(code: BinaryCode, w: int, part: Optional[Tuple[int, int]] = None) -> int:
    """Strategy (b): enumerate weight-w supports, pruned by meeting left/right syndromes."""
    if w > _MAX_SUPPORT_WEIGHT:
        raise EnumerationTooLarge(f"weight {w} > {_MAX_SUPPORT_WEIGHT} for support enumeration")
    left, right = _mitm_layers(code, w, with_masks=False)
    total = 0
    for t in range(w + 1):
        syn_l = left[t][0]
        syn_r = right[w - t][0]
        if syn_l.size == 0 or syn_r.size == 0:
            continue
        if part is not None:
            shard, nparts = part
            syn_l = syn_l[shard::nparts]
            if syn_l.size == 0:
                continue
        syn_r = np.sort(syn_r)
        lo = np.searchsorted(syn_r, syn_l, side="left")
        hi = np.searchsorted(syn_r, syn_l, side="right")
        total += int((hi - lo).sum())
    return total


def count_weight(code: BinaryCode, w: int, part: Optional[Tuple[int, int]] = None,
                 strategy: Optional[str] = None) -> int:
    """Number of codewords of Hamming weight exactly w.

    ``strategy`` forces 'codewords' (full 2^dim enumeration, dim <= 28) or
    'supports' (weight-limited support enumeration, w <= 8); default picks
    whichever applies.  ``part=(i, nparts)`` restricts to a disjoint shard of
    the enumeration so callers can spread the work and sum the results.
    """
    if w < 0 or w > code.length:
        raise ValueError("weight out of range")
    if strategy is None:
        strategy = "codewords" if code.dimension <= _MAX_ENUM_DIM else "supports"
        if strategy == "supports" and w > _MAX_SUPPORT_WEIGHT:
            raise EnumerationTooLarge(
                f"dim {code.dimension} > {_MAX_ENUM_DIM} and weight {w} > {_MAX_SUPPORT_WEIGHT}")
    if strategy == "codewords":
        if part is None:
            return _weight_histogram(code)[w]
        return _count_codewords_sharded(code, w, part)
    if strategy == "supports":
        return _count_by_support_mitm(code, w, part)
    raise ValueError(f"unknown strategy {strategy!r}")


def _count_codewords_sharded(code: BinaryCode, w: int, part: Tuple[int, int]) -> int:
    shard, nparts = part
    size = 1 << code.dimension
    lo = size * shard // nparts
    hi = size * (shard + 1) // nparts
    count = 0
    for idx in range(lo, hi):
        word = 0
        rem = idx
        j = 0
        while rem:
            if rem & 1:
                word ^= code.rows[j]
            rem >>= 1
            j += 1
        if word.bit_count() == w:
            count += 1
    return count


def enumerate_weight(code: BinaryCode, w: int) -> List[int]:
    """All weight-w codewords as bit masks (meet-in-the-middle join)."""
    if w == 0:
        return [0]
    if w > _MAX_SUPPORT_WEIGHT or len(dual_code(code).rows) > 63:
        if code.dimension <= _MAX_ENUM_DIM:
            return [c for c in code.codewords() if c.bit_count() == w]
        raise EnumerationTooLarge(f"weight {w} > {_MAX_SUPPORT_WEIGHT}")
    left, right = _mitm_layers(code, w, with_masks=True)
    out: List[int] = []
    for t in range(w + 1):
        syn_l, mask_l = left[t]
        syn_r, mask_r = right[w - t]
        if syn_l.size == 0 or syn_r.size == 0:
            continue
        order = np.argsort(syn_r, kind="stable")
        syn_r_sorted = syn_r[order]
        mask_r_sorted = mask_r[order]
        lo = np.searchsorted(syn_r_sorted, syn_l, side="left")
        hi = np.searchsorted(syn_r_sorted, syn_l, side="right")
        for i in np.nonzero(hi > lo)[0]:
            ml = int(mask_l[i])
            for j in range(lo[i], hi[i]):
                out.append(ml | int(mask_r_sorted[j]))
    return sorted(out)


@lru_cache(maxsize=64)
def count_weight_up_to(code: BinaryCode, wmax: int) -> Tuple[int, ...]:
    """Counts for all weights 0..wmax from a single support-enumeration pass."""
    if wmax > _MAX_SUPPORT_WEIGHT:
        raise EnumerationTooLarge(f"weight {wmax} > {_MAX_SUPPORT_WEIGHT}")
    left, right = _mitm_layers(code, wmax, with_masks=False)
    right_sorted = [np.sort(syn) for syn, _ in right]
    counts = []
    for w in range(wmax + 1):
        total = 0
        for t in range(w + 1):
            syn_l = left[t][0]
            syn_r = right_sorted[w - t]
            if syn_l.size == 0 or syn_r.size == 0:
                continue
            lo = np.searchsorted(syn_r, syn_l, side="left")
            hi = np.searchsorted(syn_r, syn_l, side="right")
            total += int((hi - lo).sum())
        counts.append(total)
    return tuple(counts)


def min_weight(code: BinaryCode, cap: int) -> Optional[int]:
    """Smallest weight in [1, cap] with a codeword, or None if all exceed cap."""
    if cap > 10:
        raise ValueError("cap must be <= 10")
    if code.dimension == 0:
        return None
    for w in range(1, cap + 1):
        if count_weight(code, w) > 0:
            return w
    return None
