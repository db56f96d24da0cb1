"""Weakly self-dual CSS inner codes, Y-logical counting, and magic bases.

An inner code is specified by a classical cyclic code C with C contained in
its dual; stabilizers are X(c), Z(c) for c in C.  All Y-type bookkeeping
happens in C-perp: nontrivial logical operators are elements of C-perp \\ C,
and a magic basis is an orthonormal basis of C-perp / C under the standard
inner product.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .gf2 import (
    BinaryCode,
    BitVector,
    Poly2,
    count_weight,
    count_weight_up_to,
    cyclic_code,
    dual_code,
    enumerate_weight,
)

__all__ = [
    "InnerCode",
    "MagicBasis",
    "build_inner_code",
    "c_log",
    "find_magic_basis",
    "logical_action",
    "min_logical_support",
    "load_catalog",
    "NotWeaklySelfDual",
    "BasisSearchExhausted",
]

_CLOG_BUDGET = 8


class NotWeaklySelfDual(ValueError):
    """The classical code is not contained in its dual."""


class BasisSearchExhausted(RuntimeError):
    """No magic basis satisfying the requested conditions within the attempt budget."""

    def __init__(self, message: str, best: Optional["MagicBasis"] = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class InnerCode:
    """Quantum code record: parameters plus the classical pair (C, C-perp)."""

    name: str
    n: int
    k: int
    d: int
    stabilizer: BinaryCode  # C, the self-orthogonal subspace
    dual: BinaryCode        # C-perp
    c_log_table: Tuple[Tuple[int, int], ...]  # ((d, count), (d+1, count))

    def c_log_of(self, w: int) -> int:
        return c_log(self, w)


@dataclass(frozen=True)
class MagicBasis:
    """k logical representatives with pairwise inner products delta_ab."""

    vectors: Tuple[int, ...]
    min_coset_weight_ok: bool
    seed: Optional[int] = None


def _is_self_orthogonal(code: BinaryCode) -> bool:
    rows = code.rows
    for i, a in enumerate(rows):
        for b in rows[i:]:
            if (a & b).bit_count() & 1:
                return False
    return True


def c_log(code: InnerCode, w: int) -> int:
    """Number of weight-w nontrivial Y-logical operators (C-perp minus C words)."""
    if w > _CLOG_BUDGET:
        raise ValueError(f"c_log weight {w} exceeds the enumeration budget {_CLOG_BUDGET}")
    table = dict(code.c_log_table)
    if w in table:
        return table[w]
    return (count_weight_up_to(code.dual, min(w, _CLOG_BUDGET))[w]
            - count_weight(code.stabilizer, w))


def build_inner_code(generator: Poly2, length: int, name: str = "") -> InnerCode:
    """Build an inner code from the cyclic stabilizer generator polynomial."""
    if length % 2 == 0:
        warnings.warn(f"length {length} is even: code is not normal", stacklevel=2)
    stab = cyclic_code(generator, length)
    if not _is_self_orthogonal(stab):
        raise NotWeaklySelfDual(f"cyclic code from {generator} is not weakly self-dual")
    dual = dual_code(stab)
    k = length - 2 * stab.dimension
    dual_counts = count_weight_up_to(dual, _CLOG_BUDGET)
    d = None
    for w in range(1, _CLOG_BUDGET + 1):
        if dual_counts[w] - count_weight(stab, w) > 0:
            d = w
            break
    if d is None:
        raise ValueError(f"distance exceeds the enumeration budget {_CLOG_BUDGET}")
    table = tuple(
        (w, dual_counts[w] - count_weight(stab, w))
        for w in (d, d + 1) if w <= _CLOG_BUDGET
    )
    return InnerCode(name=name or f"{length}-{k}-{d}", n=length, k=k, d=d,
                     stabilizer=stab, dual=dual, c_log_table=table)


@lru_cache(maxsize=16)
def _stabilizer_words(stab: BinaryCode) -> np.ndarray:
    """All codewords of C as a uint64 array (dim C <= 26 for every catalog code)."""
    words = np.zeros(1, dtype=np.uint64)
    for row in stab.rows:
        words = np.concatenate([words, words ^ np.uint64(row)])
    return words


def coset_min_weight(code: InnerCode, vec: int) -> int:
    """Exhaustive minimum weight over the coset vec + C (the slow oracle path)."""
    best = vec.bit_count()
    for s in _stabilizer_words(code.stabilizer):
        w = (vec ^ int(s)).bit_count()
        if w < best:
            best = w
    return best


def _coset_weights_ok(code: InnerCode, vec: int) -> bool:
    """Fast path: every element of vec + C heavier than d (vectorized scan)."""
    words = _stabilizer_words(code.stabilizer) ^ np.uint64(vec)
    return int(np.bitwise_count(words).min()) > code.d


def _random_dual_element(code: InnerCode, rng: random.Random) -> int:
    v = 0
    for row in code.dual.rows:
        if rng.getrandbits(1):
            v ^= row
    return v


def find_magic_basis(code: InnerCode, seed: int, attempts: int = 200) -> MagicBasis:
    """Search for an orthonormal logical basis whose cosets avoid weight <= d.

    Draws random dual elements, projects them against the vectors already
    chosen, and keeps those with odd self-overlap (which also guarantees
    independence modulo C since C is self-orthogonal).  On failure of the
    coset-weight condition the whole basis is redrawn.
    """
    rng = random.Random(seed)
    best: Optional[MagicBasis] = None
    best_good = -1
    for _ in range(attempts):
        chosen: list[int] = []
        draws = 0
        while len(chosen) < code.k and draws < 200 * code.k:
            draws += 1
            v = _random_dual_element(code, rng)
            for u in chosen:
                if (v & u).bit_count() & 1:
                    v ^= u
            if (v & v).bit_count() & 1:  # odd weight: unit diagonal, not in C
                chosen.append(v)
        if len(chosen) < code.k:
            continue
        good = sum(1 for v in chosen if _coset_weights_ok(code, v))
        basis = MagicBasis(tuple(chosen), min_coset_weight_ok=(good == code.k), seed=seed)
        if basis.min_coset_weight_ok:
            return basis
        if good > best_good:
            best, best_good = basis, good
    if best is None:
        raise BasisSearchExhausted(f"no orthonormal basis found for {code.name}")
    return best


def logical_action(code: InnerCode, basis: MagicBasis, v: BitVector) -> BitVector:
    """Logical qubits flipped by Y(v): component j is the pairing with basis vector j."""
    if v.length != code.n:
        raise ValueError("vector length does not match the code")
    if not code.dual.contains(v.bits):
        raise ValueError("not a logical operator (outside C-perp)")
    return BitVector(code.k, _action_mask(basis, v.bits))


def _action_mask(basis: MagicBasis, bits: int) -> int:
    out = 0
    for j, ell in enumerate(basis.vectors):
        out |= ((bits & ell).bit_count() & 1) << j
    return out


@lru_cache(maxsize=64)
def min_logical_support(code: InnerCode, basis: MagicBasis) -> int:
    """Minimum action weight over all weight-d nontrivial logicals (exhaustive)."""
    best = code.k + 1
    for word in enumerate_weight(code.dual, code.d):
        if code.stabilizer.contains(word):
            continue
        w = _action_mask(basis, word).bit_count()
        if w < best:
            best = w
    return best


# ----------------------------------------------------------------------------
# catalog

#: name -> (generator polynomial string, n, k, d, c_log(d), basis seed)
_CATALOG_FILE = "inner_codes.txt"


def _catalog_rows() -> Tuple[Tuple[str, str, int, int, int, int, int], ...]:
    text = resources.files("msdkit.data").joinpath(_CATALOG_FILE).read_text()
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, poly_s, params, seed_s = [p.strip() for p in line.split("|")]
        n, k, d, clog = (int(x) for x in params.split())
        rows.append((name, poly_s, n, k, d, clog, int(seed_s)))
    return tuple(rows)


@lru_cache(maxsize=1)
def load_catalog() -> Mapping[str, Tuple[InnerCode, MagicBasis]]:
    """Build every catalog code, self-check its parameters, and find its basis."""
    out: Dict[str, Tuple[InnerCode, MagicBasis]] = {}
    for name, poly_s, n, k, d, clog, seed in _catalog_rows():
        code = build_inner_code(Poly2.parse(poly_s), n, name=name)
        got = (code.n, code.k, code.d, c_log(code, code.d))
        if got != (n, k, d, clog):
            raise ValueError(f"catalog self-check failed for {name}: {got} != {(n, k, d, clog)}")
        basis = find_magic_basis(code, seed)
        out[name] = (code, basis)
    return out


def catalog_code(name: str) -> InnerCode:
    return load_catalog()[name][0]


def catalog_basis(name: str) -> MagicBasis:
    return load_catalog()[name][1]
