"""Inner-code construction, Y-logical counts, and magic basis properties."""

from __future__ import annotations

import random

import pytest

from msdkit.gf2 import BitVector, Poly2, count_weight
from msdkit.inner import (
    MagicBasis,
    NotWeaklySelfDual,
    build_inner_code,
    c_log,
    catalog_basis,
    catalog_code,
    coset_min_weight,
    find_magic_basis,
    load_catalog,
    logical_action,
    min_logical_support,
)

# (name, n, k, d, c_log(d)) for the full catalog; this is the module's
# calibration gate and must match exactly.
CATALOG_PARAMS = [
    ("31-21-3", 31, 21, 3, 155),
    ("31-11-5", 31, 11, 5, 186),
    ("63-45-4", 63, 45, 4, 1260),
    ("63-39-5", 63, 39, 5, 1890),
    ("63-27-7", 63, 27, 7, 3411),
]


@pytest.mark.parametrize("name,n,k,d,clog", CATALOG_PARAMS)
def test_catalog_parameters(name, n, k, d, clog):
    code = catalog_code(name)
    assert (code.n, code.k, code.d) == (n, k, d)
    assert c_log(code, d) == clog
    for w in range(1, d):
        assert c_log(code, w) == 0


def test_c_log_below_and_at_distance():
    code = catalog_code("63-45-4")
    assert c_log(code, 3) == 0
    assert c_log(code, 4) == 1260


def test_c_log_counts_dual_minus_stabilizer():
    code = catalog_code("31-21-3")
    for w in (3, 4, 5):
        assert c_log(code, w) == count_weight(code.dual, w) - count_weight(code.stabilizer, w)


def test_build_rejects_non_self_orthogonal():
    # the [31,26] Hamming code is not contained in its dual
    with pytest.raises(NotWeaklySelfDual):
        build_inner_code(Poly2.parse("x^5+x^2+1"), 31)


def test_even_length_warns():
    with pytest.warns(UserWarning, match="not normal"):
        build_inner_code(Poly2.parse("x^5+x^4+x+1"), 8)


@pytest.mark.parametrize("name", [row[0] for row in CATALOG_PARAMS])
def test_magic_basis_orthonormal(name):
    code = catalog_code(name)
    basis = catalog_basis(name)
    assert len(basis.vectors) == code.k
    for i, a in enumerate(basis.vectors):
        for j, b in enumerate(basis.vectors):
            assert ((a & b).bit_count() & 1) == (1 if i == j else 0)
        assert code.dual.contains(a)
        assert not code.stabilizer.contains(a)


def test_magic_basis_coset_condition():
    for name in ("31-21-3", "31-11-5", "63-27-7"):
        code = catalog_code(name)
        basis = catalog_basis(name)
        assert basis.min_coset_weight_ok
        for v in basis.vectors:
            assert coset_min_weight(code, v) > code.d


def test_logical_action_basics():
    code = catalog_code("31-11-5")
    basis = catalog_basis("31-11-5")
    # stabilizer elements act trivially
    for row in code.stabilizer.rows:
        assert logical_action(code, basis, BitVector(31, row)).weight == 0
    # basis vectors act as unit indicators
    act = logical_action(code, basis, BitVector(31, basis.vectors[2]))
    assert act.bits == 1 << 2
    with pytest.raises(ValueError, match="not a logical operator"):
        bad = 0b111  # weight 3 < d, not in C-perp
        assert not code.dual.contains(bad)
        logical_action(code, basis, BitVector(31, bad))


def test_logical_action_linear():
    code = catalog_code("31-11-5")
    basis = catalog_basis("31-11-5")
    rng = random.Random(5)
    rows = code.dual.rows
    for _ in range(100):
        v1 = 0
        v2 = 0
        for row in rows:
            if rng.getrandbits(1):
                v1 ^= row
            if rng.getrandbits(1):
                v2 ^= row
        a1 = logical_action(code, basis, BitVector(31, v1)).bits
        a2 = logical_action(code, basis, BitVector(31, v2)).bits
        a12 = logical_action(code, basis, BitVector(31, v1 ^ v2)).bits
        assert a12 == a1 ^ a2


@pytest.mark.parametrize("name", [row[0] for row in CATALOG_PARAMS])
def test_min_logical_support_at_least_two(name):
    code = catalog_code(name)
    basis = catalog_basis(name)
    assert min_logical_support(code, basis) >= 2


def test_adversarial_basis_support_one():
    # force a weight-d coset representative into the basis: support drops to 1
    code = catalog_code("31-21-3")
    from msdkit.gf2 import enumerate_weight

    word = next(w for w in enumerate_weight(code.dual, 3) if not code.stabilizer.contains(w))
    rng = random.Random(0)
    chosen = [word]
    while len(chosen) < code.k:
        v = 0
        for row in code.dual.rows:
            if rng.getrandbits(1):
                v ^= row
        for u in chosen:
            if (v & u).bit_count() & 1:
                v ^= u
        if (v & v).bit_count() & 1:
            chosen.append(v)
    basis = MagicBasis(tuple(chosen), min_coset_weight_ok=False)
    assert min_logical_support(code, basis) == 1


def test_find_magic_basis_reproducible():
    code = catalog_code("31-11-5")
    b1 = find_magic_basis(code, seed=42)
    b2 = find_magic_basis(code, seed=42)
    assert b1.vectors == b2.vectors


def test_load_catalog_complete():
    cat = load_catalog()
    assert set(cat) == {row[0] for row in CATALOG_PARAMS}
