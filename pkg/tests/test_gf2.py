"""Tests for the GF(2) substrate: polynomials, codes, weight counting."""

from __future__ import annotations

import itertools
import math
import random

import pytest

from msdkit.gf2 import (
    BinaryCode,
    BitVector,
    EnumerationTooLarge,
    NotADivisor,
    Poly2,
    count_weight,
    cyclic_code,
    dual_code,
    enumerate_weight,
    min_weight,
    poly_quotient,
)

X31 = Poly2.parse("x^31+1")
X63 = Poly2.parse("x^63+1")


def brute_weight_count(code: BinaryCode, w: int) -> int:
    """Independent oracle: scan all codewords (tiny codes only)."""
    assert code.dimension <= 16
    count = 0
    for coeffs in itertools.product([0, 1], repeat=code.dimension):
        word = 0
        for c, row in zip(coeffs, code.rows):
            if c:
                word ^= row
        if word.bit_count() == w:
            count += 1
    return count


def test_poly_parse_roundtrip():
    p = Poly2.parse("x^5+x^2+1")
    assert p.coeffs == 0b100101
    assert str(p) == "x^5+x^2+1"
    assert Poly2.parse(str(p)) == p


def test_poly_quotient_table_rows():
    q = poly_quotient(X31, Poly2.parse("x^5+x^2+1"))
    assert q.degree == 26
    assert q * Poly2.parse("x^5+x^2+1") == X31

    assert poly_quotient(Poly2.parse("x+1"), Poly2.parse("x+1")) == Poly2(1)

    q63 = poly_quotient(X63, Poly2.parse("x^9+x^7+x^6+x+1"))
    assert q63.degree == 54


def test_poly_quotient_rejects_nondivisor():
    with pytest.raises(NotADivisor):
        poly_quotient(Poly2.parse("x^4+1"), Poly2.parse("x^3+x+1"))


def test_poly_quotient_product_roundtrip():
    rng = random.Random(7)
    for _ in range(50):
        g = Poly2(rng.randrange(1, 1 << 12))
        h = Poly2(rng.randrange(1, 1 << 12))
        assert poly_quotient(g * h, h) == g


def test_bitvector_invariants():
    v = BitVector.from_support(10, [0, 3, 7])
    assert v.weight == 3
    assert v.support() == (0, 3, 7)
    assert (v ^ v).weight == 0
    with pytest.raises(ValueError):
        BitVector(3, 0b1000)


def test_cyclic_code_dimensions():
    g31 = poly_quotient(X31, Poly2.parse("x^5+x^2+1"))
    assert cyclic_code(g31, 31).dimension == 5

    assert cyclic_code(Poly2(1), 6).dimension == 6  # full space

    g63 = poly_quotient(X63, Poly2.parse("x^18+x^15+x^13+x^11+x^9+x^5+x^4+x+1"))
    assert cyclic_code(g63, 63).dimension == 18


def test_cyclic_code_rejects_bad_generator():
    with pytest.raises(NotADivisor):
        cyclic_code(Poly2.parse("x^3+x+1"), 10)


def test_cyclic_code_closed_under_shift():
    code = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    mask = (1 << 31) - 1
    for word in code.codewords():
        shifted = ((word << 1) | (word >> 30)) & mask
        assert code.contains(shifted)


def test_dual_code_basics():
    full = BinaryCode.from_rows(5, [1 << i for i in range(5)])
    assert dual_code(full).dimension == 0

    c31 = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    d = dual_code(c31)
    assert d.dimension == 26
    for a in c31.rows:
        for b in d.rows:
            assert (a & b).bit_count() % 2 == 0

    g63 = cyclic_code(poly_quotient(X63, Poly2.parse("x^9+x^7+x^6+x+1")), 63)
    assert dual_code(dual_code(g63)) == g63


def test_count_weight_small_cases():
    full5 = BinaryCode.from_rows(5, [1 << i for i in range(5)])
    assert count_weight(full5, 2) == math.comb(5, 2)

    zero = BinaryCode.from_rows(8, [])
    assert count_weight(zero, 0) == 1
    assert count_weight(zero, 1) == 0


def test_count_weight_31_21_3_dual():
    # weight-3 words of the [31,26] dual; these are all nontrivial logicals
    c = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    d = dual_code(c)
    assert count_weight(d, 3) == 155
    assert min_weight(c, 10) is None  # C itself has no word of weight <= 10


def test_count_weight_strategies_agree():
    c = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    d = dual_code(c)
    for w in range(0, 7):
        assert count_weight(d, w, strategy="codewords") == count_weight(d, w, strategy="supports")
    # small random codes against the brute oracle
    rng = random.Random(3)
    for n in (9, 12):
        rows = [rng.randrange(1, 1 << n) for _ in range(4)]
        code = BinaryCode.from_rows(n, rows)
        for w in range(n + 1):
            expect = brute_weight_count(code, w)
            assert count_weight(code, w, strategy="codewords") == expect
            if w <= 8:
                assert count_weight(code, w, strategy="supports") == expect


def test_count_weight_histogram_sums_to_size():
    rng = random.Random(11)
    for n in (10, 14, 16):
        rows = [rng.randrange(1, 1 << n) for _ in range(n // 2)]
        code = BinaryCode.from_rows(n, rows)
        total = sum(count_weight(code, w) for w in range(n + 1))
        assert total == 1 << code.dimension


def test_count_weight_sharding_sums():
    c = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    d = dual_code(c)
    whole = count_weight(d, 4, strategy="supports")
    parts = sum(count_weight(d, 4, part=(i, 4), strategy="supports") for i in range(4))
    assert parts == whole
    whole_a = count_weight(c, 12, strategy="codewords")
    parts_a = sum(count_weight(c, 12, part=(i, 3), strategy="codewords") for i in range(3))
    assert parts_a == whole_a


def test_count_weight_budget_error():
    g63 = cyclic_code(poly_quotient(X63, Poly2.parse("x^9+x^7+x^6+x+1")), 63)
    big = dual_code(g63)  # dimension 54
    with pytest.raises(EnumerationTooLarge):
        count_weight(big, 9)


def test_enumerate_weight_matches_count():
    c = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    d = dual_code(c)
    words = enumerate_weight(d, 3)
    assert len(words) == count_weight(d, 3)
    assert len(set(words)) == len(words)
    for wv in words:
        assert wv.bit_count() == 3
        assert d.contains(wv)


def test_min_weight_cases():
    zero = BinaryCode.from_rows(12, [])
    assert min_weight(zero, 10) is None
    g63 = cyclic_code(poly_quotient(X63, Poly2.parse("x^18+x^15+x^13+x^11+x^9+x^5+x^4+x+1")), 63)
    d = dual_code(g63)
    assert min_weight(d, 8) == 7


def test_code_serialize_roundtrip():
    c = cyclic_code(poly_quotient(X31, Poly2.parse("x^5+x^2+1")), 31)
    assert BinaryCode.deserialize(c.serialize()) == c
