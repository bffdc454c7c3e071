"""Tests for exact arithmetic in Z[√2, √3]."""

import math

import pytest
from coxeter_walls.ring import QuadInt, determinant, doubled_cosine, is_exact_order


def test_multiplication_of_conjugates():
    """(1 + √2)(1 - √2) = -1."""
    assert QuadInt(1, 1) * QuadInt(1, -1) == -1


def test_mixed_product():
    """√2 · √3 = √6."""
    assert QuadInt(0, 1) * QuadInt(0, 0, 1) == QuadInt(0, 0, 0, 1)


def test_sign_of_close_values():
    """Signs are exact even when the float value is close to zero."""
    assert QuadInt(-3, 2).sign == -1  # 2√2 < 3
    assert QuadInt(3, -2).sign == 1
    assert QuadInt(0, 0, 1, -1).sign == -1  # √3 < √6
    assert QuadInt(-99, 70).sign == -1  # 70√2 ≈ 98.995
    assert QuadInt(-98, 70).sign == 1
    assert QuadInt().sign == 0


def test_comparisons():
    """Ordering follows the real value."""
    assert QuadInt(0, 1) < QuadInt(0, 0, 1)
    assert QuadInt(2) > QuadInt(0, 1)


def test_doubled_cosines_square_to_integers():
    """(2cos(π/4))² = 2 and (2cos(π/6))² = 3."""
    assert doubled_cosine(4) * doubled_cosine(4) == 2
    assert doubled_cosine(6) * doubled_cosine(6) == 3
    assert doubled_cosine(3) == -1
    assert doubled_cosine(2) == 0
    assert doubled_cosine(math.inf) == -2


def test_doubled_cosine_rejects_five():
    """m = 5 needs √5, which the ring does not contain."""
    assert not is_exact_order(5)
    with pytest.raises(ValueError, match="not representable"):
        doubled_cosine(5)


def test_float_value():
    """Conversion to float sums the weighted square roots."""
    assert float(QuadInt(1, 1, 1, 1)) == pytest.approx(1 + math.sqrt(2) + math.sqrt(3) + math.sqrt(6))


def test_determinants_of_doubled_cosine_matrices():
    """det 2B is 3 for A2 and 0 for the affine triangle group."""
    a2 = [[QuadInt(2), QuadInt(-1)], [QuadInt(-1), QuadInt(2)]]
    a2t = [[QuadInt(2) if i == j else QuadInt(-1) for j in range(3)] for i in range(3)]
    assert determinant(a2) == 3
    assert determinant(a2t) == 0
    assert determinant([]) == 1


def test_determinants_by_cofactor_expansion():
    """det 2B is 5 for A4, 2 for B3, and 0 for a product of two affine lines."""
    a4 = [[QuadInt(2 if i == j else -1 if abs(i - j) == 1 else 0) for j in range(4)] for i in range(4)]
    r2 = QuadInt(0, -1)
    b3 = [[QuadInt(2), r2, QuadInt(0)], [r2, QuadInt(2), QuadInt(-1)], [QuadInt(0), QuadInt(-1), QuadInt(2)]]
    line = [[QuadInt(2), QuadInt(-2)], [QuadInt(-2), QuadInt(2)]]
    zero = [QuadInt(0), QuadInt(0)]
    lines = [line[0] + zero, line[1] + zero, zero + line[0], zero + line[1]]
    assert determinant(a4) == 5
    assert determinant(b3) == 2
    assert determinant(lines) == 0
