"""Exact arithmetic in the ring Z[√2, √3].

Elements are a + b√2 + c√3 + d√6 with integer coefficients. This is the
ring in which the geometric representation lives when every order is in
{2, 3, 4, 6, ∞}, so matrix equality and root signs can be decided exactly.
"""

from __future__ import annotations

import math
from functools import cached_property

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)

# Orders whose cosines -cos(pi/m), doubled, are integral in Z[√2, √3].
EXACT_ORDERS = frozenset({2, 3, 4, 6})


def _sign(n: int) -> int:
    return (n > 0) - (n < 0)


def _sign_zroot2(u: int, v: int) -> int:
    """Sign of u + v√2."""
    su, sv = _sign(u), _sign(v)
    if su == 0:
        return sv
    if sv == 0 or su == sv:
        return su
    # opposite signs: compare u^2 with 2 v^2
    return su * _sign(u * u - 2 * v * v)


class QuadInt:
    """Element a + b√2 + c√3 + d√6 of Z[√2, √3]."""

    def __init__(self, a: int = 0, b: int = 0, c: int = 0, d: int = 0) -> None:
        self._a = a
        self._b = b
        self._c = c
        self._d = d

    @property
    def coef(self) -> tuple[int, int, int, int]:
        return (self._a, self._b, self._c, self._d)

    def __repr__(self) -> str:
        return f"QuadInt({self._a}, {self._b}, {self._c}, {self._d})"

    def __str__(self) -> str:
        return f"{self._a}{self._b:+}√2{self._c:+}√3{self._d:+}√6"

    @classmethod
    def from_int(cls, x: int) -> QuadInt:
        return cls(x, 0, 0, 0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self.coef == (other, 0, 0, 0)
        if isinstance(other, QuadInt):
            return self.coef == other.coef
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coef)

    def __add__(self, other: int | QuadInt) -> QuadInt:
        if isinstance(other, int):
            other = self.from_int(other)
        elif not isinstance(other, QuadInt):
            return NotImplemented
        return QuadInt(
            self._a + other._a, self._b + other._b, self._c + other._c, self._d + other._d
        )

    def __radd__(self, other: int | QuadInt) -> QuadInt:
        return self + other

    def __neg__(self) -> QuadInt:
        return QuadInt(-self._a, -self._b, -self._c, -self._d)

    def __sub__(self, other: int | QuadInt) -> QuadInt:
        return self + (-other)

    def __rsub__(self, other: int | QuadInt) -> QuadInt:
        return (-self) + other

    def __mul__(self, other: int | QuadInt) -> QuadInt:
        if isinstance(other, int):
            return QuadInt(self._a * other, self._b * other, self._c * other, self._d * other)
        if not isinstance(other, QuadInt):
            return NotImplemented
        a1, b1, c1, d1 = self.coef
        a2, b2, c2, d2 = other.coef
        return QuadInt(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    def __rmul__(self, other: int | QuadInt) -> QuadInt:
        return self * other

    def __bool__(self) -> bool:
        return any(self.coef)

    def __float__(self) -> float:
        return self._a + self._b * SQRT2 + self._c * SQRT3 + self._d * SQRT6

    @cached_property
    def sign(self) -> int:
        """Exact sign, writing the element as p + q√3 with p, q in Z[√2]."""
        pu, pv = self._a, self._b
        qu, qv = self._c, self._d
        sp = _sign_zroot2(pu, pv)
        sq = _sign_zroot2(qu, qv)
        if sp == 0:
            return sq
        if sq == 0 or sp == sq:
            return sp
        # opposite signs: compare p^2 with 3 q^2 inside Z[√2]
        p2 = (pu * pu + 2 * pv * pv, 2 * pu * pv)
        q2 = (qu * qu + 2 * qv * qv, 2 * qu * qv)
        return sp * _sign_zroot2(p2[0] - 3 * q2[0], p2[1] - 3 * q2[1])

    def __lt__(self, other: int | QuadInt) -> bool:
        return (self - other).sign < 0

    def __gt__(self, other: int | QuadInt) -> bool:
        return (self - other).sign > 0


ZERO = QuadInt()
ONE = QuadInt(1)


def doubled_cosine(m: float) -> QuadInt:
    """Exact value of 2 * (-cos(pi/m)) for m in {1, 2, 3, 4, 6, ∞}."""
    if m == 1:
        return QuadInt(2)
    if m == 2:
        return ZERO
    if m == 3:
        return QuadInt(-1)
    if m == 4:
        return QuadInt(0, -1)
    if m == 6:
        return QuadInt(0, 0, -1)
    if m == math.inf:
        return QuadInt(-2)
    raise ValueError(f"Order {m} is not representable in Z[√2, √3]")


def is_exact_order(m: float) -> bool:
    return m == math.inf or m in EXACT_ORDERS or m == 1


def determinant(rows: list[list[QuadInt]]) -> QuadInt:
    """Determinant by cofactor expansion along the first row (small matrices only)."""
    n = len(rows)
    if n == 0:
        return ONE
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for j in range(n):
        entry = rows[0][j]
        if not entry:
            continue
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = entry * determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
