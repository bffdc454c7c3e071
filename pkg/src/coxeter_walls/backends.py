"""Word-problem backends for coxeter_walls.

Two interchangeable ways of computing ShortLex normal forms:

* ``BraidBackend`` follows Tits: a word is reduced iff no chain of braid
  moves exposes two equal adjacent letters. Exact, exponential, meant for
  short words.
* ``RootBackend`` strips left descents read off the geometric
  representation. Plain integers when every order is in {2, 3, ∞},
  exact over Z[√2, √3] when every order is in {2, 3, 4, 6, ∞},
  floating point otherwise.

``MatrixOracle`` is the exact faithful representation itself, used to
certify the backends.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from functools import lru_cache
from typing import Protocol, Sequence

import numpy as np

from coxeter_walls.models import INFINITY, CoxeterSystem, Word
from coxeter_walls.ring import ONE, ZERO, QuadInt, doubled_cosine, is_exact_order

logger = logging.getLogger(__name__)


class WordProblemBackend(Protocol):
    """Protocol for word-problem backends."""

    def normal_form(self, word: Sequence[int]) -> Word:
        """ShortLex-least reduced word for the element spelled by ``word``."""
        ...

    def right_descents(self, nf: Word) -> frozenset[int]:
        """Generators s with l(ws) < l(w), for a reduced word ``nf``."""
        ...

    def left_descents(self, nf: Word) -> frozenset[int]:
        ...


CACHE_LIMIT = 500_000

INTEGER_ORDERS = frozenset({1, 2, 3, INFINITY})


def is_exact_system(system: CoxeterSystem) -> bool:
    return all(is_exact_order(m) for row in system.orders for m in row)


def ring_kind(system: CoxeterSystem) -> str:
    """Cheapest exact ring for the roots: "int", "quad", or "float" when none is exact."""
    if all(m in INTEGER_ORDERS for row in system.orders for m in row):
        return "int"
    return "quad" if is_exact_system(system) else "float"


def doubled_cosines(system: CoxeterSystem) -> list[list[float]]:
    """Matrix 2B with B(a_s, a_t) = -cos(pi / m(s,t)), as floats."""
    rows = []
    for s in system.generators:
        row = []
        for t in system.generators:
            m = system.m(s, t)
            if m == INFINITY:
                row.append(-2.0)
            elif m == 2:
                row.append(0.0)
            else:
                row.append(-2.0 * math.cos(math.pi / m))
        rows.append(row)
    return rows


def exact_doubled_cosines(system: CoxeterSystem) -> list[list[QuadInt]]:
    return [[doubled_cosine(system.m(s, t)) for t in system.generators] for s in system.generators]


# -------------------------------------------------------------------------
# Braid moves (Tits)
# -------------------------------------------------------------------------


def braid_neighbors(system: CoxeterSystem, word: Word) -> list[Word]:
    """Words obtained from ``word`` by one braid move."""
    out = []
    n = len(word)
    for i in range(n - 1):
        s, t = word[i], word[i + 1]
        if s == t:
            continue
        m = system.m(s, t)
        if m == INFINITY or i + m > n:
            continue
        m = int(m)
        if all(word[i + k] == (s if k % 2 == 0 else t) for k in range(m)):
            swapped = tuple(t if k % 2 == 0 else s for k in range(m))
            out.append(word[:i] + swapped + word[i + m :])
    return out


def braid_closure(system: CoxeterSystem, word: Word) -> set[Word]:
    """All words reachable from ``word`` by braid moves."""
    seen = {word}
    queue = deque([word])
    while queue:
        u = queue.popleft()
        for v in braid_neighbors(system, u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _adjacent_pair(word: Word) -> int | None:
    for i in range(len(word) - 1):
        if word[i] == word[i + 1]:
            return i
    return None


class BraidBackend:
    """Tits' braid-move and deletion algorithm."""

    def __init__(self, system: CoxeterSystem):
        self.system = system

    def normal_form(self, word: Sequence[int]) -> Word:
        word = tuple(word)
        while True:
            seen = {word}
            queue = deque([word])
            shorter = None
            while queue:
                u = queue.popleft()
                i = _adjacent_pair(u)
                if i is not None:
                    shorter = u[:i] + u[i + 2 :]
                    break
                for v in braid_neighbors(self.system, u):
                    if v not in seen:
                        seen.add(v)
                        queue.append(v)
            if shorter is None:
                # seen is now every reduced word of the element, all of one length
                return min(seen)
            word = shorter

    def right_descents(self, nf: Word) -> frozenset[int]:
        return frozenset(s for s in self.system.generators if len(self.normal_form(nf + (s,))) < len(nf))

    def left_descents(self, nf: Word) -> frozenset[int]:
        return frozenset(s for s in self.system.generators if len(self.normal_form((s,) + nf)) < len(nf))


# -------------------------------------------------------------------------
# Geometric representation
# -------------------------------------------------------------------------


class RootBackend:
    """Descent stripping on roots of the geometric representation.

    For w = s1...sl the matrix N = sigma(sl)...sigma(s1) represents w^-1;
    s is a left descent of w iff column s of N is a negative root.
    """

    def __init__(self, system: CoxeterSystem, ring: str | None = None):
        self.system = system
        self.ring = ring or ring_kind(system)
        if self.ring == "int":
            if ring_kind(system) != "int":
                raise ValueError("Integer roots need every order in {2, 3, inf}")
            self._c = [[round(v) for v in row] for row in doubled_cosines(system)]
            self._zero, self._one = 0, 1
        elif self.ring == "quad":
            self._c = exact_doubled_cosines(system)
            self._zero, self._one = ZERO, ONE
        elif self.ring == "float":
            self._c = doubled_cosines(system)
            self._zero, self._one = 0.0, 1.0
        else:
            raise ValueError(f"Unknown root ring: {ring}")
        self._cache: dict[Word, Word] = {}

    @property
    def exact(self) -> bool:
        return self.ring != "float"

    def _identity(self) -> list[list]:
        n = self.system.rank
        return [[self._one if i == j else self._zero for j in range(n)] for i in range(n)]

    def _left_mul(self, N: list[list], s: int) -> None:
        """N <- sigma(s) N, in place: row s becomes N[s] - sum_k c[s][k] N[k]."""
        c = self._c[s]
        n = self.system.rank
        new_row = list(N[s])
        for k in range(n):
            if c[k]:
                row_k = N[k]
                for j in range(n):
                    new_row[j] = new_row[j] - c[k] * row_k[j]
        N[s] = new_row

    def _right_mul(self, N: list[list], s: int) -> None:
        """N <- N sigma(s), in place: column j loses c[s][j] times column s."""
        c = self._c[s]
        n = self.system.rank
        for row in N:
            x = row[s]
            if not x:
                continue
            for j in range(n):
                if c[j]:
                    row[j] = row[j] - c[j] * x

    def _negative_column(self, N: list[list], s: int) -> bool:
        total = self._zero
        for row in N:
            total = total + row[s]
        if self.ring == "quad":
            return total.sign < 0
        return total < 0

    def inverse_matrix(self, word: Sequence[int]) -> list[list]:
        N = self._identity()
        for s in word:
            self._left_mul(N, s)
        return N

    def matrix(self, word: Sequence[int]) -> list[list]:
        """Matrix of w = s1...sl acting on the root space."""
        M = self._identity()
        for s in word:
            self._right_mul(M, s)
        return M

    def normal_form(self, word: Sequence[int]) -> Word:
        word = tuple(word)
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        N = self.inverse_matrix(word)
        out: list[int] = []
        n = self.system.rank
        limit = len(word)
        while len(out) <= limit:
            for s in range(n):
                if self._negative_column(N, s):
                    out.append(s)
                    self._right_mul(N, s)
                    break
            else:
                nf = tuple(out)
                if len(self._cache) >= CACHE_LIMIT:
                    self._cache.clear()
                self._cache[word] = nf
                return nf
        raise ArithmeticError(f"Descent stripping exceeded input length {limit}; inexact roots?")

    def right_descents(self, nf: Word) -> frozenset[int]:
        M = self.matrix(nf)
        return frozenset(s for s in self.system.generators if self._negative_column(M, s))

    def left_descents(self, nf: Word) -> frozenset[int]:
        N = self.inverse_matrix(nf)
        return frozenset(s for s in self.system.generators if self._negative_column(N, s))


class MatrixOracle:
    """Exact faithful representation sigma(s)v = v - 2B(a_s, v)a_s over Z[√2, √3]."""

    def __init__(self, system: CoxeterSystem):
        if not is_exact_system(system):
            raise ValueError(
                f"Matrix oracle needs orders in {{2,3,4,6,inf}}, got {system.file_matrix()}"
            )
        self._roots = RootBackend(system, ring="quad")

    def matrix(self, word: Sequence[int]) -> tuple[tuple[QuadInt, ...], ...]:
        return tuple(tuple(row) for row in self._roots.matrix(word))

    def same_element(self, u: Sequence[int], v: Sequence[int]) -> bool:
        return self.matrix(u) == self.matrix(v)


# -------------------------------------------------------------------------
# Vectorised enumeration
# -------------------------------------------------------------------------


def bfs_layer_sizes(system: CoxeterSystem, cap: int) -> list[int] | None:
    """Sizes of the length layers of W, or None once more than ``cap`` elements appear.

    Each element of length n+1 is u*s for some u of length n with s not a
    right descent of u, so only candidates inside one layer need deduplicating.
    """
    n = system.rank
    c = np.array(doubled_cosines(system))
    sigmas = []
    for s in range(n):
        sigma = np.eye(n)
        sigma[s, :] -= c[s, :]
        sigmas.append(sigma)
    layer = np.eye(n)[None, :, :]
    sizes = [1]
    total = 1
    while True:
        candidates = []
        for s in range(n):
            ascending = layer[:, :, s].sum(axis=1) > 0.0
            if ascending.any():
                candidates.append(layer[ascending] @ sigmas[s])
        if not candidates:
            return sizes
        stacked = np.concatenate(candidates)
        # matrices of distinct elements differ by far more than the rounding
        scale = max(1.0, float(np.abs(stacked).max()))
        keys = np.round(stacked.reshape(len(stacked), -1) / scale, 9)
        _, first = np.unique(keys, axis=0, return_index=True)
        layer = stacked[np.sort(first)]
        total += len(layer)
        sizes.append(len(layer))
        if total > cap:
            logger.debug("BFS passed cap %d at length %d", cap, len(sizes) - 1)
            return None


@lru_cache(maxsize=64)
def get_backend(system: CoxeterSystem, kind: str = "auto") -> WordProblemBackend:
    """Backend for ``system``: "roots", "braid", or "auto" (roots)."""
    if kind in ("auto", "roots"):
        return RootBackend(system)
    if kind == "braid":
        return BraidBackend(system)
    raise ValueError(f"Unknown word backend: {kind}")
