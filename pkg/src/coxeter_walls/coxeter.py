"""Coxeter-system combinatorics: validation, word problem, lengths, balls."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from coxeter_walls.backends import (
    bfs_layer_sizes,
    braid_closure,
    doubled_cosines,
    exact_doubled_cosines,
    get_backend,
)
from coxeter_walls.errors import (
    DiagonalNotOne,
    LetterOutOfRange,
    NotSymmetric,
    OffDiagonalBelowTwo,
    ResourceCap,
    SystemFormatError,
    SystemMismatch,
)
from coxeter_walls.models import (
    INFINITY,
    CoxeterSystem,
    Element,
    GeneratorSubset,
    Word,
)
from coxeter_walls.ring import QuadInt

logger = logging.getLogger(__name__)

SYSTEMS_DIR = Path(__file__).parent / "systems"

DEFAULT_BALL_CAP = 200_000


# -------------------------------------------------------------------------
# Systems
# -------------------------------------------------------------------------


def new_system(rank: int, orders: Sequence[Sequence[float]], name: str | None = None) -> CoxeterSystem:
    """Validate an order matrix and build a CoxeterSystem.

    Args:
        rank: Number of generators
        orders: rank x rank matrix, INFINITY for m = infinity

    Returns:
        The validated system
    """
    if rank < 1:
        raise SystemFormatError(f"Rank must be positive, got {rank}")
    if len(orders) != rank or any(len(row) != rank for row in orders):
        raise SystemFormatError(f"Order matrix must be {rank}x{rank}")

    rows = []
    for s, row in enumerate(orders):
        clean = []
        for t, v in enumerate(row):
            if v == INFINITY:
                clean.append(INFINITY)
            elif isinstance(v, (int, np.integer)) or (isinstance(v, float) and v.is_integer()):
                clean.append(int(v))
            else:
                raise SystemFormatError(f"Entry m({s},{t}) must be an integer or infinity, got {v!r}")
        rows.append(tuple(clean))

    for s in range(rank):
        if rows[s][s] != 1:
            raise DiagonalNotOne(s, rows[s][s])
    for s in range(rank):
        for t in range(s + 1, rank):
            if rows[s][t] != rows[t][s]:
                raise NotSymmetric(s, t, rows[s][t], rows[t][s])
    for s in range(rank):
        for t in range(s + 1, rank):
            if rows[s][t] < 2:
                raise OffDiagonalBelowTwo(s, t, rows[s][t])

    return CoxeterSystem(rank=rank, orders=tuple(rows), name=name)


def _from_file_matrix(rank: int, matrix: Sequence[Sequence[int]], name: str | None) -> CoxeterSystem:
    orders = [[INFINITY if v == 0 else v for v in row] for row in matrix]
    return new_system(rank, orders, name=name)


def parse_system_text(text: str, name: str | None = None) -> CoxeterSystem:
    """Parse ``rank N`` followed by N rows of N integers (0 = infinity)."""
    lines = [line.split("#", 1)[0].strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise SystemFormatError("Empty system file")
    header = lines[0].split()
    if len(header) != 2 or header[0] != "rank":
        raise SystemFormatError(f"First line must be 'rank N', got {lines[0]!r}")
    try:
        rank = int(header[1])
        matrix = [[int(v) for v in line.split()] for line in lines[1:]]
    except ValueError as e:
        raise SystemFormatError(f"Non-integer entry in system file: {e}") from None
    if len(matrix) != rank:
        raise SystemFormatError(f"Expected {rank} matrix rows, got {len(matrix)}")
    return _from_file_matrix(rank, matrix, name)


def parse_system_json(doc: str | dict, name: str | None = None) -> CoxeterSystem:
    """Parse {"rank": N, "m": [[...]]} with 0 meaning infinity."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise SystemFormatError(f"Invalid JSON system document: {e}") from None
    if not isinstance(doc, dict) or "rank" not in doc or "m" not in doc:
        raise SystemFormatError("JSON system document needs 'rank' and 'm'")
    return _from_file_matrix(int(doc["rank"]), doc["m"], name or doc.get("name"))


def bundled_systems() -> list[str]:
    """Names of the acceptance systems shipped with the package."""
    return sorted(p.stem for p in SYSTEMS_DIR.glob("*.cox"))


def load_system(source: str | Path) -> CoxeterSystem:
    """Load a system from a file path, or by bundled name such as ``a2t``."""
    path = Path(source)
    if not path.exists():
        candidates = [SYSTEMS_DIR / path.name, SYSTEMS_DIR / f"{path.name}.cox"]
        bundled = next((p for p in candidates if p.is_file()), None)
        if bundled is None:
            raise SystemFormatError(f"System not found: {source}")
        path = bundled
    with open(path) as f:
        text = f.read()
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        return parse_system_json(text, name=path.stem)
    return parse_system_text(text, name=path.stem)


def system_to_text(system: CoxeterSystem) -> str:
    rows = [" ".join(str(v) for v in row) for row in system.file_matrix()]
    return "\n".join([f"rank {system.rank}", *rows]) + "\n"


def system_digest(system: CoxeterSystem) -> str:
    """Stable digest of the order matrix, used to tag reports."""
    return hashlib.sha256(system_to_text(system).encode("utf-8")).hexdigest()[:16]


def restrict(system: CoxeterSystem, T: GeneratorSubset) -> CoxeterSystem:
    """The Coxeter system (W_T, T), generators renumbered in increasing order."""
    members = T.sorted()
    if not members:
        raise ValueError("Cannot restrict to the empty subset")
    check_subset(system, T)
    orders = [[system.m(s, t) for t in members] for s in members]
    return CoxeterSystem(rank=len(members), orders=tuple(tuple(r) for r in orders))


def check_subset(system: CoxeterSystem, T: GeneratorSubset) -> GeneratorSubset:
    for s in T.members:
        if not 0 <= s < system.rank:
            raise LetterOutOfRange(s, system.rank)
    return T


def full_subset(system: CoxeterSystem) -> GeneratorSubset:
    return GeneratorSubset(frozenset(system.generators))


def cosine_matrix(system: CoxeterSystem) -> np.ndarray:
    """B with B(s,t) = -cos(pi/m(s,t)) and -1 for m = infinity."""
    return np.array(doubled_cosines(system)) / 2.0


def cosine_matrix_exact(system: CoxeterSystem) -> list[list[QuadInt]]:
    """2B over Z[√2, √3]; orders outside {2, 3, 4, 6, ∞} raise ValueError."""
    return exact_doubled_cosines(system)


# -------------------------------------------------------------------------
# Elements
# -------------------------------------------------------------------------


def _check_word(system: CoxeterSystem, word: Iterable[int]) -> Word:
    word = tuple(word)
    for letter in word:
        if not isinstance(letter, (int, np.integer)) or not 0 <= letter < system.rank:
            raise LetterOutOfRange(letter, system.rank)
    return tuple(int(s) for s in word)


def normal_form(system: CoxeterSystem, word: Iterable[int], backend: str = "auto") -> Element:
    """ShortLex-minimal reduced word for the element spelled by ``word``."""
    word = _check_word(system, word)
    return Element(system, get_backend(system, backend).normal_form(word))


def identity(system: CoxeterSystem) -> Element:
    return Element(system, ())


def generator(system: CoxeterSystem, s: int) -> Element:
    return normal_form(system, (s,))


def length(e: Element) -> int:
    return len(e.nf)


def _same_system(e1: Element, e2: Element) -> None:
    if e1.system != e2.system:
        raise SystemMismatch("Elements belong to different Coxeter systems")


def multiply(e1: Element, e2: Element) -> Element:
    _same_system(e1, e2)
    return normal_form(e1.system, e1.nf + e2.nf)


def inverse(e: Element) -> Element:
    return normal_form(e.system, reversed(e.nf))


def power(e: Element, k: int) -> Element:
    if k < 0:
        return power(inverse(e), -k)
    result = identity(e.system)
    base = e
    while k:
        if k & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        k >>= 1
    return result


def descents(e: Element, side: str = "right") -> GeneratorSubset:
    """Right descents {s : l(ws) < l(w)} or left descents {s : l(sw) < l(w)}."""
    backend = get_backend(e.system)
    if side == "right":
        return GeneratorSubset(backend.right_descents(e.nf))
    if side == "left":
        return GeneratorSubset(backend.left_descents(e.nf))
    raise ValueError(f"Invalid side: {side}")


def right_descents(e: Element) -> GeneratorSubset:
    return descents(e, "right")


def left_descents(e: Element) -> GeneratorSubset:
    return descents(e, "left")


def support(e: Element) -> GeneratorSubset:
    return GeneratorSubset(frozenset(e.nf))


def all_reduced_words(e: Element) -> set[Word]:
    """Every reduced word of ``e``: the braid closure of its normal form."""
    return braid_closure(e.system, e.nf)


def is_reduced(system: CoxeterSystem, word: Sequence[int]) -> bool:
    return len(normal_form(system, word).nf) == len(word)


# Balls can hold up to ball_cap words each.
@lru_cache(maxsize=8)
def _ball_words(system: CoxeterSystem, radius: int, cap: int) -> tuple[Word, ...]:
    backend = get_backend(system)
    words: list[Word] = [()]
    layer: list[Word] = [()]
    for r in range(1, radius + 1):
        next_layer = []
        for u in layer:
            right = backend.right_descents(u)
            for s in system.generators:
                if s in right:
                    continue
                w = u + (s,)
                # prefixes of ShortLex normal forms are normal forms
                if backend.normal_form(w) == w:
                    next_layer.append(w)
        words.extend(next_layer)
        if len(words) > cap:
            raise ResourceCap(f"Ball of radius {radius} exceeds cap {cap} at length {r}")
        layer = next_layer
        if not layer:
            break
    return tuple(words)


def clear_ball_cache() -> None:
    _ball_words.cache_clear()


def ball(system: CoxeterSystem, radius: int, cap: int = DEFAULT_BALL_CAP) -> list[Element]:
    """All elements of length <= radius, sorted by (length, ShortLex)."""
    if radius < 0:
        raise ValueError(f"Radius must be non-negative, got {radius}")
    return [Element(system, w) for w in _ball_words(system, radius, cap)]


def ball_sizes(system: CoxeterSystem, radius: int, cap: int = DEFAULT_BALL_CAP) -> list[int]:
    """Number of elements of length <= r, for r = 0..radius."""
    counts = [0] * (radius + 1)
    for w in _ball_words(system, radius, cap):
        counts[len(w)] += 1
    sizes, total = [], 0
    for c in counts:
        total += c
        sizes.append(total)
    return sizes


def count_elements(system: CoxeterSystem, cap: int) -> int | None:
    """|W| if it is at most ``cap``, else None."""
    sizes = bfs_layer_sizes(system, cap)
    return None if sizes is None else sum(sizes)


def element_order(e: Element, cap: int) -> float:
    """Least k <= cap with e^k = 1, or INFINITY when none exists below the cap."""
    if cap < 1:
        raise ValueError(f"Cap must be positive, got {cap}")
    current = e
    for k in range(1, cap + 1):
        if current.is_identity:
            return k
        current = multiply(current, e)
    logger.debug("Element %s has order beyond %d", e.label(), cap)
    return INFINITY


def order_label(order: float) -> int | str:
    return "inf" if order == INFINITY or (isinstance(order, float) and math.isinf(order)) else int(order)


def enumeration_record(e: Element) -> dict:
    return {"nf": list(e.nf), "len": len(e.nf)}


def enumeration_lines(elements: Iterable[Element]) -> str:
    """One JSON object per line, the ``ball`` artifact format."""
    return "".join(json.dumps(enumeration_record(e)) + "\n" for e in elements)
