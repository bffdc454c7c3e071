"""Euclidean realizations of affine-type Coxeter systems.

Each affine diagram component is embedded by eigen-factoring its cosine
matrix, so that the unit normals n_s satisfy <n_s, n_t> = -cos(pi/m(s,t)).
The chamber is C = {x : <n_s, x> >= b_s}, with b = -1 on the highest
generator of every component and 0 elsewhere.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from coxeter_walls.coxeter import (
    ball,
    cosine_matrix,
    full_subset,
    normal_form,
)
from coxeter_walls.errors import NonConvergence, NotAffineType
from coxeter_walls.models import (
    CoxeterSystem,
    Element,
    EuclideanRealization,
    GeneratorSubset,
    Polytope,
    VerifyConfig,
    Wall,
    Word,
)
from coxeter_walls.parabolic import components, parabolic_ball

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = VerifyConfig()

# Largest word length searched when enumerating a finite stabiliser W_J.
STABILIZER_RADIUS = 64


# -------------------------------------------------------------------------
# Polytopes
# -------------------------------------------------------------------------


def _dedup_rows(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if not any(np.max(np.abs(p - q)) <= tol for q in kept):
            kept.append(p)
    if not kept:
        return np.zeros((0, points.shape[1]))
    out = np.array(kept)
    return out[np.lexsort(out.T[::-1])]


def vertex_enumeration(A: np.ndarray, b: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Vertices of the bounded polytope {x : A x >= b}.

    Every choice of ``dim`` constraints with an invertible system is solved
    at once; feasible solutions are kept and merged within ``tol``.
    """
    m, d = A.shape
    if m < d:
        return np.zeros((0, d))
    combos = np.array(list(combinations(range(m), d)))
    mats = A[combos]
    rhs = b[combos]
    regular = np.abs(np.linalg.det(mats)) > 1e-12
    if not regular.any():
        return np.zeros((0, d))
    sols = np.linalg.solve(mats[regular], rhs[regular][..., None])[..., 0]
    feasible = np.all(sols @ A.T >= b - tol, axis=1)
    return _dedup_rows(sols[feasible], tol)


def make_polytope(A: np.ndarray, b: np.ndarray, tol: float = 1e-7) -> Polytope:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    A, b = _dedup_constraints(A, b)
    return Polytope(A=A, b=b, vertices=vertex_enumeration(A, b, tol))


def _dedup_constraints(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(A) == 0:
        return A, b
    keys = np.round(np.c_[A, b], 9)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = np.sort(first)
    return A[first], b[first]


def intersect(*polytopes: Polytope, tol: float = 1e-7) -> Polytope:
    A = np.vstack([p.A for p in polytopes])
    b = np.concatenate([p.b for p in polytopes])
    return make_polytope(A, b, tol)


def same_polytope(P: Polytope, Q: Polytope, tol: float = 1e-7) -> bool:
    """Equal vertex sets after deduplication, matched within ``tol``."""
    if len(P.vertices) != len(Q.vertices):
        return False
    for p in P.vertices:
        if not np.any(np.max(np.abs(Q.vertices - p), axis=1) <= tol):
            return False
    return True


# -------------------------------------------------------------------------
# Realization
# -------------------------------------------------------------------------


def _sign_normalized(vectors: np.ndarray) -> np.ndarray:
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nonzero = np.flatnonzero(np.abs(col) > 1e-12)
        if len(nonzero) and col[nonzero[0]] < 0:
            out[:, j] = -col
    return out


def _component_normals(B: np.ndarray, component: Sequence[int], tol: float) -> np.ndarray:
    """Rows n_s in R^(k-1) with Gram matrix B, for an affine component of size k."""
    if len(component) < 2:
        raise NotAffineType(component, "a single generator generates a finite group")
    eigvals, eigvecs = np.linalg.eigh(B)
    if eigvals[0] < -tol:
        raise NotAffineType(component, f"cosine matrix is indefinite (eigenvalue {eigvals[0]:.3g})")
    corank = int(np.sum(np.abs(eigvals) <= tol))
    if corank == 0:
        raise NotAffineType(component, "cosine matrix is positive definite (finite type)")
    if corank > 1:
        raise NotAffineType(component, f"cosine matrix has corank {corank}, expected 1")
    positive = eigvecs[:, 1:]
    return _sign_normalized(positive) * np.sqrt(eigvals[1:])


def build_realization(system: CoxeterSystem, config: VerifyConfig = DEFAULT_CONFIG) -> EuclideanRealization:
    """Realize an affine-type system as a cocompact reflection group.

    Raises:
        NotAffineType: for a finite-type or indefinite component
    """
    B = cosine_matrix(system)
    parts = [tuple(c) for c in components(system, full_subset(system))]
    dim = system.rank - len(parts)
    normals = np.zeros((system.rank, dim))
    offsets = np.zeros(system.rank)

    col = 0
    for part in parts:
        block = _component_normals(B[np.ix_(part, part)], part, config.gram_tol)
        normals[np.ix_(part, range(col, col + block.shape[1]))] = block
        offsets[max(part)] = -1.0
        col += block.shape[1]

    gram = normals @ normals.T
    if np.max(np.abs(gram - B)) > config.gram_tol:
        raise NotAffineType(
            system.generators, f"normals miss the cosine matrix by {np.max(np.abs(gram - B)):.3g}"
        )

    chamber = make_polytope(normals, offsets, config.vertex_tol)
    vertices = chamber.vertices
    basepoint = vertices.mean(axis=0)
    diffs = vertices[:, None, :] - vertices[None, :, :]
    diam = float(np.sqrt((diffs**2).sum(axis=2)).max())
    logger.info(
        "Realized %s in dimension %d: %d chamber vertices, diam %.6g",
        system.name or "system", dim, len(vertices), diam,
    )
    return EuclideanRealization(
        system=system,
        dim=dim,
        normals=normals,
        offsets=offsets,
        chamber=chamber,
        basepoint=basepoint,
        diam=diam,
        components=tuple(parts),
    )


def inradius(real: EuclideanRealization) -> tuple[float, np.ndarray]:
    """Chebyshev radius and centre of the chamber.

    Maximises r subject to <n_s, x> - r >= b_s; the normals are unit.
    """
    d = real.dim
    c = np.r_[np.zeros(d), -1.0]
    A_ub = np.c_[-real.normals, np.ones(len(real.normals))]
    b_ub = -real.offsets
    bounds = [(None, None)] * d + [(0, None)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise ValueError(f"Chebyshev centre LP failed: {res.message}")
    return float(res.x[-1]), res.x[:-1]


# -------------------------------------------------------------------------
# The action
# -------------------------------------------------------------------------


def reflect(real: EuclideanRealization, s: int, p: np.ndarray) -> np.ndarray:
    n = real.normals[s]
    return p - 2.0 * (np.dot(n, p) - real.offsets[s]) * n


# Words up to this length keep their affine maps cached.
CACHED_WORD_LENGTH = 64


def _compose(real: EuclideanRealization, word: Word) -> tuple[np.ndarray, np.ndarray]:
    L = np.eye(real.dim)
    t = np.zeros(real.dim)
    for s in word:
        n = real.normals[s]
        # x -> L (x - 2(<n,x> - b) n) + t
        Ln = L @ n
        L, t = L - 2.0 * np.outer(Ln, n), t + 2.0 * real.offsets[s] * Ln
    return L, t


_compose_cached = lru_cache(maxsize=65536)(_compose)


def clear_affine_cache() -> None:
    """Drop cached affine maps, and with them the realizations they reference."""
    _compose_cached.cache_clear()


def _affine(real: EuclideanRealization, word: Word) -> tuple[np.ndarray, np.ndarray]:
    if len(word) <= CACHED_WORD_LENGTH:
        return _compose_cached(real, word)
    return _compose(real, word)


def affine_map(real: EuclideanRealization, w: Element | Word) -> tuple[np.ndarray, np.ndarray]:
    """(L, t) with w x = L x + t; letters act right to left."""
    word = w.nf if isinstance(w, Element) else tuple(w)
    L, t = _affine(real, word)
    return L.copy(), t.copy()


def apply(real: EuclideanRealization, w: Element | Word, p: np.ndarray) -> np.ndarray:
    word = w.nf if isinstance(w, Element) else tuple(w)
    L, t = _affine(real, word)
    return L @ np.asarray(p, dtype=float) + t


def chamber_of(real: EuclideanRealization, w: Element | Word) -> Polytope:
    """The closed chamber w C as a polytope."""
    word = w.nf if isinstance(w, Element) else tuple(w)
    L, t = _affine(real, word)
    A = real.normals @ L.T
    b = real.offsets + A @ t
    vertices = real.chamber.vertices @ L.T + t
    return Polytope(A=A, b=b, vertices=vertices)


def conjugate_halfspace(real: EuclideanRealization, w: Element | Word, s: int) -> tuple[np.ndarray, float]:
    """(normal, offset) of the image w X_s^+ = {y : <L n_s, y> >= b_s + <L n_s, t>}."""
    word = w.nf if isinstance(w, Element) else tuple(w)
    L, t = _affine(real, word)
    normal = L @ real.normals[s]
    return normal, float(real.offsets[s] + normal @ t)


def wall_of(real: EuclideanRealization, r: Element, tol: float = 1e-9) -> Wall:
    """The wall of a reflection r, oriented so the chamber C is on the + side."""
    L, t = _affine(real, r.nf)
    P = (np.eye(real.dim) - L) / 2.0  # = u u^T for a reflection
    j = int(np.argmax(np.diag(P)))
    if P[j, j] <= tol:
        raise ValueError(f"Element {r.label()} acts as a translation or identity, not a reflection")
    u = P[:, j] / np.sqrt(P[j, j])
    if np.max(np.abs(P - np.outer(u, u))) > 1e3 * tol or np.max(np.abs(t - np.dot(u, t) * u)) > 1e3 * tol:
        raise ValueError(f"Element {r.label()} is not a reflection")
    offset = float(np.dot(u, t)) / 2.0
    if np.dot(u, real.basepoint) - offset < 0:
        u, offset = -u, -offset
    return Wall(reflection=r, normal=u, offset=offset)


# -------------------------------------------------------------------------
# Folding
# -------------------------------------------------------------------------


def fold_to_chamber(
    real: EuclideanRealization, p: np.ndarray, config: VerifyConfig = DEFAULT_CONFIG
) -> tuple[Element, np.ndarray]:
    """(w, q) with q in C and w q = p, reflecting across the most violated wall.

    Raises:
        NonConvergence: after config.fold_iteration_cap reflections
    """
    q = np.array(p, dtype=float)
    letters: list[int] = []
    for _ in range(config.fold_iteration_cap):
        sides = real.normals @ q - real.offsets
        s = int(np.argmin(sides))
        if sides[s] >= -config.side_tol:
            return normal_form(real.system, letters), q
        q = reflect(real, s, q)
        letters.append(s)
    raise NonConvergence(f"Folding did not reach C within {config.fold_iteration_cap} reflections")


def _fold_steps(
    real: EuclideanRealization, points: np.ndarray, config: VerifyConfig
) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray]]]:
    Q = np.array(points, dtype=float).reshape(-1, real.dim)
    steps: list[tuple[np.ndarray, np.ndarray]] = []
    for _ in range(config.fold_iteration_cap):
        sides = Q @ real.normals.T - real.offsets
        worst = np.argmin(sides, axis=1)
        active = np.flatnonzero(sides[np.arange(len(Q)), worst] < -config.side_tol)
        if not len(active):
            return Q, steps
        s = worst[active]
        n = real.normals[s]
        heights = np.einsum("ij,ij->i", Q[active], n) - real.offsets[s]
        Q[active] -= 2.0 * heights[:, None] * n
        steps.append((active, s))
    raise NonConvergence(f"Batched folding did not finish within {config.fold_iteration_cap} rounds")


def fold_points(
    real: EuclideanRealization, points: np.ndarray, config: VerifyConfig = DEFAULT_CONFIG
) -> tuple[list[Word], np.ndarray]:
    """Fold many points at once. Returns the (reduced) fold words and the folded points."""
    Q, steps = _fold_steps(real, points, config)
    words: list[list[int]] = [[] for _ in range(len(Q))]
    for active, s in steps:
        for i, letter in zip(active.tolist(), s.tolist()):
            words[i].append(letter)
    return [tuple(w) for w in words], Q


def fold_and_lift(
    real: EuclideanRealization, points: np.ndarray, local: np.ndarray, config: VerifyConfig = DEFAULT_CONFIG
) -> tuple[list[Word], np.ndarray, np.ndarray]:
    """Fold points, then carry ``local`` (k points of C) into each point's chamber.

    Returns the fold words, the folded points and an (m, k, dim) array whose
    row i is w_i applied to ``local``, where p_i lies in w_i C. The fold
    reflections are replayed in reverse, so no word is ever composed.
    """
    Q, steps = _fold_steps(real, points, config)
    local = np.asarray(local, dtype=float).reshape(-1, real.dim)
    lifted = np.broadcast_to(local, (len(Q), *local.shape)).copy()
    for active, s in reversed(steps):
        n = real.normals[s]
        heights = np.einsum("ikd,id->ik", lifted[active], n) - real.offsets[s][:, None]
        lifted[active] -= 2.0 * heights[..., None] * n[:, None, :]
    words: list[list[int]] = [[] for _ in range(len(Q))]
    for active, s in steps:
        for i, letter in zip(active.tolist(), s.tolist()):
            words[i].append(letter)
    return [tuple(w) for w in words], Q, lifted


def walls_through(real: EuclideanRealization, q: np.ndarray, tol: float) -> GeneratorSubset:
    """Generators whose wall passes within ``tol`` of a point q of C."""
    sides = real.normals @ q - real.offsets
    return GeneratorSubset(frozenset(int(s) for s in np.flatnonzero(np.abs(sides) <= tol)))


def in_parabolic_union(
    real: EuclideanRealization,
    T: GeneratorSubset,
    p: np.ndarray,
    config: VerifyConfig = DEFAULT_CONFIG,
    folded: tuple[Word, np.ndarray] | None = None,
) -> bool:
    """Whether p lies in W_T C, counting points on chamber boundaries.

    A point q of C on the walls J is shared by the chambers u W_J C, so p = u q
    belongs to W_T C iff some u v with v in W_J has support inside T.
    """
    word, q = folded if folded is not None else _fold_word(real, p, config)
    if set(word) <= T.members:
        return True
    J = walls_through(real, q, config.vertex_tol)
    if not J.members:
        return False
    u = normal_form(real.system, word)
    for v in parabolic_ball(real.system, J, STABILIZER_RADIUS):
        if set(normal_form(real.system, u.nf + v.nf).nf) <= T.members:
            return True
    return False


def _fold_word(real: EuclideanRealization, p: np.ndarray, config: VerifyConfig) -> tuple[Word, np.ndarray]:
    words, Q = fold_points(real, np.asarray(p, dtype=float)[None, :], config)
    return words[0], Q[0]


def sample_in_chambers(
    real: EuclideanRealization, elements: Sequence[Element], count: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` points, each a random interior point of a randomly chosen chamber vC."""
    vertices = real.chamber.vertices
    picks = rng.integers(0, len(elements), size=count)
    weights = rng.dirichlet(np.ones(len(vertices)), size=count)
    local = weights @ vertices
    out = np.empty_like(local)
    for i, k in enumerate(picks.tolist()):
        L, t = _affine(real, elements[k].nf)
        out[i] = L @ local[i] + t
    return out


def orbit_points(real: EuclideanRealization, radius: int) -> np.ndarray:
    """w x0 for every w in ball(radius), in ball order."""
    return np.array([apply(real, w, real.basepoint) for w in ball(real.system, radius)])
