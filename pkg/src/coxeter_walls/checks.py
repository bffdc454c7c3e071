"""Numerical checks of the chamber, half-space and limit-set statements."""

from __future__ import annotations

import logging
from itertools import combinations

import numpy as np

from coxeter_walls.coxeter import length, normal_form, support
from coxeter_walls.errors import DegenerateSample, Undecided
from coxeter_walls.geometry import (
    DEFAULT_CONFIG,
    affine_map,
    chamber_of,
    conjugate_halfspace,
    fold_and_lift,
    fold_points,
    in_parabolic_union,
    intersect,
    make_polytope,
    same_polytope,
    sample_in_chambers,
    wall_of,
)
from coxeter_walls.models import (
    Element,
    EuclideanRealization,
    GeneratorSubset,
    IntersectionReport,
    LimitDirections,
    VerifyConfig,
)
from coxeter_walls.parabolic import (
    has_finite_index,
    is_member,
    is_spherical,
    min_coset_rep,
    parabolic_ball,
)

logger = logging.getLogger(__name__)

SIDE_SAMPLES = 3
DIRECTION_TOL = 1e-6


# -------------------------------------------------------------------------
# Chambers and walls
# -------------------------------------------------------------------------


def check_lemma0(
    real: EuclideanRealization, w: Element, s: int, config: VerifyConfig = DEFAULT_CONFIG
) -> bool:
    """l(w) < l(sw) iff wC lies on the positive side of the wall of s.

    Raises:
        DegenerateSample: if samples keep landing on the wall
    """
    ascends = length(normal_form(w.system, (s,) + w.nf)) > length(w)
    L, t = affine_map(real, w)
    n, b = real.normals[s], real.offsets[s]
    rng = np.random.default_rng(config.seed)
    vertices = real.chamber.vertices

    sides = []
    attempts = 0
    while len(sides) < SIDE_SAMPLES:
        local = real.basepoint if not sides else rng.dirichlet(np.ones(len(vertices))) @ vertices
        side = float(n @ (L @ local + t) - b)
        if abs(side) <= config.side_tol:
            attempts += 1
            logger.debug("Sample of %s on the wall of %d, resampling", w.label(), s)
            if attempts > config.perturb_retries:
                raise DegenerateSample(f"Samples of {w.label()}C keep landing on the wall of {s}")
            continue
        sides.append(side)
    positive = all(x > 0 for x in sides)
    if not positive and any(x > 0 for x in sides):
        return False
    return positive == ascends


def check_lemma1(
    real: EuclideanRealization,
    w: Element,
    s: int,
    T: GeneratorSubset | None = None,
    config: VerifyConfig = DEFAULT_CONFIG,
) -> bool:
    """w X_s^+ equals the + half-space of the wall of w s w^-1, for w in W_T and s not in T.

    T defaults to the support of w.

    Raises:
        ValueError: if s is in T or w is not in W_T
    """
    if T is None:
        T = support(w)
    if s in T:
        raise ValueError(f"Generator {s} must lie outside T={{{T.label()}}}")
    if not is_member(w, T):
        raise ValueError(f"{w.label()} is not in W_{{{T.label()}}}")
    normal, offset = conjugate_halfspace(real, w, s)
    r = normal_form(w.system, w.nf + (s,) + tuple(reversed(w.nf)))
    wall = wall_of(real, r, config.side_tol)
    tol = config.gram_tol * max(1.0, abs(offset)) * 10
    return bool(np.max(np.abs(normal - wall.normal)) <= tol and abs(offset - wall.offset) <= tol)


def chamber_intersection(
    real: EuclideanRealization, w: Element, config: VerifyConfig = DEFAULT_CONFIG
) -> IntersectionReport:
    """C ∩ wC, computed directly and as the three other terms of the identity.

    With T = supp(w): ⋂(F_t ∩ C) over t in T, ⋂(tC ∩ C) over t in T, and
    ⋂ vC over v in W_T ∩ ball(orbit_radius), which is exact once the ball
    contains T.
    """
    tol = config.vertex_tol
    T = support(w)
    C = real.chamber
    direct = intersect(C, chamber_of(real, w), tol=tol)

    idx = list(T)
    A = np.vstack([C.A, -real.normals[idx]]) if idx else C.A
    b = np.concatenate([C.b, -real.offsets[idx]]) if idx else C.b
    via_walls = make_polytope(A, b, tol)

    via_neighbors = intersect(C, *[chamber_of(real, (t,)) for t in idx], tol=tol)
    orbit = parabolic_ball(real.system, T, max(1, config.orbit_radius))
    via_orbit = intersect(*[chamber_of(real, v) for v in orbit], tol=tol)

    agree = all(same_polytope(direct, P, tol) for P in (via_walls, via_neighbors, via_orbit))
    if not agree:
        logger.info("Intersection terms disagree for %s", w.label())
    return IntersectionReport(
        w=w,
        support=T,
        direct=direct,
        via_walls=via_walls,
        via_neighbors=via_neighbors,
        via_orbit=via_orbit,
        agree=agree,
    )


def check_lemma31(real: EuclideanRealization, w: Element, config: VerifyConfig = DEFAULT_CONFIG) -> bool:
    return chamber_intersection(real, w, config).agree


def check_lemma32(real: EuclideanRealization, w: Element, config: VerifyConfig = DEFAULT_CONFIG) -> bool:
    """C ∩ wC is nonempty iff W_supp(w) is finite."""
    meets = not intersect(real.chamber, chamber_of(real, w), tol=config.vertex_tol).is_empty
    return meets == is_spherical(real.system, support(w), config)


# -------------------------------------------------------------------------
# Convexity and the half-space description of W_T C
# -------------------------------------------------------------------------


def _membership(
    real: EuclideanRealization,
    T: GeneratorSubset,
    points: np.ndarray,
    config: VerifyConfig,
    via_cosets: bool = False,
) -> np.ndarray:
    """Boundary-tolerant membership of each point in W_T C.

    Fold words are reduced, so their letters are the support of the chamber
    element; ``via_cosets`` decides membership with min_coset_rep instead.
    """
    words, folded = fold_points(real, points, config)
    inside = np.zeros(len(points), dtype=bool)
    for i, (word, q) in enumerate(zip(words, folded)):
        if via_cosets:
            member = is_member(normal_form(real.system, word), T)
        else:
            member = set(word) <= T.members
        if member:
            inside[i] = True
        else:
            inside[i] = in_parabolic_union(real, T, points[i], config, folded=(word, q))
    return inside


def check_convexity(
    real: EuclideanRealization, T: GeneratorSubset, trials: int, config: VerifyConfig = DEFAULT_CONFIG
) -> bool:
    """Midpoints of random pairs from chambers of W_T fold back into W_T."""
    rng = np.random.default_rng(config.seed)
    elements = parabolic_ball(real.system, T, config.orbit_radius)
    P = sample_in_chambers(real, elements, trials, rng)
    Q = sample_in_chambers(real, elements, trials, rng)
    inside = _membership(real, T, (P + Q) / 2.0, config, via_cosets=True)
    failures = int((~inside).sum())
    if failures:
        logger.info("%d of %d midpoints left W_{%s} C", failures, trials, T.label())
    return failures == 0


def truncated_walls(
    real: EuclideanRealization,
    T: GeneratorSubset,
    radius: int,
    center: np.ndarray,
    half_width: float,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Half-spaces w X_s^+ (w in W_T ∩ ball(radius), s not in T) whose wall meets the box.

    The flag is True when every box-meeting wall from the outermost layer
    already appeared at a smaller length, so growing the radius adds nothing.
    """
    rest = [s for s in real.system.generators if s not in T]
    inner: dict[tuple, tuple[np.ndarray, float]] = {}
    outer: dict[tuple, tuple[np.ndarray, float]] = {}
    for w in parabolic_ball(real.system, T, radius):
        for s in rest:
            normal, offset = conjugate_halfspace(real, w, s)
            if abs(normal @ center - offset) > half_width * np.abs(normal).sum():
                continue
            key = tuple(np.round(np.r_[normal, offset], 7))
            (outer if length(w) == radius else inner).setdefault(key, (normal, offset))
    certified = all(key in inner for key in outer)
    walls = {**outer, **inner}
    if not walls:
        return np.zeros((0, real.dim)), np.zeros(0), certified
    normals = np.array([n for n, _ in walls.values()])
    offsets = np.array([b for _, b in walls.values()])
    return normals, offsets, certified


def check_halfspace_rep(
    real: EuclideanRealization,
    T: GeneratorSubset,
    radius: int,
    samples: int,
    config: VerifyConfig = DEFAULT_CONFIG,
) -> bool:
    """Inside the sample box, W_T C equals the intersection of the half-spaces w X_s^+.

    Raises:
        Undecided: if walls from the outermost layer of W_T ∩ ball(radius) still
            meet the box, so the truncated description cannot be trusted there
    """
    rng = np.random.default_rng(config.seed)
    center = real.basepoint
    half = config.box_radius
    points = center + rng.uniform(-half, half, size=(samples, real.dim))
    normals, offsets, certified = truncated_walls(real, T, radius, center, half)
    if not certified:
        logger.warning("Walls of length %d still meet the box for T={%s}", radius, T.label())
        raise Undecided(f"Radius {radius} is too small to bound the walls of W_{{{T.label()}}} in the box")
    left = _membership(real, T, points, config)
    if len(normals):
        right = np.all(points @ normals.T - offsets >= -config.vertex_tol, axis=1)
    else:
        right = np.ones(samples, dtype=bool)
    mismatches = int((left != right).sum())
    if mismatches:
        logger.info("%d of %d samples disagree for T={%s}", mismatches, samples, T.label())
    return mismatches == 0


# -------------------------------------------------------------------------
# Limit directions
# -------------------------------------------------------------------------


def _circle(count: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(count) / count
    return np.c_[np.cos(angles), np.sin(angles)]


def _sphere(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        return _circle(count)
    g = rng.normal(size=(count, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def direction_samples(real: EuclideanRealization, config: VerifyConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Unit directions: a grid on the whole sphere plus the spheres of each coordinate block.

    Coordinate blocks are the subspaces carried by unions of affine
    components, where sub-lattice orbits accumulate.
    """
    rng = np.random.default_rng(config.seed)
    out = [_sphere(real.dim, config.direction_samples, rng)]
    spans, col = [], 0
    for part in real.components:
        spans.append(list(range(col, col + len(part) - 1)))
        col += len(part) - 1
    for k in range(1, len(spans)):
        for chosen in combinations(spans, k):
            idx = [i for span in chosen for i in span]
            local = _sphere(len(idx), config.direction_samples, rng)
            full = np.zeros((len(local), real.dim))
            full[:, idx] = local
            out.append(full)
    return np.vstack(out)


def cluster_directions(directions: np.ndarray, angle_tol: float) -> np.ndarray:
    """Greedy clustering: keep a direction unless a kept one is within ``angle_tol``."""
    reps: list[np.ndarray] = []
    cos_tol = np.cos(angle_tol)
    for u in directions:
        if reps and np.max(np.array(reps) @ u) >= cos_tol:
            continue
        reps.append(u)
    if not reps:
        return np.zeros((0, directions.shape[1] if directions.ndim == 2 else 0))
    return np.array(reps)


def _angle_mismatch(U: np.ndarray, V: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two direction sets, in radians."""
    if len(U) == 0 and len(V) == 0:
        return 0.0
    if len(U) == 0 or len(V) == 0:
        return float(np.pi)
    cos = np.clip(U @ V.T, -1.0, 1.0)
    return float(max(np.arccos(cos.max(axis=1)).max(), np.arccos(cos.max(axis=0)).max()))


def max_angular_gap(directions: np.ndarray) -> float:
    """Largest gap between consecutive directions on the circle (dimension 2 only)."""
    if len(directions) == 0:
        return float(2.0 * np.pi)
    angles = np.sort(np.arctan2(directions[:, 1], directions[:, 0]))
    gaps = np.diff(np.r_[angles, angles[0] + 2.0 * np.pi])
    return float(gaps.max())


def _far_hits(
    real: EuclideanRealization, T: GeneratorSubset, radius: float, config: VerifyConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Which far points land in W_T C, and x0 plus the chamber vertices carried into their chambers."""
    directions = direction_samples(real, config)
    points = real.basepoint + (radius + 2.0 * real.diam) * directions
    local = np.vstack([real.basepoint, real.chamber.vertices])
    words, folded, lifted = fold_and_lift(real, points, local, config)
    hits = np.array(
        [
            set(word) <= T.members or in_parabolic_union(real, T, p, config, folded=(word, q))
            for word, q, p in zip(words, folded, points)
        ],
        dtype=bool,
    )
    return hits, lifted


def limit_directions(
    real: EuclideanRealization, T: GeneratorSubset, radius: float, config: VerifyConfig = DEFAULT_CONFIG
) -> LimitDirections:
    """Approximate the limit set of W_T by directions of far orbit points.

    Far points x0 + (radius + 2 diam) u that fold into W_T C give an orbit
    point w x0; its direction is compared with the directions of the
    vertices of wC.
    """
    if radius <= 0:
        raise ValueError(f"Radius must be positive, got {radius}")
    empty = np.zeros((0, real.dim))
    if is_spherical(real.system, T, config):
        return LimitDirections(T=T, radius=radius, directions=empty, vertex_directions=empty,
                               max_mismatch=0.0, matches=True)

    hits, lifted = _far_hits(real, T, radius, config)
    far = lifted[hits] - real.basepoint
    far /= np.linalg.norm(far, axis=2, keepdims=True)
    directions = cluster_directions(far[:, 0, :], config.angle_tol)
    corners = cluster_directions(far[:, 1:, :].reshape(-1, real.dim), config.angle_tol)
    mismatch = _angle_mismatch(directions, corners)
    logger.debug("W_{%s}: %d limit directions, mismatch %.3g", T.label(), len(directions), mismatch)
    return LimitDirections(
        T=T,
        radius=radius,
        directions=directions,
        vertex_directions=corners,
        max_mismatch=mismatch,
        matches=mismatch <= config.angle_tol,
    )


def direction_coverage(
    real: EuclideanRealization, T: GeneratorSubset, radius: float, config: VerifyConfig = DEFAULT_CONFIG
) -> float:
    """Fraction of sample directions whose far point lies in W_T C."""
    hits, _ = _far_hits(real, T, radius, config)
    return float(hits.mean())


def check_finite_index_limits(
    real: EuclideanRealization, T: GeneratorSubset, radius: float, config: VerifyConfig = DEFAULT_CONFIG
) -> bool:
    """[W : W_T] finite iff the limit directions of W_T fill every sampled direction."""
    covers = direction_coverage(real, T, radius, config) == 1.0
    return covers == has_finite_index(real.system, T, config)


def check_cocompact_rays(
    real: EuclideanRealization, T: GeneratorSubset, radius: float, config: VerifyConfig = DEFAULT_CONFIG
) -> bool:
    """Rays from x0 toward limit directions of W_T stay within diam C of the orbit W_T x0.

    A ray point folding into W_T C is within diam of its own orbit point; any
    other point is bounded through the W_T part of its chamber's coset split.
    """
    limits = limit_directions(real, T, radius, config)
    if len(limits.directions) == 0:
        return True
    x0 = real.basepoint
    steps = np.arange(0.0, radius + real.diam, real.diam)
    points = np.vstack([x0 + steps[:, None] * u for u in limits.directions])
    words, folded = fold_points(real, points, config)
    worst = 0.0
    for word, q, p in zip(words, folded, points):
        if set(word) <= T.members:
            d = float(np.linalg.norm(q - x0))
        else:
            v = min_coset_rep(normal_form(real.system, word), T).v
            L, t = affine_map(real, v)
            d = float(np.linalg.norm(p - (L @ x0 + t)))
        worst = max(worst, d)
    if worst > real.diam + config.bound_tol:
        logger.info("Ray points stray %.6g from W_{%s} x0 (diam %.6g)", worst, T.label(), real.diam)
        return False
    return True


# -------------------------------------------------------------------------
# Powers
# -------------------------------------------------------------------------


def linear_order(L: np.ndarray, cap: int, tol: float = 1e-9) -> int | None:
    """Least m <= cap with L^m = I, or None."""
    M = np.eye(len(L))
    for m in range(1, cap + 1):
        M = M @ L
        if np.max(np.abs(M - np.eye(len(L)))) <= tol:
            return m
    return None


def translation_part(real: EuclideanRealization, w: Element, cap: int) -> np.ndarray | None:
    """Translation vector of w^m, where m is the order of the linear part of w."""
    L, t = affine_map(real, w)
    m = linear_order(L, cap)
    if m is None:
        return None
    Lk, tk = np.eye(real.dim), np.zeros(real.dim)
    for _ in range(m):
        Lk, tk = Lk @ L, Lk @ t + tk
    return tk


def power_direction(
    real: EuclideanRealization, w: Element, k_max: int, config: VerifyConfig = DEFAULT_CONFIG
) -> np.ndarray | None:
    """Limit direction of w^k x0, or None when the orbit stays bounded or has not settled by k_max."""
    if k_max < 2:
        raise ValueError(f"k_max must be at least 2, got {k_max}")
    shift = translation_part(real, w, config.order_cap)
    if shift is None or np.linalg.norm(shift) <= 1e-9:
        return None
    target = shift / np.linalg.norm(shift)

    L, t = affine_map(real, w)
    x0 = real.basepoint
    k = 1
    while k <= k_max:
        v = L @ x0 + t - x0
        norm = np.linalg.norm(v)
        if norm > 0 and np.linalg.norm(v / norm - target) <= DIRECTION_TOL:
            return target
        L, t = L @ L, L @ t + t
        k *= 2
    logger.debug("Directions of %s^k did not settle by k=%d", w.label(), k_max)
    return None
