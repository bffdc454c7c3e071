"""Galleries along geodesic segments and their Hausdorff distance to the segment."""

from __future__ import annotations

import logging

import numpy as np

from coxeter_walls.coxeter import normal_form
from coxeter_walls.errors import DegenerateCrossing, NonConvergence
from coxeter_walls.geometry import DEFAULT_CONFIG, affine_map, inradius
from coxeter_walls.models import (
    Element,
    EuclideanRealization,
    Gallery,
    HausdorffReport,
    VerifyConfig,
    Word,
)

logger = logging.getLogger(__name__)


class _Degenerate(Exception):
    """The segment met a codimension >= 2 stratum."""


def _walk(
    real: EuclideanRealization,
    x0: np.ndarray,
    y: np.ndarray,
    max_steps: int,
    tol: float,
    break_ties: bool = False,
) -> Word:
    """Letters of the chambers met by the segment [x0, y], starting in C.

    In chamber gC the facet of generator s has normal L_g n_s and offset
    b_s + <L_g n_s, t_g>; leaving through it moves to the chamber gsC.
    With ``break_ties`` a segment through a codimension >= 2 stratum crosses
    the walls meeting there one at a time, lowest generator first; every
    such wall separates the current chamber from the one the segment
    continues into, so the word stays reduced.
    """
    L = np.eye(real.dim)
    t = np.zeros(real.dim)
    direction = y - x0
    lam = 0.0
    word: list[int] = []
    while True:
        normals = real.normals @ L.T
        offsets = real.offsets + normals @ t
        slopes = normals @ direction
        heights = normals @ x0 - offsets
        leaving = slopes < -1e-15
        if not leaving.any():
            return tuple(word)
        exits = np.full(real.system.rank, np.inf)
        exits[leaving] = -heights[leaving] / slopes[leaving]
        order = np.argsort(exits, kind="stable")
        first = exits[order[0]]
        if first >= 1.0 - tol:
            return tuple(word)
        if first < lam - tol:
            raise _Degenerate(f"exit parameter {first:.3g} precedes entry {lam:.3g}")
        if not break_ties and len(order) > 1 and exits[order[1]] - first <= tol:
            raise _Degenerate(f"two walls crossed at parameter {first:.6g}")
        if break_ties:
            # lowest index among the walls leaving at this parameter
            order = np.flatnonzero(exits - first <= tol)
        s = int(order[0])
        n = real.normals[s]
        Ln = L @ n
        L, t = L - 2.0 * np.outer(Ln, n), t + 2.0 * real.offsets[s] * Ln
        word.append(s)
        lam = first
        if len(word) > max_steps:
            raise NonConvergence(f"Segment walk passed {max_steps} walls")


def crossing_path(
    real: EuclideanRealization, w: Element, config: VerifyConfig = DEFAULT_CONFIG
) -> tuple[Word, np.ndarray]:
    """Crossing word of w together with the basepoint it was computed from.

    The basepoint starts at x0 and is perturbed inside C whenever the
    segment [x0, w x0] runs through a vertex or other low-dimensional stratum.
    Once the perturbations are used up, the segment from x0 is walked with
    simultaneous walls crossed one at a time.

    Raises:
        DegenerateCrossing: if every perturbation is still degenerate
    """
    if w.is_identity:
        return (), real.basepoint.copy()
    L, t = affine_map(real, w)
    rng = np.random.default_rng(config.seed)
    rho = None
    x0 = real.basepoint.copy()
    for attempt in range(config.perturb_retries + 1):
        try:
            word = _walk(real, x0, L @ x0 + t, 4 * len(w.nf) + 8, config.degenerate_tol)
        except _Degenerate as e:
            logger.debug("Crossing for %s degenerate on attempt %d: %s", w.label(), attempt, e)
        else:
            if normal_form(real.system, word) == w and len(word) == len(w.nf):
                return word, x0
            logger.debug("Crossing word %s does not reduce to %s; perturbing", word, w.label())
        if rho is None:
            rho = min(1e-3, inradius(real)[0] / 10.0)
        step = rng.normal(size=real.dim)
        step *= rho * rng.uniform() ** (1.0 / real.dim) / np.linalg.norm(step)
        x0 = real.basepoint + step

    # Every segment [x, wx] of a point reflection w runs through its fixed point.
    x0 = real.basepoint.copy()
    try:
        word = _walk(real, x0, L @ x0 + t, 4 * len(w.nf) + 8, config.degenerate_tol, break_ties=True)
    except _Degenerate as e:
        logger.debug("Tie-breaking walk for %s failed: %s", w.label(), e)
    else:
        if normal_form(real.system, word) == w and len(word) == len(w.nf):
            logger.debug("Crossing for %s passes through a stratum; walls crossed one at a time", w.label())
            return word, x0
    raise DegenerateCrossing(
        f"Segment for {w.label()} stayed degenerate after {config.perturb_retries} perturbations"
    )


def crossing_word(real: EuclideanRealization, w: Element, config: VerifyConfig = DEFAULT_CONFIG) -> Word:
    """Reduced word for w read off the walls crossed by [x0, w x0], in crossing order."""
    return crossing_path(real, w, config)[0]


def gallery(real: EuclideanRealization, word: Word, basepoint: np.ndarray | None = None) -> Gallery:
    """Polyline x0, s1 x0, s1 s2 x0, ..., (s1...sl) x0."""
    x0 = real.basepoint if basepoint is None else np.asarray(basepoint, dtype=float)
    L = np.eye(real.dim)
    t = np.zeros(real.dim)
    vertices = [x0.copy()]
    for s in word:
        n = real.normals[s]
        Ln = L @ n
        L, t = L - 2.0 * np.outer(Ln, n), t + 2.0 * real.offsets[s] * Ln
        vertices.append(L @ x0 + t)
    return Gallery(word=tuple(word), vertices=np.array(vertices))


def point_segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each row of ``points`` to the segment [a, b]."""
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return np.linalg.norm(points - a, axis=1)
    lam = np.clip((points - a) @ d / dd, 0.0, 1.0)
    return np.linalg.norm(points - (a + lam[:, None] * d), axis=1)


def point_polyline_distances(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    if len(vertices) == 1:
        return np.linalg.norm(points - vertices[0], axis=1)
    return np.min(
        [point_segment_distances(points, p, q) for p, q in zip(vertices[:-1], vertices[1:])], axis=0
    )


def hausdorff(segment: tuple[np.ndarray, np.ndarray], polyline: Gallery | np.ndarray, step: float) -> float:
    """Hausdorff distance between a segment and a polyline.

    Polyline to segment is exact: the distance to a convex set is convex
    along each edge, so it peaks at a vertex. Segment to polyline is sampled
    every ``step``, which undershoots by at most ``step``.
    """
    if step <= 0:
        raise ValueError(f"Sampling step must be positive, got {step}")
    a, b = (np.asarray(p, dtype=float) for p in segment)
    vertices = polyline.vertices if isinstance(polyline, Gallery) else np.asarray(polyline, dtype=float)
    to_segment = float(point_segment_distances(vertices, a, b).max())
    count = int(np.ceil(np.linalg.norm(b - a) / step)) + 1
    samples = a + np.linspace(0.0, 1.0, max(count, 2))[:, None] * (b - a)
    to_polyline = float(point_polyline_distances(samples, vertices).max())
    return max(to_segment, to_polyline)


def check_geodesic_theorem(
    real: EuclideanRealization, w: Element, config: VerifyConfig = DEFAULT_CONFIG
) -> HausdorffReport:
    """Hausdorff distance between [x0, w x0] and the gallery of its crossing word, against diam C."""
    word, x0 = crossing_path(real, w, config)
    path = gallery(real, word, x0)
    step = real.diam * config.hausdorff_fraction
    d_h = hausdorff((path.vertices[0], path.vertices[-1]), path, step)
    passed = d_h <= real.diam + config.bound_tol
    if not passed:
        logger.info("Gallery of %s strays %.6g from its segment (diam %.6g)", w.label(), d_h, real.diam)
    return HausdorffReport(
        w=w, word=word, d_h=d_h, bound=real.diam, passed=passed, sampling_step=step, basepoint=x0
    )
