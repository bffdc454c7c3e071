"""Verification engine: runs sweeps over balls and subsets and collects CheckResults."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache, partial
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from coxeter_walls.backends import MatrixOracle, is_exact_system
from coxeter_walls.checks import (
    check_cocompact_rays,
    check_convexity,
    check_finite_index_limits,
    check_halfspace_rep,
    check_lemma0,
    check_lemma1,
    check_lemma31,
    check_lemma32,
    limit_directions,
    max_angular_gap,
)
from coxeter_walls.coxeter import ball, clear_ball_cache, full_subset, new_system, normal_form
from coxeter_walls.errors import Undecided
from coxeter_walls.galleries import check_geodesic_theorem
from coxeter_walls.geometry import build_realization, clear_affine_cache
from coxeter_walls.models import (
    INFINITY,
    CheckResult,
    CoxeterSystem,
    Element,
    EuclideanRealization,
    GeneratorSubset,
    VerifyConfig,
)
from coxeter_walls.parabolic import (
    check_lemma22,
    coset_minima,
    has_finite_index,
    min_coset_rep,
    parabolic_ball,
    sphericity,
)

logger = logging.getLogger(__name__)

RANDOM_ORDERS = (2, 3, 4, 5, 6, INFINITY)


def all_subsets(system: CoxeterSystem, proper: bool = False) -> list[GeneratorSubset]:
    """Every subset of S in (size, sorted tuple) order; ``proper`` drops S itself."""
    top = system.rank - 1 if proper else system.rank
    return [
        GeneratorSubset(frozenset(combo))
        for size in range(top + 1)
        for combo in combinations(system.generators, size)
    ]


def random_system(rng: np.random.Generator, max_rank: int = 4) -> CoxeterSystem:
    """Random Coxeter matrix of rank 1..max_rank with off-diagonal orders from RANDOM_ORDERS."""
    rank = int(rng.integers(1, max_rank + 1))
    orders = [[1.0] * rank for _ in range(rank)]
    for s in range(rank):
        for t in range(s + 1, rank):
            m = RANDOM_ORDERS[int(rng.integers(len(RANDOM_ORDERS)))]
            orders[s][t] = orders[t][s] = m
    return new_system(rank, orders)


# -------------------------------------------------------------------------
# Per-item tasks (module level so a process pool can pickle them)
# -------------------------------------------------------------------------


@lru_cache(maxsize=8)
def _oracle(system: CoxeterSystem) -> MatrixOracle:
    return MatrixOracle(system)


def _oracle_task(system: CoxeterSystem, e: Element) -> tuple | None:
    oracle = _oracle(system)
    for s in system.generators:
        word = e.nf + (s,)
        if not oracle.same_element(normal_form(system, word).nf, word):
            return word
    return None


def _braid_task(system: CoxeterSystem, e: Element) -> tuple | None:
    for s in system.generators:
        word = e.nf + (s,)
        if normal_form(system, word, backend="braid") != normal_form(system, word, backend="roots"):
            return word
    return None


def _lemma22_task(radius: int, subsets: Sequence[GeneratorSubset], w: Element) -> tuple | None:
    for T in subsets:
        if not check_lemma22(w, T, radius):
            return (w, T)
        x = min_coset_rep(w, T).x
        if coset_minima(w, T, bound=len(x.nf)) != [x]:
            return (w, T)
    return None


def _pair_task(check: Callable, real: EuclideanRealization, config: VerifyConfig, w: Element) -> tuple | None:
    for s in real.system.generators:
        if not check(real, w, s, config):
            return (w, s)
    return None


def _conjugate_task(
    real: EuclideanRealization, config: VerifyConfig, item: tuple[GeneratorSubset, Element]
) -> tuple | None:
    T, w = item
    for s in real.system.generators:
        if s not in T and not check_lemma1(real, w, s, T, config):
            return (T, w, s)
    return None


def _element_task(check: Callable, real: EuclideanRealization, config: VerifyConfig, w: Element) -> Element | None:
    return None if check(real, w, config) else w


def _geodesic_task(real: EuclideanRealization, config: VerifyConfig, w: Element) -> tuple[float, bool, Element]:
    report = check_geodesic_theorem(real, w, config)
    return report.d_h, report.passed, w


def _sphericity_task(config: VerifyConfig, system: CoxeterSystem) -> bool:
    try:
        sphericity(system, full_subset(system), config)
    except Undecided:
        return False
    return True


class VerificationEngine:
    """Runs verification sweeps, optionally fanned out over worker processes."""

    def __init__(self, config: VerifyConfig):
        self.config = config
        self._pool = ProcessPoolExecutor(config.workers) if config.workers > 1 else None
        self._realizations: dict[CoxeterSystem, EuclideanRealization] = {}

    def close(self) -> None:
        """Shut down the worker pool and drop cached balls and affine maps."""
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None
        self._realizations.clear()
        clear_ball_cache()
        clear_affine_cache()

    def __enter__(self) -> VerificationEngine:
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.close()

    def _map(self, fn: Callable, items: Iterable) -> list:
        """Ordered map, in the pool when there is one."""
        items = list(items)
        if self._pool is None:
            return [fn(item) for item in items]
        chunk = max(1, len(items) // (4 * self.config.workers))
        return list(self._pool.map(fn, items, chunksize=chunk))

    def realization(self, system: CoxeterSystem) -> EuclideanRealization:
        if system not in self._realizations:
            self._realizations[system] = build_realization(system, self.config)
        return self._realizations[system]

    def _ball(self, system: CoxeterSystem, radius: int) -> list[Element]:
        return ball(system, radius, self.config.ball_cap)

    @staticmethod
    def _first_failure(outcomes: list, check: str, data: dict) -> CheckResult:
        failures = [o for o in outcomes if o is not None]
        data = {**data, "failures": len(failures)}
        if failures:
            logger.info("%s: %d failures, first %s", check, len(failures), failures[0])
        return CheckResult(check=check, passed=not failures, data=data, witness=failures[0] if failures else None)

    # -------------------------------------------------------------------------
    # Combinatorics
    # -------------------------------------------------------------------------

    def oracle_agreement(self, system: CoxeterSystem, radius: int) -> CheckResult:
        """Normal forms against the exact matrix representation on ball(radius).

        Distinct normal forms must have distinct matrices, and e*s must
        reduce to an element with the same matrix as the word e.nf + (s,).
        """
        if not is_exact_system(system):
            raise ValueError(f"Matrix oracle needs orders in {{2,3,4,6,inf}} for {system.name or 'system'}")
        elements = self._ball(system, radius)
        oracle = _oracle(system)
        distinct = len({oracle.matrix(e.nf) for e in elements})
        outcomes = self._map(partial(_oracle_task, system), elements)
        result = self._first_failure(outcomes, "oracle", {"radius": radius, "elements": len(elements)})
        result.data["distinct_matrices"] = distinct
        if distinct != len(elements):
            result.passed = False
        return result

    def backend_agreement(self, system: CoxeterSystem, radius: int) -> CheckResult:
        """Braid-move and root backends give the same normal forms on ball(radius) times S."""
        elements = self._ball(system, radius)
        outcomes = self._map(partial(_braid_task, system), elements)
        return self._first_failure(outcomes, "backends", {"radius": radius, "elements": len(elements)})

    def lemma22_sweep(self, system: CoxeterSystem, radius: int, subsets: Sequence[GeneratorSubset] | None = None) -> CheckResult:
        """Coset decompositions for every w in ball(radius) and every subset T, checked by brute force."""
        subsets = all_subsets(system) if subsets is None else list(subsets)
        elements = self._ball(system, radius)
        outcomes = self._map(partial(_lemma22_task, radius, subsets), elements)
        return self._first_failure(
            outcomes, "lemma22", {"radius": radius, "elements": len(elements), "subsets": len(subsets)}
        )

    def sphericity_sweep(self, system: CoxeterSystem) -> CheckResult:
        """Group count and leading minors agree on every subset of S."""
        reports = []
        for T in all_subsets(system):
            try:
                reports.append(sphericity(system, T, self.config))
            except Undecided:
                return CheckResult(check="sphericity", passed=False, data={"subsets": len(reports)}, witness=T)
        data = {
            "subsets": len(reports),
            "spherical": [list(r.T.sorted()) for r in reports if r.spherical],
        }
        return CheckResult(check="sphericity", passed=True, data=data)

    def random_sphericity(self, count: int, max_rank: int = 4) -> CheckResult:
        """Both sphericity tests agree on ``count`` seeded random Coxeter matrices."""
        rng = np.random.default_rng(self.config.seed)
        systems = [random_system(rng, max_rank) for _ in range(count)]
        agree = self._map(partial(_sphericity_task, self.config), systems)
        failures = [s.file_matrix() for s, ok in zip(systems, agree) if not ok]
        return CheckResult(
            check="random_sphericity",
            passed=not failures,
            data={"matrices": count, "failures": len(failures), "cap": self.config.sphericity_cap},
            witness=failures[0] if failures else None,
        )

    # -------------------------------------------------------------------------
    # Geometry
    # -------------------------------------------------------------------------

    def lemma0_sweep(self, system: CoxeterSystem, radius: int) -> CheckResult:
        """Side of the wall of s against l(sw) for every (w, s) with w in ball(radius)."""
        real = self.realization(system)
        elements = self._ball(system, radius)
        outcomes = self._map(partial(_pair_task, check_lemma0, real, self.config), elements)
        return self._first_failure(outcomes, "lemma0", {"radius": radius, "elements": len(elements)})

    def lemma1_sweep(
        self, system: CoxeterSystem, radius: int, subsets: Sequence[GeneratorSubset] | None = None
    ) -> CheckResult:
        """w X_s^+ against the wall of w s w^-1 for w in W_T ∩ ball(radius) and s not in T.

        Runs over every proper subset T unless ``subsets`` is given.
        """
        real = self.realization(system)
        subsets = all_subsets(system, proper=True) if subsets is None else list(subsets)
        pairs = [
            (T, w) for T in subsets for w in parabolic_ball(system, T, radius, self.config.ball_cap)
        ]
        outcomes = self._map(partial(_conjugate_task, real, self.config), pairs)
        return self._first_failure(
            outcomes, "lemma1", {"radius": radius, "subsets": len(subsets), "elements": len(pairs)}
        )

    def lemma31_sweep(self, system: CoxeterSystem, radius: int) -> CheckResult:
        real = self.realization(system)
        elements = self._ball(system, radius)
        outcomes = self._map(partial(_element_task, check_lemma31, real, self.config), elements)
        return self._first_failure(outcomes, "lemma31", {"radius": radius, "elements": len(elements)})

    def lemma32_sweep(self, system: CoxeterSystem, radius: int) -> CheckResult:
        real = self.realization(system)
        elements = self._ball(system, radius)
        outcomes = self._map(partial(_element_task, check_lemma32, real, self.config), elements)
        return self._first_failure(outcomes, "lemma32", {"radius": radius, "elements": len(elements)})

    def geodesic_sweep(self, system: CoxeterSystem, radius: int) -> CheckResult:
        """Largest Hausdorff distance between [x0, w x0] and its gallery over ball(radius)."""
        real = self.realization(system)
        elements = self._ball(system, radius)
        outcomes = self._map(partial(_geodesic_task, real, self.config), elements)
        worst_d, _, worst_w = max(outcomes, key=lambda o: o[0])
        failures = [w for _, ok, w in outcomes if not ok]
        return CheckResult(
            check="geodesic",
            passed=not failures,
            data={
                "radius": radius,
                "elements": len(elements),
                "max_d_h": worst_d,
                "diam": real.diam,
                "sampling_step": real.diam * self.config.hausdorff_fraction,
                "failures": len(failures),
            },
            witness=failures[0] if failures else worst_w,
        )

    def convexity_sweep(
        self, system: CoxeterSystem, trials: int, subsets: Sequence[GeneratorSubset] | None = None
    ) -> CheckResult:
        """Midpoint test for each subset (every proper subset by default)."""
        real = self.realization(system)
        subsets = all_subsets(system, proper=True) if subsets is None else list(subsets)
        outcomes = [None if check_convexity(real, T, trials, self.config) else T for T in subsets]
        return self._first_failure(outcomes, "convexity", {"trials": trials, "subsets": len(subsets)})

    def halfspace_sweep(
        self,
        system: CoxeterSystem,
        radius: int,
        samples: int,
        subsets: Sequence[GeneratorSubset] | None = None,
    ) -> CheckResult:
        """Box samples against the truncated wall description, per subset.

        A subset whose truncation cannot be certified at this radius counts
        as a failure and is listed under ``uncertified``.
        """
        real = self.realization(system)
        subsets = all_subsets(system, proper=True) if subsets is None else list(subsets)
        outcomes, uncertified = [], []
        for T in subsets:
            try:
                outcomes.append(None if check_halfspace_rep(real, T, radius, samples, self.config) else T)
            except Undecided:
                uncertified.append(T)
                outcomes.append(T)
        result = self._first_failure(
            outcomes, "halfspace", {"radius": radius, "samples": samples, "subsets": len(subsets)}
        )
        result.data["uncertified"] = [list(T.sorted()) for T in uncertified]
        return result

    def limits(self, system: CoxeterSystem, T: GeneratorSubset, radius: float) -> CheckResult:
        """Limit directions of W_T and their agreement with the far chamber vertices."""
        real = self.realization(system)
        found = limit_directions(real, T, radius, self.config)
        data = {
            "radius": radius,
            "subset": T,
            "directions": found.directions,
            "count": len(found.directions),
            "max_mismatch": found.max_mismatch,
        }
        if real.dim == 2 and len(found.directions):
            data["max_gap_degrees"] = float(np.degrees(max_angular_gap(found.directions)))
        return CheckResult(check="limits", passed=found.matches, data=data)

    def cor12_sweep(self, system: CoxeterSystem, radius: float) -> CheckResult:
        """Finite index against full direction coverage, for every subset."""
        real = self.realization(system)
        subsets = all_subsets(system)
        outcomes = [
            None if check_finite_index_limits(real, T, radius, self.config) else T for T in subsets
        ]
        result = self._first_failure(outcomes, "cor12", {"radius": radius, "subsets": len(subsets)})
        result.data["finite_index"] = [
            list(T.sorted()) for T in subsets if has_finite_index(system, T, self.config)
        ]
        return result

    def rays(self, system: CoxeterSystem, T: GeneratorSubset, radius: float) -> CheckResult:
        real = self.realization(system)
        passed = check_cocompact_rays(real, T, radius, self.config)
        return CheckResult(
            check="rays", passed=passed, data={"radius": radius, "subset": T, "diam": real.diam}
        )
