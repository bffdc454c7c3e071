"""Parabolic subgroups W_T: coset representatives, sphericity, essential subsets."""

from __future__ import annotations

import logging
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from coxeter_walls.backends import get_backend, is_exact_system
from coxeter_walls.coxeter import (
    ball,
    check_subset,
    cosine_matrix,
    cosine_matrix_exact,
    count_elements,
    full_subset,
    identity,
    inverse,
    length,
    multiply,
    normal_form,
    restrict,
)
from coxeter_walls.errors import EmptyTarget, LetterOutOfRange, Undecided
from coxeter_walls.models import (
    INFINITY,
    CosetDecomposition,
    CoxeterSystem,
    Element,
    GeneratorSubset,
    QuasiDensityProfile,
    SphericityReport,
    VerifyConfig,
)
from coxeter_walls.ring import determinant

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = VerifyConfig()


# -------------------------------------------------------------------------
# Cosets
# -------------------------------------------------------------------------


def min_coset_rep(w: Element, T: GeneratorSubset) -> CosetDecomposition:
    """Split w = v * x with v in W_T and x the shortest element of W_T w.

    Strips left descents lying in T, smallest index first. Each step lowers
    the length by one, so this ends after at most l(w) steps.
    """
    system = w.system
    check_subset(system, T)
    backend = get_backend(system)
    x = w
    stripped: list[int] = []
    while True:
        in_T = backend.left_descents(x.nf) & T.members
        if not in_T:
            break
        s = min(in_T)
        stripped.append(s)
        x = normal_form(system, (s,) + x.nf)
    # w = s1 s2 ... sk x
    return CosetDecomposition(w=w, v=normal_form(system, stripped), x=x, T=T)


def is_member(w: Element, T: GeneratorSubset) -> bool:
    return min_coset_rep(w, T).x.is_identity


def parabolic_ball(system: CoxeterSystem, T: GeneratorSubset, radius: int, cap: int | None = None) -> list[Element]:
    """W_T ∩ ball(radius), in (length, ShortLex) order.

    Enumerated inside the restricted system (W_T, T) and relabelled; the
    relabelling is increasing, so ShortLex normal forms carry over.
    """
    check_subset(system, T)
    if not T.members:
        return [identity(system)]
    members = T.sorted()
    kwargs = {} if cap is None else {"cap": cap}
    sub = ball(restrict(system, T), radius, **kwargs)
    return [Element(system, tuple(members[s] for s in u.nf)) for u in sub]


def coset_minima(w: Element, T: GeneratorSubset, bound: int | None = None) -> list[Element]:
    """Shortest elements of W_T w found by brute force.

    Any y in W_T w with l(y) <= bound is u w with l(u) <= bound + l(w), so
    searching W_T ∩ ball(bound + l(w)) sees the whole bottom of the coset.
    ``bound`` defaults to l(w); any known element of the coset gives one.
    """
    bound = length(w) if bound is None else bound
    candidates = {multiply(u, w) for u in parabolic_ball(w.system, T, bound + length(w))}
    shortest = min(length(y) for y in candidates)
    return sorted((y for y in candidates if length(y) == shortest), key=lambda y: y.nf)


def check_lemma22(w: Element, T: GeneratorSubset, radius: int) -> bool:
    """True when x = min_coset_rep(w, T).x satisfies all three characterisations.

    (1) x is shortest in W_T x, (2) l(sx) > l(x) for s in T, (3) l(vx) = l(v) + l(x)
    for every v in W_T ∩ ball(radius); plus the decomposition invariants.
    """
    dec = min_coset_rep(w, T)
    v, x = dec.v, dec.x
    if multiply(v, x) != w or length(w) != length(v) + length(x):
        return False
    if not set(v.nf) <= T.members:
        return False

    ascends = all(length(normal_form(w.system, (s,) + x.nf)) > length(x) for s in T)

    shortest = True
    additive = True
    for u in parabolic_ball(w.system, T, radius):
        y = multiply(u, x)
        if length(y) != length(u) + length(x):
            additive = False
        if length(y) < length(x) or (length(y) == length(x) and not u.is_identity):
            shortest = False
    if not (ascends and shortest and additive):
        logger.debug(
            "Coset characterisations disagree for w=%s T={%s}: %s %s %s",
            w.label(), T.label(), shortest, ascends, additive,
        )
        return False
    return True


def coset_rep_counts(system: CoxeterSystem, T: GeneratorSubset, radii: Iterable[int]) -> list[int]:
    """Minimal representatives of the cosets W_T w inside ball(r), for each r."""
    radii = list(radii)
    if not radii:
        return []
    check_subset(system, T)
    backend = get_backend(system)
    per_length = [0] * (max(radii) + 1)
    for e in ball(system, max(radii)):
        if not backend.left_descents(e.nf) & T.members:
            per_length[len(e.nf)] += 1
    return [sum(per_length[: r + 1]) for r in radii]


# -------------------------------------------------------------------------
# Sphericity
# -------------------------------------------------------------------------


def _leading_minors(sub: CoxeterSystem, tol: float) -> tuple[tuple[float, ...], bool, bool, bool]:
    """(minors of B, exact, positive definite, some minor numerically zero)."""
    n = sub.rank
    if is_exact_system(sub):
        block = cosine_matrix_exact(sub)
        dets = [determinant([row[:k] for row in block[:k]]) for k in range(1, n + 1)]
        # det(2B_k) = 2^k det(B_k): same sign
        minors = tuple(float(d) / 2**k for k, d in enumerate(dets, start=1))
        return minors, True, all(d.sign > 0 for d in dets), any(d.sign == 0 for d in dets)

    B = cosine_matrix(sub)
    minors = tuple(float(np.linalg.det(B[:k, :k])) for k in range(1, n + 1))
    return minors, False, all(m > tol for m in minors), any(abs(m) <= tol for m in minors)


@lru_cache(maxsize=4096)
def sphericity(system: CoxeterSystem, T: GeneratorSubset, config: VerifyConfig = DEFAULT_CONFIG) -> SphericityReport:
    """Decide whether W_T is finite by BFS and by positive-definiteness of B_T.

    Raises:
        Undecided: if the two methods disagree
    """
    check_subset(system, T)
    if not T.members:
        return SphericityReport(T=T, spherical=True, order=1, minors=(), exact=True)

    sub = restrict(system, T)
    order = count_elements(sub, config.sphericity_cap)
    minors, exact, definite, borderline = _leading_minors(sub, config.minor_tol)
    finite = order is not None
    if finite != definite:
        if not finite and borderline:
            raise Undecided(
                f"W_{{{T.label()}}}: BFS passed cap {config.sphericity_cap} "
                f"and a leading minor is within {config.minor_tol} of 0"
            )
        raise Undecided(
            f"W_{{{T.label()}}}: BFS says {'finite' if finite else 'beyond cap'} "
            f"but minors {minors} say {'definite' if definite else 'not definite'}"
        )
    logger.debug("W_{%s} spherical=%s order=%s", T.label(), finite, order)
    return SphericityReport(T=T, spherical=finite, order=order, minors=minors, exact=exact)


def is_spherical(system: CoxeterSystem, T: GeneratorSubset, config: VerifyConfig = DEFAULT_CONFIG) -> bool:
    return sphericity(system, T, config).spherical


def components(system: CoxeterSystem, T: GeneratorSubset) -> list[GeneratorSubset]:
    """Connected components of the Coxeter diagram on T (edges where m >= 3)."""
    check_subset(system, T)
    remaining = set(T.members)
    parts = []
    while remaining:
        start = min(remaining)
        seen = {start}
        stack = [start]
        while stack:
            s = stack.pop()
            for t in remaining:
                if t not in seen and system.m(s, t) >= 3:
                    seen.add(t)
                    stack.append(t)
        remaining -= seen
        parts.append(GeneratorSubset(frozenset(seen)))
    return parts


def essential_subset(system: CoxeterSystem, T: GeneratorSubset, config: VerifyConfig = DEFAULT_CONFIG) -> GeneratorSubset:
    """T~: the union of the non-spherical components of T."""
    out: frozenset[int] = frozenset()
    for part in components(system, T):
        if not is_spherical(system, part, config):
            out |= part.members
    return GeneratorSubset(out)


def splits_as_product(system: CoxeterSystem, T: GeneratorSubset, config: VerifyConfig = DEFAULT_CONFIG) -> bool:
    """W = W_T~ x W_{S - T~}: every order between T~ and the rest is 2."""
    essential = essential_subset(system, T, config)
    rest = full_subset(system) - essential
    return all(system.m(s, t) == 2 for s in essential for t in rest)


def invariant_limit_set(system: CoxeterSystem, T: GeneratorSubset, config: VerifyConfig = DEFAULT_CONFIG) -> bool:
    """Whether the limit set of W_T is W-invariant, read off the product splitting."""
    return splits_as_product(system, T, config)


def has_finite_index(system: CoxeterSystem, T: GeneratorSubset, config: VerifyConfig = DEFAULT_CONFIG) -> bool:
    check_subset(system, T)
    return essential_subset(system, full_subset(system), config) <= T


def maximal_spherical_subsets(system: CoxeterSystem, config: VerifyConfig = DEFAULT_CONFIG) -> list[GeneratorSubset]:
    """Spherical subsets with no spherical strict superset, in sorted-tuple order."""
    spherical = [
        GeneratorSubset(frozenset(combo))
        for size in range(system.rank + 1)
        for combo in combinations(system.generators, size)
        if is_spherical(system, GeneratorSubset(frozenset(combo)), config)
    ]
    maximal = [T for T in spherical if not any(T < U for U in spherical)]
    return sorted(maximal, key=GeneratorSubset.sorted)


# -------------------------------------------------------------------------
# Hypotheses of the corollaries
# -------------------------------------------------------------------------


def w_singleton_set(system: CoxeterSystem, s0: int, radius: int) -> list[Element]:
    """Nontrivial elements of ball(radius) whose right descents lie in {s0}."""
    if not 0 <= s0 < system.rank:
        raise LetterOutOfRange(s0, system.rank)
    backend = get_backend(system)
    return [
        e for e in ball(system, radius)
        if not e.is_identity and backend.right_descents(e.nf) <= {s0}
    ]


def quasi_density_profile(system: CoxeterSystem, target: Iterable[Element], radius: int) -> QuasiDensityProfile:
    """Worst word distance from ball(radius) to ``target``.

    Raises:
        EmptyTarget: if target is empty
    """
    target = list(target)
    if not target:
        raise EmptyTarget(f"Quasi-density target is empty at radius {radius}")
    worst, witness = -1, None
    for w in ball(system, radius):
        w_inv = inverse(w)
        d = min(length(multiply(w_inv, a)) for a in target)
        if d > worst:
            worst, witness = d, w
    return QuasiDensityProfile(radius=radius, worst_distance=worst, witness=witness)


def cor15_hypothesis(system: CoxeterSystem, s0: int, radius: int) -> tuple[QuasiDensityProfile, int | None]:
    """Profile of W^{s0} in ball(radius) and the first t0 with o(s0 t0) = ∞ (None if absent)."""
    profile = quasi_density_profile(system, w_singleton_set(system, s0, radius), radius)
    t0 = next((t for t in system.generators if system.m(s0, t) == INFINITY), None)
    return profile, t0


def cor16_target(system: CoxeterSystem, radius: int) -> list[Element]:
    """Union of W^{s} over the s lying in some infinite-order pair."""
    chosen = [s for s in system.generators if any(system.m(s, t) == INFINITY for t in system.generators)]
    seen: dict = {}
    for s in chosen:
        for e in w_singleton_set(system, s, radius):
            seen.setdefault(e.nf, e)
    return [seen[nf] for nf in sorted(seen, key=lambda nf: (len(nf), nf))]


def cor16_hypothesis(system: CoxeterSystem, radius: int) -> QuasiDensityProfile:
    return quasi_density_profile(system, cor16_target(system, radius), radius)


def cor17_hypothesis(system: CoxeterSystem, config: VerifyConfig = DEFAULT_CONFIG) -> tuple[GeneratorSubset, int] | None:
    """First (T, s0) with T maximal spherical, o(s0 t) >= 3 on T, o(s0 t0) = ∞ for some t0."""
    for T in maximal_spherical_subsets(system, config):
        for s0 in system.generators:
            if s0 in T or not T.members:
                continue
            orders = [system.m(s0, t) for t in T]
            if all(m >= 3 for m in orders) and any(m == INFINITY for m in orders):
                return T, s0
    return None
