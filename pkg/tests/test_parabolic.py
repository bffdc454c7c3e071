"""Tests for parabolic subgroups: cosets, sphericity, essential subsets, corollary hypotheses."""

from dataclasses import replace

import pytest
from coxeter_walls.coxeter import ball, identity, length, multiply, new_system, normal_form
from coxeter_walls.errors import EmptyTarget, LetterOutOfRange
from coxeter_walls.models import INFINITY, GeneratorSubset
from coxeter_walls.parabolic import (
    check_lemma22,
    components,
    cor15_hypothesis,
    cor16_hypothesis,
    cor17_hypothesis,
    coset_minima,
    coset_rep_counts,
    essential_subset,
    has_finite_index,
    invariant_limit_set,
    is_member,
    maximal_spherical_subsets,
    min_coset_rep,
    parabolic_ball,
    quasi_density_profile,
    sphericity,
    splits_as_product,
    w_singleton_set,
)

T01 = GeneratorSubset.of(0, 1)


@pytest.fixture(scope="module")
def cor17_witness():
    """Rank 3 with m(0,1) = m(0,2) = 3 and m(1,2) = ∞."""
    return new_system(3, [[1, 3, 3], [3, 1, INFINITY], [3, INFINITY, 1]])


@pytest.fixture(scope="module")
def line_times_a1():
    """Infinite dihedral group times a commuting reflection."""
    return new_system(3, [[1, INFINITY, 2], [INFINITY, 1, 2], [2, 2, 1]])


# -------------------------------------------------------------------------
# Cosets
# -------------------------------------------------------------------------


def test_min_coset_rep_strips_left_letters(a2):
    """s · t splits as v = s, x = t for T = {s}."""
    dec = min_coset_rep(normal_form(a2, [0, 1]), GeneratorSubset.of(0))
    assert dec.v.nf == (0,)
    assert dec.x.nf == (1,)


def test_min_coset_rep_without_descents_in_t(a2):
    """t · s has no left descent in {s}, so it is its own representative."""
    dec = min_coset_rep(normal_form(a2, [1, 0]), GeneratorSubset.of(0))
    assert dec.v.is_identity
    assert dec.x.nf == (1, 0)


def test_min_coset_rep_edge_cases(a2t):
    """T = S gives x = 1; T = ∅ gives v = 1."""
    w = normal_form(a2t, [0, 1, 2, 0])
    assert min_coset_rep(w, GeneratorSubset.of(0, 1, 2)).x.is_identity
    assert min_coset_rep(w, GeneratorSubset()).v.is_identity


def test_min_coset_rep_rejects_bad_subset(a2):
    """Subset indices must be generators."""
    with pytest.raises(LetterOutOfRange):
        min_coset_rep(identity(a2), GeneratorSubset.of(5))


def test_decomposition_invariants(c2t):
    """w = v x with lengths adding and v in W_T, over a radius-5 ball."""
    T = GeneratorSubset.of(0, 2)
    for w in ball(c2t, 5):
        dec = min_coset_rep(w, T)
        assert multiply(dec.v, dec.x) == w
        assert length(w) == length(dec.v) + length(dec.x)
        assert set(dec.v.nf) <= T.members


def test_coset_minima_unique(a2t):
    """Brute force finds exactly the representative."""
    w = normal_form(a2t, [1, 0, 2, 1])
    T = GeneratorSubset.of(0, 1)
    x = min_coset_rep(w, T).x
    assert coset_minima(w, T) == [x]


def test_is_member(a2t):
    """Membership in W_T is x = 1."""
    assert is_member(normal_form(a2t, [0, 1, 0]), T01)
    assert not is_member(normal_form(a2t, [0, 2]), T01)


def test_parabolic_ball(a2t):
    """W_{0,2} in affine A2 is a copy of A2."""
    elements = parabolic_ball(a2t, GeneratorSubset.of(0, 2), 5)
    assert len(elements) == 6
    assert all(set(e.nf) <= {0, 2} for e in elements)
    assert elements[0].is_identity


def test_check_lemma22(a2t):
    """The three characterisations agree on a sample element."""
    assert check_lemma22(normal_form(a2t, [2, 1, 0, 2]), T01, 4)


def test_lemma22_sweeps(engine, a2, a2t, c2t, dihedral):
    """Every subset, every element: decomposition, uniqueness, characterisations."""
    for system, radius in ((a2, 6), (dihedral, 6), (a2t, 6), (c2t, 4)):
        result = engine.lemma22_sweep(system, radius)
        assert result.passed, result.witness
        assert result.data["subsets"] == 2**system.rank


def test_coset_rep_counts(a2t, dihedral):
    """Finite index keeps the count of representatives bounded."""
    assert coset_rep_counts(a2t, GeneratorSubset.of(0, 1, 2), [0, 3, 6]) == [1, 1, 1]
    assert coset_rep_counts(dihedral, GeneratorSubset.of(0), [0, 1, 2]) == [1, 2, 3]
    assert coset_rep_counts(a2t, T01, []) == []


# -------------------------------------------------------------------------
# Sphericity
# -------------------------------------------------------------------------


def test_sphericity_orders(a2t, c2t, config):
    """Finite parabolics report their group order."""
    report = sphericity(a2t, T01, config)
    assert report.spherical
    assert report.order == 6
    assert report.exact
    assert sphericity(c2t, T01, config).order == 8
    assert sphericity(c2t, GeneratorSubset.of(0, 2), config).order == 4
    assert sphericity(a2t, GeneratorSubset(), config).order == 1


def test_affine_subset_is_not_spherical(a2t, config):
    """The whole affine group is infinite; its last minor vanishes."""
    report = sphericity(a2t, GeneratorSubset.of(0, 1, 2), config)
    assert not report.spherical
    assert report.order is None
    assert report.minors[-1] == pytest.approx(0.0, abs=1e-12)


def test_sphericity_float_path(config):
    """H3 is finite with positive leading minors computed in floating point."""
    h3 = new_system(3, [[1, 5, 2], [5, 1, 3], [2, 3, 1]])
    report = sphericity(h3, GeneratorSubset.of(0, 1, 2), config)
    assert report.spherical
    assert report.order == 120
    assert not report.exact


def test_sphericity_sweeps(engine, a2, a2t, c2t, a1t_a1t, dihedral):
    """BFS and minors agree on every subset of the acceptance systems."""
    for system in (a2, a2t, c2t, a1t_a1t, dihedral):
        assert engine.sphericity_sweep(system).passed


def test_random_sphericity(config):
    """BFS and minors agree on 200 random matrices of rank at most 4."""
    from coxeter_walls.engine import VerificationEngine

    with VerificationEngine(replace(config, sphericity_cap=20_000)) as engine:
        result = engine.random_sphericity(200)
    assert result.passed, result.witness
    assert result.data["matrices"] == 200


# -------------------------------------------------------------------------
# Diagram structure
# -------------------------------------------------------------------------


def test_components(a1t_a1t):
    """Edges are pairs with m >= 3, including m = ∞."""
    parts = components(a1t_a1t, GeneratorSubset.of(0, 1, 2))
    assert parts == [GeneratorSubset.of(0, 1), GeneratorSubset.of(2)]


def test_essential_subset(a2t, a1t_a1t):
    """The essential subset drops spherical components."""
    assert essential_subset(a2t, GeneratorSubset.of(0, 1, 2)) == GeneratorSubset.of(0, 1, 2)
    assert essential_subset(a2t, T01) == GeneratorSubset()
    assert essential_subset(a1t_a1t, GeneratorSubset.of(0, 1, 2)) == T01


def test_splits_as_product(a1t_a1t, a2t):
    """A factor of a product splits; T spherical splits trivially."""
    assert splits_as_product(a1t_a1t, T01)
    assert splits_as_product(a2t, GeneratorSubset.of(0, 1, 2))
    assert invariant_limit_set(a1t_a1t, T01)


def test_does_not_split():
    """An infinite edge joined to the rest by m = 3 does not split."""
    system = new_system(3, [[1, INFINITY, 2], [INFINITY, 1, 3], [2, 3, 1]])
    assert not splits_as_product(system, T01)
    assert not invariant_limit_set(system, T01)


def test_has_finite_index(a2t, a1t_a1t, line_times_a1):
    """[W : W_T] is finite iff T contains the essential part of S."""
    assert has_finite_index(a2t, GeneratorSubset.of(0, 1, 2))
    assert not has_finite_index(a2t, T01)
    assert not has_finite_index(a1t_a1t, T01)
    assert has_finite_index(line_times_a1, T01)


def test_maximal_spherical_subsets(a2t, dihedral):
    """Maximal spherical subsets in sorted-tuple order."""
    assert maximal_spherical_subsets(a2t) == [
        GeneratorSubset.of(0, 1),
        GeneratorSubset.of(0, 2),
        GeneratorSubset.of(1, 2),
    ]
    assert maximal_spherical_subsets(dihedral) == [GeneratorSubset.of(0), GeneratorSubset.of(1)]


# -------------------------------------------------------------------------
# Corollary hypotheses
# -------------------------------------------------------------------------


def test_w_singleton_set_dihedral(dihedral):
    """Six alternating words ending in s, one per length."""
    elements = w_singleton_set(dihedral, 0, 6)
    assert [e.length for e in elements] == [1, 2, 3, 4, 5, 6]
    assert all(e.nf[-1] == 0 for e in elements)


def test_w_singleton_set_a2(a2):
    """In A2 the longest element has both descents and is excluded."""
    assert [e.nf for e in w_singleton_set(a2, 0, 3)] == [(0,), (1, 0)]


def test_w_singleton_set_bad_generator(a2):
    """s0 must be a generator."""
    with pytest.raises(LetterOutOfRange):
        w_singleton_set(a2, 2, 3)


def test_quasi_density_profile(dihedral, a2t):
    """The worst distance is 0 for the whole ball and r for the identity alone."""
    assert quasi_density_profile(a2t, ball(a2t, 3), 3).worst_distance == 0
    profile = quasi_density_profile(a2t, [identity(a2t)], 3)
    assert profile.worst_distance == 3
    assert profile.witness.length == 3
    with pytest.raises(EmptyTarget):
        quasi_density_profile(dihedral, [], 2)


def test_cor15_dihedral(dihedral):
    """W^{s} in the infinite dihedral group is 1-dense at radius 6."""
    profile, t0 = cor15_hypothesis(dihedral, 0, 6)
    assert profile.worst_distance == 1
    assert t0 == 1


def test_cor15_without_infinite_partner(a2t):
    """No generator has infinite order with s0 in affine A2."""
    _, t0 = cor15_hypothesis(a2t, 0, 3)
    assert t0 is None


def test_cor16_dihedral(dihedral):
    """Every nontrivial element ends in some s; only the identity is at distance 1."""
    assert cor16_hypothesis(dihedral, 5).worst_distance == 1


def test_cor17_witness(cor17_witness):
    """T = {0,1} is maximal spherical and s0 = 2 meets it with orders 3 and ∞."""
    found = cor17_hypothesis(cor17_witness)
    assert found == (GeneratorSubset.of(0, 1), 2)


def test_cor17_absent(a2t):
    """Affine A2 has no infinite order, so the hypothesis fails."""
    assert cor17_hypothesis(a2t) is None
