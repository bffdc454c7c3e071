"""Tests for normal forms and the word-problem backends."""

import numpy as np
import pytest
from coxeter_walls.backends import BraidBackend, MatrixOracle, RootBackend, get_backend, ring_kind
from coxeter_walls.coxeter import all_reduced_words, ball, ball_sizes, is_reduced, new_system, normal_form
from coxeter_walls.errors import LetterOutOfRange


def test_reduce_doubled_letter(a2t):
    """s t s s collapses to s t."""
    assert normal_form(a2t, [0, 1, 0, 0]).nf == (0, 1)


def test_braid_relation_picks_shortlex_word(a2):
    """sts = tst in A2; the ShortLex representative starts with 0."""
    assert normal_form(a2, [1, 0, 1]).nf == (0, 1, 0)
    assert normal_form(a2, [0, 1, 0, 1]).nf == (1, 0)


def test_commuting_generators(c2t):
    """m(0,2) = 2, so 2 0 reduces to 0 2."""
    assert normal_form(c2t, [2, 0]).nf == (0, 2)


def test_infinite_dihedral_never_cancels(dihedral):
    """Alternating words are the only reduced words and all are distinct."""
    assert normal_form(dihedral, [0, 1] * 5).nf == (0, 1) * 5
    assert normal_form(dihedral, [0, 1, 1, 0]).nf == ()


def test_letter_out_of_range(a2):
    """Letters must index generators."""
    with pytest.raises(LetterOutOfRange, match="not a generator index"):
        normal_form(a2, [0, 2])


def test_ring_choice(a2t, c2t):
    """Plain integers for {2,3,∞}, Z[√2,√3] for 4 and 6, floats otherwise."""
    h3 = new_system(3, [[1, 5, 2], [5, 1, 3], [2, 3, 1]])
    assert ring_kind(a2t) == "int"
    assert ring_kind(c2t) == "quad"
    assert ring_kind(h3) == "float"
    assert not RootBackend(h3).exact


def test_integer_ring_rejects_other_orders(c2t):
    """Requesting integer roots for m = 4 is an error."""
    with pytest.raises(ValueError, match="Integer roots"):
        RootBackend(c2t, ring="int")


def test_backends_agree_on_examples(c2t):
    """Braid moves and root stripping produce the same normal forms."""
    braid = BraidBackend(c2t)
    roots = RootBackend(c2t)
    for word in [(0, 1, 0, 1), (1, 0, 1, 0, 1), (2, 1, 2, 1, 0), (0, 2, 1, 2, 0, 1)]:
        assert braid.normal_form(word) == roots.normal_form(word)


def test_backend_selection(a2t):
    """auto and roots select the root backend; braid selects Tits' algorithm."""
    assert isinstance(get_backend(a2t, "auto"), RootBackend)
    assert isinstance(get_backend(a2t, "braid"), BraidBackend)
    with pytest.raises(ValueError, match="Unknown word backend"):
        get_backend(a2t, "magic")


def test_ball_sizes(a2, a2t, dihedral):
    """Growth: A2 has 6 elements, the infinite dihedral group grows by 2, affine A2 by 3n."""
    assert ball_sizes(a2, 3) == [1, 3, 5, 6]
    assert ball_sizes(dihedral, 3) == [1, 3, 5, 7]
    assert ball_sizes(a2t, 3) == [1, 4, 10, 19]


def test_ball_order(a2):
    """Balls are sorted by length, then ShortLex."""
    assert [e.nf for e in ball(a2, 3)] == [(), (0,), (1,), (0, 1), (1, 0), (0, 1, 0)]


def test_ball_matches_oracle(a2t, c2t):
    """Distinct normal forms have distinct exact matrices."""
    for system in (a2t, c2t):
        oracle = MatrixOracle(system)
        elements = ball(system, 6)
        assert len({oracle.matrix(e.nf) for e in elements}) == len(elements)


def test_oracle_needs_exact_orders():
    """m = 5 has no exact representation in the ring."""
    h3 = new_system(3, [[1, 5, 2], [5, 1, 3], [2, 3, 1]])
    with pytest.raises(ValueError, match="Matrix oracle"):
        MatrixOracle(h3)


def test_float_backend_on_h3():
    """The longest element of H3 has length 15."""
    h3 = new_system(3, [[1, 5, 2], [5, 1, 3], [2, 3, 1]])
    assert ball_sizes(h3, 20)[-1] == 120
    assert max(e.length for e in ball(h3, 20)) == 15


def test_is_reduced(a2):
    """A word is reduced when normalising keeps its length."""
    assert is_reduced(a2, [0, 1, 0])
    assert not is_reduced(a2, [0, 1, 0, 1])


def test_all_reduced_words(a2):
    """The longest element of A2 has exactly two reduced words."""
    w0 = normal_form(a2, [0, 1, 0])
    assert all_reduced_words(w0) == {(0, 1, 0), (1, 0, 1)}


def test_deletion_property(c2t):
    """A non-reduced word has two letters whose removal leaves the same element."""
    rng = np.random.default_rng(0)
    for _ in range(200):
        word = [int(s) for s in rng.integers(0, c2t.rank, size=rng.integers(0, 11))]
        if is_reduced(c2t, word):
            continue
        w = normal_form(c2t, word)
        assert any(
            normal_form(c2t, word[:i] + word[i + 1 : j] + word[j + 1 :]) == w
            for i in range(len(word))
            for j in range(i + 1, len(word))
        ), word


def test_oracle_agreement_sweep(engine, a2, a2t, c2t, a1t_a1t, dihedral):
    """Normal forms agree with the matrix oracle on radius-8 balls."""
    for system in (a2, a2t, c2t, a1t_a1t, dihedral):
        result = engine.oracle_agreement(system, 8)
        assert result.passed, result.witness
        assert result.data["distinct_matrices"] == result.data["elements"]


def test_braid_backend_sweep(engine, a2t, c2t):
    """The braid backend agrees with the root backend on radius-4 balls."""
    for system in (a2t, c2t):
        assert engine.backend_agreement(system, 4).passed
