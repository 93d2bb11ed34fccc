"""Braid words, representations, characters, and Thoma values."""

import numpy as np
import pytest

import rmlab
from rmlab import (
    BraidWord,
    CycleType,
    character,
    characters_equal,
    flip_conjugate,
    fundamental_braid,
    intertwiner_Y,
    represent,
    thoma_character,
    underlying_permutation,
)
from rmlab.errors import DomainError

RNG = np.random.default_rng(4242)


def test_free_reduction():
    w = BraidWord.from_ints([1, 2, -2, -1, 3])
    assert w.to_ints() == [3]
    assert len(BraidWord.from_ints([1, -1])) == 0


def test_word_validation():
    with pytest.raises(DomainError):
        BraidWord.from_ints([0])
    with pytest.raises(DomainError):
        BraidWord(2, ((3, 1),))  # generator out of range
    with pytest.raises(DomainError):
        BraidWord(2, ((1, 2),))  # exponent must be +-1


def test_inverse_concat_reduces_to_identity():
    w = BraidWord.from_ints([1, 2, 1, -3, 2])
    assert len(w.concat(w.inverse())) == 0


def test_underlying_permutation():
    # b1 b2 in B3 sends strand positions cyclically
    w = BraidWord.from_ints([1, 2])
    assert underlying_permutation(w) == (1, 2, 0)
    assert underlying_permutation(
        BraidWord.from_ints([1, 1], strands=3)
    ) == (0, 1, 2)


def test_represent_is_homomorphism():
    r = rmlab.builtin("r3")
    v = BraidWord.from_ints([1, 2], strands=3)
    w = BraidWord.from_ints([2, -1], strands=3)
    lhs = represent(r, v.concat(w))
    rhs = represent(r, v).matrix @ represent(r, w).matrix
    assert np.allclose(lhs.matrix, rhs, atol=1e-12)


def test_represent_inverse_is_adjoint():
    r = rmlab.builtin("r2")
    w = BraidWord.from_ints([1, 2, 1])
    m = represent(r, w).matrix
    mi = represent(r, w.inverse()).matrix
    assert np.allclose(m @ mi, np.eye(m.shape[0]), atol=1e-12)


def test_character_is_tracial():
    r = rmlab.builtin("r3")
    v = BraidWord.from_ints([1, 2, 2], strands=3)
    w = BraidWord.from_ints([-2, 1], strands=3)
    assert character(r, v.concat(w)) == pytest.approx(
        character(r, w.concat(v)), abs=1e-12
    )


def test_character_of_empty_word():
    r = rmlab.builtin("r2")
    assert character(r, BraidWord(4)) == pytest.approx(1.0)


def test_character_flip_single_generator():
    assert character(rmlab.make_flip(2), BraidWord.from_ints([1])) == (
        pytest.approx(0.5)
    )
    assert character(rmlab.make_flip(3), BraidWord.from_ints([1])) == (
        pytest.approx(1.0 / 3.0)
    )


def test_character_trivial_powers():
    r = rmlab.make_trivial(2, -1.0)
    assert character(r, BraidWord.from_ints([1, 1])) == pytest.approx(1.0)
    assert character(r, BraidWord.from_ints([1])) == pytest.approx(-1.0)


def test_fundamental_braid_center():
    # the square of the fundamental braid generates the center of B_n;
    # its image must commute with every generator image
    r = rmlab.builtin("r3")
    n = 3
    delta = fundamental_braid(n)
    full = delta.concat(delta)
    img = represent(r, full).matrix
    for gen in range(1, n):
        g = represent(r, BraidWord.from_ints([gen], strands=n)).matrix
        assert np.allclose(img @ g, g @ img, atol=1e-10)


def test_intertwiner_relates_conjugate_representations():
    # Y_n carries the level-n image of R to the image of F R F
    r = rmlab.builtin("r2")
    s = flip_conjugate(r)
    for n in (2, 3):
        y = intertwiner_Y(r, n)
        w = BraidWord.from_ints(list(range(1, n)), strands=n)
        a = represent(r, w).matrix
        b = represent(s, w).matrix
        assert np.allclose(y.matrix @ a @ y.matrix.conj().T, b, atol=1e-10)


def test_cycle_type_validation():
    ct = CycleType(((2, 1), (1, 2)))
    assert dict(ct.items()) == {2: 1}  # fixed points are dropped
    with pytest.raises(DomainError):
        CycleType(((2, 0),))


def test_thoma_character_flip():
    # the flip on C^d has all Thoma weights 1/d with positive sign
    spec = rmlab.NormalFormSpec(((1, 1),) * 3)
    assert thoma_character(spec, CycleType(((2, 1),))) == pytest.approx(
        1.0 / 3.0
    )
    assert thoma_character(spec, CycleType(((3, 1),))) == pytest.approx(
        1.0 / 9.0
    )


def test_thoma_character_signs():
    # a negative block contributes (-1)^(n-1) on an n-cycle
    spec = rmlab.NormalFormSpec(((1, -1),))
    assert thoma_character(spec, CycleType(((2, 1),))) == pytest.approx(-1.0)
    assert thoma_character(spec, CycleType(((3, 1),))) == pytest.approx(1.0)


def test_thoma_matches_direct_traces():
    words = {
        ((2, 1),): [1],
        ((2, 2),): [1, 3],
        ((3, 1),): [1, 2],
        ((4, 1),): [1, 2, 3],
    }
    for t in range(8):
        d = int(RNG.integers(2, 6))
        spec = rmlab.random_normal_form_spec(d, RNG)
        r = rmlab.random_conjugate(rmlab.make_normal_form(spec), RNG)
        for cyc, ints in words.items():
            want = thoma_character(spec, CycleType(cyc))
            got = character(r, BraidWord.from_ints(ints, strands=4))
            assert abs(want - got) <= 1e-9, (spec.blocks, cyc)


def test_characters_equal_reflexive_and_flip_conjugation():
    r = rmlab.builtin("r2")
    cmp1 = characters_equal(r, r)
    assert cmp1.equal
    # flip conjugation preserves the character
    cmp2 = characters_equal(r, flip_conjugate(r), max_strands=3, max_len=4)
    assert cmp2.equal
    assert cmp2.deviation <= 1e-10


def test_characters_differ_with_witness():
    cmp = characters_equal(
        rmlab.make_flip(2), rmlab.builtin("r2"), max_strands=3, max_len=4
    )
    assert not cmp.equal
    assert cmp.witness is not None
    w = BraidWord.from_ints(list(cmp.witness))
    assert abs(
        character(rmlab.make_flip(2), w) - character(rmlab.builtin("r2"), w)
    ) == pytest.approx(cmp.deviation, rel=1e-6)


def test_quasifree_conjugation_preserves_characters():
    r = rmlab.builtin("r3")
    u = np.linalg.qr(
        RNG.standard_normal((2, 2)) + 1j * RNG.standard_normal((2, 2))
    )[0]
    s = rmlab.quasifree_conjugate(r, u)
    for ints in ([1], [1, 2], [1, 1], [2, 1, 2]):
        w = BraidWord.from_ints(ints, strands=3)
        assert character(r, w) == pytest.approx(character(s, w), abs=1e-11)
