import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emzv.coeffring import CoeffElem, bernoulli, shipped_table
from emzv.derlie import (
    LieVec,
    NCDerivation,
    assoc_bracket,
    build_D_derivation,
    eps_apply,
    eps_derivation,
    eps_tilde_nc,
    even_words,
    expand_lyndon,
    find_lie_relations,
    fourier_membership,
    lie_dimension,
    lyndon_words,
    relation_tensor_elements,
    standard_factorization,
    to_E0_basis,
    to_lie_coords,
    uu_dual_membership,
    word_operator,
)
from emzv.eisalg import EPoly, epoly_mul, shuffle_words
from emzv.errors import TruncationOverflow
from emzv.ncalg import NCSeries, build_Ainf, build_ytilde, nc_bracket

F = Fraction
XY = {"x": F(1)}
Y = {"y": F(1)}


def test_lyndon_words_small():
    words = [w for w in lyndon_words(4) if len(w) <= 3]
    assert words == sorted(
        ["x", "y", "xy", "xxy", "xyy"], key=lambda s: (len(s), s)
    )
    assert standard_factorization("xxy") == ("x", "xy")
    assert standard_factorization("xyxyy") == ("xy", "xyy")


def test_free_lie_dimensions():
    assert [lie_dimension(d) for d in range(1, 9)] == [2, 1, 2, 3, 6, 9, 18, 30]


def test_expand_and_coords_roundtrip():
    for w in lyndon_words(6):
        coords = to_lie_coords(expand_lyndon(w))
        assert coords == {w: F(1)}


def test_eps0_on_generators():
    d = eps_derivation(0)
    assert d.val_x == {"y": F(1)}
    assert d.val_y == {}


def test_eps2_is_inner():
    # eps_2 = -ad([x, y]) as derivations: equal on both generators, hence
    # equal as operators in every degree.
    d = eps_derivation(2)
    t = {"xy": F(1), "yx": F(-1)}
    assert d.val_x == assoc_bracket({"x": F(1)}, t)
    assert d.val_y == assoc_bracket({"y": F(1)}, t)


@pytest.mark.parametrize("deg", range(2, 17, 2))
def test_eps2_matches_inner_on_sampled_basis(deg):
    rng = random.Random(20240 + deg)
    words = [w for w in lyndon_words(deg) if len(w) == deg]
    sample = words if len(words) <= 6 else rng.sample(words, 6)
    d = eps_derivation(2)
    t = {"xy": F(1), "yx": F(-1)}
    for w in sample:
        elem = expand_lyndon(w)
        lhs = d.apply(elem)
        rhs = assoc_bracket(elem, t)  # -[t, v] = [v, t]
        assert lhs == rhs


def test_eps4_on_y():
    d = eps_derivation(4)
    want = assoc_bracket({"y": F(1)}, {"xxxy": F(1), "xxyx": F(-3), "xyxx": F(3), "yxxx": F(-1)})
    want2 = assoc_bracket(
        {"xy": F(1), "yx": F(-1)}, {"xxy": F(1), "xyx": F(-2), "yxx": F(1)}
    )
    got = dict(want)
    for w, q in want2.items():
        got[w] = got.get(w, F(0)) - q
        if not got[w]:
            del got[w]
    assert d.val_y == got


def test_eps_annihilates_t():
    t = {"xy": F(1), "yx": F(-1)}
    for k in range(0, 13, 2):
        assert eps_derivation(k).apply(t) == {}


@settings(max_examples=30, deadline=None)
@given(
    k=st.sampled_from([0, 2, 4, 6, 8, 10]),
    wu=st.sampled_from([w for w in lyndon_words(4)]),
    wv=st.sampled_from([w for w in lyndon_words(4)]),
)
def test_derivation_law(k, wu, wv):
    d = eps_derivation(k)
    u = expand_lyndon(wu)
    v = expand_lyndon(wv)
    lhs = d.apply(assoc_bracket(u, v))
    rhs = assoc_bracket(d.apply(u), v)
    for w, q in assoc_bracket(u, d.apply(v)).items():
        rhs[w] = rhs.get(w, F(0)) + q
        if not rhs[w]:
            del rhs[w]
    assert lhs == rhs


def test_eps_apply_and_truncation():
    v = LieVec({"x": F(1)}, maxdeg=6)
    assert eps_apply(0, v).coords == {"y": F(1)}
    assert eps_apply(0, LieVec({"y": F(1)}, 6)).is_zero()
    got = eps_apply(2, v)
    assert got.coords == to_lie_coords({"xxy": F(1), "xyx": F(-2), "yxx": F(1)})
    with pytest.raises(TruncationOverflow):
        eps_apply(8, v)


def test_word_operator_examples():
    op = word_operator((2,), 8)
    t = LieVec(to_lie_coords({"xy": F(1), "yx": F(-1)}), 8)
    assert op.apply(t).is_zero()
    op00 = word_operator((0, 0), 8)
    assert op00.apply(LieVec({"x": F(1)}, 8)).is_zero()
    ident = word_operator((), 8)
    v = LieVec({"xy": F(2), "x": F(-3)}, 8)
    assert ident.apply(v).coords == v.coords


def test_word_operator_matrix_blocks():
    op = word_operator((2,), 10)
    m = op.matrix(2)  # degree 2 -> 4: [x,y] -> 0
    assert m.rows == lie_dimension(4) and m.cols == 1
    assert all(q == 0 for q in m.entries)
    m1 = op.matrix(1)
    assert m1.cols == 2 and m1.rows == 2
    with pytest.raises(TruncationOverflow):
        op.matrix(9)


def test_eisenstein_relations():
    for k2 in range(0, 11, 2):
        if k2 == 2:
            continue
        pair = (min(2, k2), max(2, k2))
        rel = find_lie_relations(2 + k2, 2, candidates=[pair])
        assert rel.vectors == ((F(1),),), k2


def test_ihara_takao_relation():
    rel = find_lie_relations(14, 2, candidates=[(4, 10), (6, 8)])
    assert len(rel.vectors) == 1
    a, b = rel.vectors[0]
    assert (a, b) in {(F(1), F(-3)), (F(-1, 3), F(1))}
    # normalized: a = 1, b = -3
    assert a / a == 1 and b / a == -3


def test_full_weight14_depth2_kernel():
    rel = find_lie_relations(14, 2)
    # candidates: (0,14), (2,12), (4,10), (6,8); kernel: [eps2, eps12] and
    # the (1,-3) combination
    assert rel.candidates == (
        "[eps0,eps14]",
        "[eps2,eps12]",
        "[eps4,eps10]",
        "[eps6,eps8]",
    )
    assert len(rel.vectors) == 2


def test_relations_stable_under_degree_growth():
    r1 = find_lie_relations(14, 2, maxdeg=16)
    r2 = find_lie_relations(14, 2, maxdeg=18)
    assert r1.vectors == r2.vectors


def test_depth_three_relations_from_inner_centrality():
    # every eps annihilates [x, y], so brackets with eps_2 = -ad([x, y])
    # vanish against the whole algebra; at low weight depth-3 kernels
    # consist exactly of the bracket words containing such a factor
    rel = find_lie_relations(8, 3)
    assert len(rel.vectors) == 3
    for vec in rel.vectors:
        support = {rel.candidates[i] for i, q in enumerate(vec) if q}
        assert len(support) == 1
        assert "eps2" in support.pop()


def test_no_spurious_depth2_relations():
    # weight 10 depth 2: [eps0,eps10], [eps2,eps8], [eps4,eps6]; only the
    # eps2 bracket vanishes
    rel = find_lie_relations(10, 2)
    assert len(rel.vectors) == 1
    vec = rel.vectors[0]
    nz = [i for i, q in enumerate(vec) if q]
    assert nz == [rel.candidates.index("[eps2,eps8]")]


def test_membership_examples():
    e24 = EPoly.word((2, 4)) - EPoly.word((4, 2))
    assert uu_dual_membership(e24) == {(2, 6): False}
    sh = shuffle_words((2,), (4,))
    assert uu_dual_membership(sh) == {(2, 6): True}
    w_elem = EPoly.word((10, 4), 3) + EPoly.word((8, 6))
    assert uu_dual_membership(w_elem) == {(2, 14): True}
    bad = EPoly.word((10, 4))
    assert uu_dual_membership(bad) == {(2, 14): False}
    with pytest.raises(TruncationOverflow):
        uu_dual_membership(e24, bounds=(1, 2))


def test_relation_tensor_elements():
    rels = relation_tensor_elements(6, 2)
    assert len(rels) == 1
    # [eps2, eps4] up to scale
    scale = rels[0][(2, 4)]
    assert {w: q / scale for w, q in rels[0].items()} == {
        (2, 4): F(1),
        (4, 2): F(-1),
    }


def test_to_E0_basis_examples():
    # matches the breakdown of the weight-2 length-3 decomposition
    x = EPoly.word((0, 4), -2) + EPoly.word((0, 0), F(-1, 120))
    comb, res = to_E0_basis(x)
    assert comb == {(0, 4): CoeffElem.from_rational(-2)}
    assert res.is_zero()

    x = EPoly.word((0, 0, 4), 6) + EPoly.word((0, 0, 0), F(1, 40))
    comb, res = to_E0_basis(x)
    assert comb == {(0, 0, 4): CoeffElem.from_rational(6)}
    assert res.is_zero()

    x = EPoly.word((0, 4))
    comb, res = to_E0_basis(x)
    assert comb == {(0, 4): CoeffElem.one()}
    # x = E0(0,4) - 1/240 e0e0, so the residual carries the minus sign
    assert res == EPoly.word((0, 0), F(-1, 240))
    assert not res.is_zero()


def test_fourier_membership_examples():
    assert fourier_membership(EPoly.constant(5)) is True
    assert fourier_membership(EPoly.word((0,))) is False
    x = EPoly.word((0, 4), -2) + EPoly.word((0, 0), F(-1, 120))
    assert fourier_membership(x) is True


def _random_epoly(rng):
    words = list(even_words(0, 0)) + list(even_words(1, 0)) + [
        w for l in (1, 2, 3) for s in (0, 2, 4) for w in even_words(l, s)
    ]
    picks = rng.sample(words, rng.randint(1, 4))
    return sum(
        (EPoly.word(w, F(rng.randint(-6, 6), rng.randint(1, 4))) for w in picks),
        EPoly.zero(),
    )


def test_fourier_agrees_with_residual_criterion():
    rng = random.Random(7)
    checked = 0
    for _ in range(100):
        x = _random_epoly(rng)
        _, res = to_E0_basis(x)
        assert fourier_membership(x, 16) == res.is_zero()
        checked += 1
    assert checked == 100


def test_D_derivation_annihilates_structure():
    table = shipped_table()
    D = 6
    a = NCSeries.letter("a", D, table)
    b = NCSeries.letter("b", D, table)
    t = -nc_bracket(a, b)
    der = build_D_derivation(D)
    assert der.apply(t).is_zero()
    assert der.apply(build_ytilde(D, table)).is_zero()
    assert der.apply(build_Ainf(D, table)).is_zero()


def test_eps_tilde_nc_normalization():
    d0 = eps_tilde_nc(0)
    assert d0.val_a == {"b": F(-1)}
    assert d0.val_b == {}
    d4 = eps_tilde_nc(4)  # 2/(2k-2)! = 1 for k = 2
    assert d4.val_a == {"aaaab": F(1), "aaaba": F(-4), "aabaa": F(6),
                        "abaaa": F(-4), "baaaa": F(1)}
