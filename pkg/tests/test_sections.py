from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from shimlab import sections as S
from shimlab.sections import Poly, ModuleModel, Meromorphic

w = Poly.w()


def test_poly_arithmetic():
    f = (w + 1) * (w - 2)
    assert f.c == [-2, -1, 1]
    q, r = f.divmod(w - 2)
    assert q == w + 1 and r.is_zero()
    assert S.pgcd(f, (w + 1) * (w + 5)) == w + 1
    assert f.translate(2) == w * (w + 3)


@given(st.lists(st.integers(-9, 9), min_size=1, max_size=5), st.lists(st.integers(-9, 9), min_size=1, max_size=5),
       st.integers(-5, 5))
def test_poly_evaluation_is_a_ring_map(a, b, x):
    f, g = Poly(a), Poly(b)
    assert (f * g)(x) == f(x) * g(x)
    assert (f + g)(x) == f(x) + g(x)


def test_is_degenerate_examples():
    M = ModuleModel(2, [[w, 0]])        # R e1 / (w e1) + R e2
    assert S.is_degenerate([0, 0], M)
    assert not S.is_degenerate([0, 1], M)
    assert S.is_degenerate([1, 0], M)      # killed by w
    assert not S.is_degenerate([0, 1], ModuleModel.free(2))


def test_annihilator():
    M = ModuleModel(2, [[w * w - 1, 0]])
    assert S.annihilator([1, 0], M) == w * w - 1
    assert S.annihilator([0, 1], M) is None


def test_vanishing_on_dense_set():
    T = 3
    s = [(w - 1) * (w - 2) * (w - 3) * 0]
    assert S.vanishing_on_dense_set_implies_zero(s, [1, 2, 3, 4], degree_bound=T) == "zero"
    assert S.vanishing_on_dense_set_implies_zero([w], [0]) == "inconclusive"
    assert S.vanishing_on_dense_set_implies_zero([Poly()], []) == "zero"
    with pytest.raises(S.SectionsError):
        S.vanishing_on_dense_set_implies_zero([w], [1])


def test_vanishing_needs_more_zeros_than_degree():
    f = (w - 1) * (w - 2) * (w - 3)
    M = ModuleModel.free(1, degree_bound=3)
    assert S.vanishing_on_dense_set_implies_zero([f], [1, 2, 3], M) == "inconclusive"


def test_ratio_examples():
    M = ModuleModel.free(2)
    Phi = S.solve_meromorphic_ratio([w, w * w], [1, w], M)
    assert Phi.equals(Meromorphic(w, Poly([1])))
    with pytest.raises(S.SectionsError, match="sections not dependent"):
        S.solve_meromorphic_ratio([1, 0], [0, 1], M)


def test_ratio_degenerate_denominator():
    M = ModuleModel(2, [[w, 0]])
    with pytest.raises(S.SectionsError, match="denominator section generically zero"):
        S.solve_meromorphic_ratio([0, 1], [w * w, 0], M)


def test_ratio_with_torsion():
    # s1 = (w/(w+1)) s2 up to a multiple of the relation
    M = ModuleModel(2, [[w - 3, 0]])
    s2 = [Poly([0]), w + 1]
    s1 = [w - 3, w]
    Phi = S.solve_meromorphic_ratio(s1, s2, M)
    assert Phi.equals(Meromorphic(w, w + 1))


def test_regular_at_examples():
    assert S.regular_at(Meromorphic(w, Poly([1])), 0) == 0
    assert S.regular_at(Meromorphic(w * w + w, w), 0, True) == 1
    assert S.regular_at(Meromorphic(Poly([1]), w), 0, True) == "pole-or-indeterminate"
    assert S.regular_at(Meromorphic(Poly([1]), Poly([1])), 0, False) == "pole-or-indeterminate"
    assert S.regular_at(Meromorphic(w - 2, (w - 2) * (w + 1)), 2, True) == Fraction(1, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_planted_ratio_recovered(seed):
    M, Phi = S.planted_model(seed)
    assert S.solve_meromorphic_ratio("s1", "s2", M).equals(Phi)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_degeneracy_implementations_agree(seed):
    M, _ = S.planted_model(seed)
    rng_vecs = [M.sections["s1"], M.sections["s2"], M.relations[0], [Poly()] * M.n]
    for v in rng_vecs:
        assert S.is_degenerate(v, M) == S.is_degenerate_by_rank(v, M)


def test_generic_rank():
    assert ModuleModel(3, [[w, 1, 0]]).generic_rank() == 2
    assert ModuleModel.free(4).generic_rank() == 4


def test_classical_coefficient_weight_12():
    assert S.classical_coefficient(12, 41, prec=20).lift() == 308120442
