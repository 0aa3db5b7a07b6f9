from fractions import Fraction

import pytest

from shimlab import eigen as eg, modforms as mf, padic as pa


@pytest.fixture(scope="module")
def delta_alpha():
    D = mf.newforms(12, 1)[0]
    return mf.p_stabilize(D, 5, "alpha", prec=60).up_eigenvalue().to_padic(60)


@pytest.fixture(scope="module")
def fam12():
    return eg.family_piece(eg.WeightDisc(5, 12), 1, d=20)


@pytest.fixture(scope="module")
def fam32():
    return eg.family_piece(eg.WeightDisc(5, 32), 1, d=20)


def test_constant_slice():
    m = eg.up_matrix(5, 1, 0, 1, cusp=False)
    assert (m.matrix[0][0] - 1).is_zero()


def test_weight_4_slopes_stable():
    s20 = eg.slopes(eg.char_series(eg.up_matrix(5, 1, 4, 20, cusp=False)))
    s30 = eg.slopes(eg.char_series(eg.up_matrix(5, 1, 4, 30, cusp=False)))
    assert s20[:2] == [0, 1]
    assert s20[:5] == s30[:5]


def test_q_precision_error():
    with pytest.raises(eg.EigenError, match="q-precision"):
        eg.up_matrix(5, 1, 12, 20, B=10)


def test_unsupported_inputs():
    with pytest.raises(eg.EigenError):
        eg.up_matrix(3, 1, 12, 5)
    with pytest.raises(eg.EigenError):
        eg.up_matrix(5, 7, 12, 5)


def test_char_series_examples():
    P = eg.char_series(pa.padic_matrix(5, [[1, 0], [0, 5]], 20))
    assert [(c - v).is_zero() for c, v in zip(P, [1, -6, 5])] == [True] * 3
    P = eg.char_series(pa.padic_matrix(5, [[int(i == j) for j in range(3)] for i in range(3)], 20))
    assert all((c - v).is_zero() for c, v in zip(P, [1, -3, 3, -1]))


def test_char_series_independent_of_algorithm_and_precision():
    m = eg.up_matrix(5, 1, 12, 12, M=40)
    fast = eg.char_series(m)
    slow = pa.char_series(m.matrix)
    low = eg.char_series(eg.up_matrix(5, 1, 12, 12, M=30))
    for a, b, c in zip(fast, slow, low):
        assert (a - b).add_bigoh(25).is_zero()
        assert (a - c).add_bigoh(25).is_zero()


def test_factorization_product_is_the_series():
    P = eg.char_series(eg.up_matrix(5, 1, 12, 20, M=60))
    Q, Qp = pa.fredholm_factor(P, 5)
    prod = pa.poly_mul(Q, Qp)
    for a, b in zip(prod, P):
        assert (a - b).is_zero()


def test_weight_piece_is_delta(delta_alpha):
    pc = eg.weight_piece(12, 1, d=20)
    assert pc.rank == 1
    assert (pc.hecke["U5"][0][0] - delta_alpha).add_bigoh(30).is_zero()
    assert (pc.hecke["T2"][0][0] + 24).is_zero()
    assert (pc.hecke["T3"][0][0] - 252).is_zero()
    assert all(eg.check_piece(pc).values())


def test_empty_piece():
    P = eg.char_series(eg.up_matrix(5, 1, 12, 10, M=40))
    with pytest.raises(eg.EigenError, match="empty piece"):
        eg.local_piece(P, Fraction(1, 2), eg.up_matrix(5, 1, 12, 10, M=40))


def _synthetic(seed, jordan):
    phi, T2, planted = eg.synthetic_family(seed=seed, jordan=jordan, T=4)
    P = pa.char_series(phi)
    pc = eg.local_piece(P, 0, phi, {"T2": T2}, disc=eg.WeightDisc(5, 12, T=4))
    return pc, planted


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_synthetic_piece_equals_planted_block(seed):
    pc, planted = _synthetic(seed, False)
    assert pc.rank == 2
    l1, l2 = planted["eigenvalues"]
    for t in (0, 1, 2):
        Q = [c(t) for c in pc.Q]
        assert (Q[1] + l1(t) + l2(t)).is_zero()
        assert (Q[2] - l1(t) * l2(t)).is_zero()
    assert all(eg.check_piece(pc).values())


def test_points_semisimple():
    pc, planted = _synthetic(1, False)
    pts = eg.eigen_points(pc, 0)
    assert len(pts) == 2
    got = sorted(x.eigenvalues["U5"].lift() for x in pts)
    want = sorted(v(0).lift() for v in planted["eigenvalues"])
    assert got == want
    for x in pts:
        assert eg.dual_fiber(pc, x)[0] == 1
        assert eg.nilpotency_bound_check(pc, x, points=pts) == 1


def test_points_jordan():
    pc, _ = _synthetic(5, True)
    pts = eg.eigen_points(pc, 0)
    assert len(pts) == 1 and pts[0].multiplicity == 2
    assert eg.dual_fiber(pc, pts[0])[0] == 1
    assert eg.nilpotency_bound_check(pc, pts[0], points=pts) == 2


def test_dual_fiber_functionals_are_left_inverse():
    pc, _ = _synthetic(2, False)
    for x in eg.eigen_points(pc, 0):
        dim, fs = eg.dual_fiber(pc, x)
        assert len(fs) == dim


def test_family_specializations_match_single_weights(fam12):
    # the family and independent single-weight computations see the same points
    for k in (12, 32, 52):
        pts = eg.eigen_points(fam12, fam12.disc.parameter(k))
        single = eg.eigen_points(eg.weight_piece(k, 1, d=20))
        assert len(pts) == len(single) == 1
        for g in pts[0].eigenvalues:
            diff = pts[0].eigenvalues[g] - single[0].eigenvalues[g]
            assert diff.add_bigoh(fam12.tail).is_zero()


def test_family_center_is_delta(fam12, delta_alpha):
    u = fam12.specialize(0).hecke["U5"][0][0]
    assert (u - delta_alpha).add_bigoh(fam12.tail).is_zero()


def test_disc_factorization_commutes_with_specialization(fam12):
    ok, _ = eg.disc_factor_check(fam12)
    assert ok


def test_gluing(fam12, fam32):
    assert eg.gluing_check(fam12, fam12)
    assert eg.gluing_check(fam12, fam32)
    from shimlab.cli import perturbed_piece
    assert not eg.gluing_check(fam12, perturbed_piece(fam32, "T2", 5))


def test_gluing_needs_overlap(fam12):
    far = eg.WeightDisc(5, 16)
    assert not far.contains(12)


@pytest.mark.parametrize("w", [4, 8])
def test_classical_comparison(w):
    r = eg.classical_comparison(w, d=40)
    assert r["match"] and r["stable"] and r["achievedRelPrec"] >= 10


def test_classical_comparison_weight_12_eigenvalues():
    r = eg.classical_comparison(12, d=40)
    assert r["slopesClassical"] == r["slopesOverconvergent"]
    assert r["slopesClassical"][0] == "1"


def test_piece_json(fam12):
    d = fam12.to_json()
    assert d["tameLevel"] == 1 and d["slopes"] == ["1"]
    assert set(d["heckeCharPolys"]) == {"U5", "T2", "T3"}
