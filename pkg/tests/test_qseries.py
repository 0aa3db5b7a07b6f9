import pytest

from shimlab import qseries as Q


def product_expansion(B, factors):
    """prod over (m, e) of prod_n (1 - q^(m n))^e, as integers to q^B."""
    c = [0] * B
    c[0] = 1
    for m, e in factors:
        for n in range(1, B):
            if m * n >= B:
                break
            for _ in range(abs(e)):
                if e > 0:
                    for i in range(B - 1, m * n - 1, -1):
                        c[i] -= c[i - m * n]
                else:
                    for i in range(m * n, B):
                        c[i] += c[i - m * n]
    return c


def test_multiply_examples():
    f = Q.QExpansion([1, 1, 0])
    g = Q.QExpansion([1, -1, 0])
    assert (f * g).coeffs == [1, 0, -1]
    t = Q.theta(5)
    assert (t * t).coeffs == [1, 4, 4, 0, 4]
    assert (f * Q.one(3)).coeffs == f.coeffs


def test_theta():
    assert Q.theta(5).coeffs == [1, 2, 0, 0, 2]
    assert Q.theta(10).coeffs[9] == 2
    assert Q.theta(1).coeffs == [1]


def test_theta_squared_counts_lattice_points():
    B = 60
    t2 = Q.theta(B) * Q.theta(B)
    for n in range(B):
        r = sum(1 for x in range(-8, 9) for y in range(-8, 9) if x * x + y * y == n)
        assert t2.coeffs[n] == r


def test_delta_matches_product():
    B = 80
    ref = [0] + product_expansion(B - 1, [(1, 24)])
    assert [int(c) for c in Q.delta(B).coeffs] == ref
    assert Q.delta(4).coeffs[1:] == [1, -24, 252]


def test_eisenstein_parity_error():
    with pytest.raises(Q.QSeriesError):
        Q.eisenstein(5, None, None, 10)


def test_level_one_eisenstein_e4():
    E4 = Q.level_one_eisenstein(4, 6)
    sigma3 = lambda n: sum(d ** 3 for d in range(1, n + 1) if n % d == 0)
    assert E4.coeffs == [1] + [240 * sigma3(n) for n in range(1, 6)]


def test_echelonize_examples():
    out = Q.echelonize([Q.QExpansion([1, 1, 0]), Q.QExpansion([0, 1, 0])])
    assert [f.coeffs for f in out] == [[1, 0, 0], [0, 1, 0]]
    assert len(Q.echelonize([Q.QExpansion([1, 1, 0]), Q.QExpansion([2, 2, 0])])) == 1
    D = Q.delta(10)
    assert [f.coeffs for f in Q.echelonize([D])] == [D.coeffs]


def test_miller_basis_weight_24():
    basis = Q.miller_basis(24, 10)
    assert len(basis) == 2
    assert [f.valuation() for f in basis] == [1, 2]


def test_padic_reduction_roundtrip():
    D = Q.delta(20)
    Dp = D.to_padic(5, 8) if hasattr(D, "to_padic") else None
    if Dp is not None:
        assert Q.QExpansion.from_json(Dp.to_json()).coeffs == Dp.coeffs
    assert Q.QExpansion.from_json(D.to_json()).coeffs == D.coeffs
