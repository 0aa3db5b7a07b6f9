import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from shimlab import padic as pa
from shimlab.padic import PadicNumber, DiscElement

P5 = lambda x, prec=20: PadicNumber(5, x, prec)


def series(*cs, prec=20):
    return [P5(c, prec) for c in cs]


@given(st.integers(-10 ** 12, 10 ** 12), st.integers(-10 ** 12, 10 ** 12))
def test_ring_operations_match_integers(a, b):
    x, y = P5(a, 30), P5(b, 30)
    m = 5 ** 30
    assert ((x + y).lift() - (a + b)) % m == 0
    assert ((x * y).lift() - a * b) % 5 ** (x * y).precision() == 0
    assert ((x - y).lift() - (a - b)) % m == 0


@given(st.integers(1, 10 ** 9).filter(lambda n: n % 5))
def test_unit_inverse(a):
    x = P5(a, 25)
    assert (x * (1 / x) - 1).is_zero()


def test_valuation_and_precision():
    x = P5(25, 10)
    assert x.valuation() == 2 and x.precision() == 10 and x.relative_precision() == 8
    assert (P5(1, 10) / 5).valuation() == -1
    assert P5(0, 10).is_zero()


def test_newton_polygon_examples():
    assert pa.newton_polygon(series(1, -1, 5))[0] == [(0, 1), (1, 1)]
    assert pa.newton_polygon(series(1))[0] == []
    assert pa.newton_polygon(series(1, -6, 5))[0] == [(0, 1), (1, 1)]


def test_fredholm_factor_examples():
    Q, Qp = pa.fredholm_factor(series(1, -6, 5), 0)
    assert [c.lift() for c in pa._trim(Q)] == [1, -1 % 5 ** 20]
    Q, Qp = pa.fredholm_factor(series(1, -1), 0)
    assert len(pa._trim(Q)) == 2 and len(pa._trim(Qp)) == 1
    Q, Qp = pa.fredholm_factor(series(1, 5), 0)
    assert len(pa._trim(Q)) == 1 and (Qp[1] - 5).is_zero()


def test_factor_product_recovers_series():
    P = series(1, -31, 155, -125, prec=30)       # (1 - T)(1 - 5T)(1 - 25T)
    Q, Qp = pa.fredholm_factor(P, 1)
    prod = pa.poly_mul(Q, Qp)
    for a, b in zip(prod, P):
        assert (a - b).is_zero()
    assert pa.slopes_list(pa._trim(Q)) == [0, 1]


def test_char_series_examples():
    A = pa.padic_matrix(5, [[1, 0], [0, 5]], 20)
    P = pa.char_series(A)
    assert [c.lift() % 5 ** 20 for c in P] == [1, -6 % 5 ** 20, 5]
    I = pa.padic_matrix(5, [[int(i == j) for j in range(4)] for i in range(4)], 20)
    P = pa.char_series(I)
    binom = [1, -4, 6, -4, 1]
    assert all((a - b).is_zero() for a, b in zip(P, binom))


def test_charpoly_algorithms_agree():
    rng = random.Random(3)
    rows = [[rng.randrange(-50, 50) for _ in range(6)] for _ in range(6)]
    A = pa.padic_matrix(5, rows, 30)
    h = pa.hessenberg_charpoly(A)
    b = pa.berkowitz_charpoly(A)
    m = pa.charpoly_mod(rows, 5, 30)
    for x, y, z in zip(h, b, m):
        assert (x - y).is_zero()
        assert (x.lift() - z) % 5 ** 25 == 0


def test_riesz_diagonal():
    A = pa.padic_matrix(5, [[1, 0], [0, 5]], 20)
    e, N = pa.riesz_decompose(A, series(1, -1))
    assert (e[0][0] - 1).is_zero() and e[1][1].is_zero() and e[0][1].is_zero() and e[1][0].is_zero()
    e, N = pa.riesz_decompose(A, series(1, -6, 5))
    assert all((e[i][j] - int(i == j)).is_zero() for i in range(2) for j in range(2))


def _conjugated(diag, seed, prec=40):
    rng = random.Random(seed)
    n = len(diag)
    L = [[1 if i == j else (rng.randrange(25) if i > j else 0) for j in range(n)] for i in range(n)]
    U = [[1 if i == j else (rng.randrange(25) if i < j else 0) for j in range(n)] for i in range(n)]
    S = pa.mat_mul(pa.padic_matrix(5, L, prec), pa.padic_matrix(5, U, prec))
    D = pa.padic_matrix(5, [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)], prec)
    return pa.mat_mul(pa.mat_mul(S, D), pa.inverse(S))


@pytest.mark.parametrize("seed", range(5))
def test_riesz_random_conjugate(seed):
    phi = _conjugated([1, 6, 5, 25], seed)
    P = pa.char_series(phi)
    Q, _ = pa.fredholm_factor(P, 0)
    Q = pa._trim(Q)
    e, N = pa.riesz_decompose(phi, Q)
    assert len(N[0]) == 2
    assert pa.mat_is_zero(pa.mat_add(pa.mat_mul(e, e), e, -1))
    assert pa.mat_is_zero(pa.mat_add(pa.mat_mul(e, phi), pa.mat_mul(phi, e), -1))
    U = pa.restrict(phi, N)
    Uinv = pa.invert_on_N(U, Q)
    # Q(phi^-1) = 0 on N
    assert pa.mat_is_zero(pa.poly_eval_matrix(Q, Uinv))


def test_invert_on_N_examples():
    one = pa.padic_matrix(5, [[1]], 20)
    assert (pa.invert_on_N(one, series(1, -1))[0][0] - 1).is_zero()
    inv = pa.invert_on_N(pa.padic_matrix(5, [[1, 0], [0, 5]], 20), series(1, -6, 5))
    assert (inv[1][1] - Fraction(1, 5)).is_zero() and (inv[0][0] - 1).is_zero()


def test_disc_element_evaluation_is_a_ring_map():
    rng = random.Random(1)
    a = DiscElement(5, [rng.randrange(100) * 25 ** i for i in range(5)], T=4, prec=30)
    b = DiscElement(5, [rng.randrange(100) * 25 ** i for i in range(5)], T=4, prec=30)
    for t in range(4):
        assert ((a * b)(t) - a(t) * b(t)).is_zero()
        assert ((a + b)(t) - a(t) - b(t)).is_zero()


def test_interpolate_recovers_polynomial():
    nodes = list(range(3, 8))
    f = lambda t: 7 + 5 * t + 25 * t * t
    d = pa.interpolate(5, nodes, [P5(f(t), 30) for t in nodes], T=4)
    for t in (0, 1, 2, 10):
        assert (d(t) - f(t)).is_zero()
