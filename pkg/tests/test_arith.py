from fractions import Fraction

import pytest

from shimlab import arith as A


@pytest.mark.parametrize("a,b,want", [(1, 7, 1), (-1, 3, -1), (2, 5, -1)])
def test_kronecker(a, b, want):
    assert A.kronecker(a, b) == want


def test_kronecker_against_euler_criterion():
    for p in (3, 5, 7, 11, 13):
        for a in range(1, 3 * p):
            e = pow(a, (p - 1) // 2, p)
            want = 0 if a % p == 0 else (1 if e == 1 else -1)
            assert A.kronecker(a, p) == want


def test_quadratic_char():
    assert A.quadratic_char(1).is_trivial()
    chi5 = A.quadratic_char(5)
    assert chi5.conductor() == 5 and chi5(2) == -1
    assert A.quadratic_char(2).conductor() == 8


@pytest.mark.parametrize("a,b,ell,want", [(2, 3, 5, 1), (5, 2, 5, -1), (-1, -1, 2, -1)])
def test_hilbert_symbol(a, b, ell, want):
    assert A.hilbert_symbol(a, b, ell) == want


def _hilbert_brute(a, b, ell, e):
    # a x^2 + b y^2 = z^2 has a primitive solution mod ell^e
    m = ell ** e
    for x in range(m):
        for y in range(m):
            for z in range(m):
                if (x % ell or y % ell or z % ell) and (a * x * x + b * y * y - z * z) % m == 0:
                    return 1
    return -1


@pytest.mark.parametrize("a,b", [(3, 5), (3, 3), (2, 3), (6, 7), (-1, 3), (5, 10)])
def test_hilbert_symbol_brute_force_at_3(a, b):
    assert A.hilbert_symbol(a, b, 3) == _hilbert_brute(a, b, 3, 3)


@pytest.mark.parametrize("n,want", [(1, 1), (12, 3), (360, 10)])
def test_squarefree_part(n, want):
    assert A.squarefree_part(n) == want


def test_local_square_class_equal():
    assert A.local_square_class_equal(1, 1, [2, 5])
    assert A.local_square_class_equal(41, 1, [2, 5])
    assert not A.local_square_class_equal(3, 1, [2, 5])


def test_chi_zero():
    triv = A.DirichletCharacter.trivial(8)
    assert A.chi_zero(triv, 13).is_trivial()
    c = A.chi_zero(triv, 7)
    assert c.conductor() == 4 and c(3) == -1
    chi5 = A.quadratic_char(5)
    assert A.chi_zero(chi5, 5) == chi5.extend(A.chi_zero(chi5, 5).modulus)


def test_decompose_at():
    two, rest = A.decompose_at(A.DirichletCharacter.trivial(8), 2)
    assert two.is_trivial() and rest.is_trivial()
    chi = A.quadratic_char(10)          # conductor 40
    two, rest = A.decompose_at(chi, 2)
    assert two.conductor() == 8 and rest.conductor() == 5
    two, rest = A.decompose_at(A.quadratic_char(5), 2)
    assert two.conductor() == 1 and rest.conductor() == 5


@pytest.mark.parametrize("n,want", [(0, Fraction(-1, 12)), (3, Fraction(1, 3)), (4, Fraction(1, 2))])
def test_hurwitz(n, want):
    assert A.hurwitz_class_number(n) == want


def test_hurwitz_small_values_known_table():
    # H(n) for n = 3, 4, 7, 8, 11, 12, 15, 16, 19, 20 from the class number formula
    table = {3: Fraction(1, 3), 4: Fraction(1, 2), 7: 1, 8: 1, 11: 1, 12: Fraction(4, 3),
             15: 2, 16: Fraction(3, 2), 19: 1, 20: 2, 23: 3}
    for n, h in table.items():
        assert A.hurwitz_class_number(n) == h, n


def test_choose_nebentypus_sqrt():
    triv = A.DirichletCharacter.trivial(2)
    chi = A.choose_nebentypus_sqrt(triv, 1, 1)
    assert chi.modulus == 8 and chi.conductor() == 8
    chi2 = A.choose_nebentypus_sqrt(triv, 2, 1)
    assert chi2.conductor() in (1, 4)


def test_choose_nebentypus_sqrt_rejects_nonsquare():
    psi = A.DirichletCharacter(10, [1])     # order 4, not a square of any character mod 40
    with pytest.raises(A.ArithError, match="no square root"):
        A.choose_nebentypus_sqrt(psi, 1, 5)


def test_hensel_roots_double_root():
    # (x - 3)^2 (x - 7) over Z_5: all roots found to precision
    poly = [-63, 51, -13, 1]
    roots = sorted(A._hensel_roots(poly, 5, 10))
    assert roots == [3, 7]
