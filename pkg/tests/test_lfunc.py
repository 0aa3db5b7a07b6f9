import pytest

from shimlab import lfunc, modforms as mf
from shimlab.arith import character_from_kronecker, quadratic_char


@pytest.fixture(scope="module")
def delta():
    return mf.newforms(12, 1, B=2000)[0]


def test_elliptic_curve_11a_central_value():
    # L(E, 1) for the conductor-11 curve is Omega/5 = 0.2538418608559106...
    E = mf.newforms(2, 11, B=400)[0]
    r = lfunc.central_value(E)
    assert r.sign == 1
    assert abs(r.value - 0.25384186085591068) < 1e-12
    assert r.estimatedError < 1e-10


def test_signs(delta):
    assert lfunc.sign_of_functional_equation(delta) == 1
    assert lfunc.sign_of_functional_equation(delta, character_from_kronecker(-3)) == -1
    assert lfunc.sign_of_functional_equation(delta, quadratic_char(5)) == 1


def test_odd_twist_vanishes(delta):
    r = lfunc.central_value(delta, character_from_kronecker(-3))
    assert r.sign == -1 and r.is_zero()


def test_delta_central_value_positive(delta):
    r = lfunc.central_value(delta)
    assert r.value.real > 0 and abs(r.value.imag) < 1e-12
    assert abs(r.value - 0.7921228386460) < 1e-9      # regression fixture
    r41 = lfunc.central_value(delta, quadratic_char(41))
    assert (r41.value / r.value).real > 0


def test_twist_by_trivial_is_embedding(delta):
    a = lfunc.twist(delta, None, 30)
    assert [int(round(x.real)) for x in a] == delta.rational_coeffs()[:30]


def test_conductor_coprimality(delta):
    f = mf.newforms(4, 5)[0]
    with pytest.raises(lfunc.LFunctionError):
        lfunc.central_value(f, quadratic_char(5))


def test_weight_mismatch(delta):
    with pytest.raises(lfunc.LFunctionError):
        lfunc.central_value(delta, None, k=12)
