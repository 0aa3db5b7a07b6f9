import pytest

from shimlab import lfunc, modforms as mf, wald as W
from shimlab.arith import DirichletCharacter as DC, character_from_kronecker
from shimlab.lfunc import LValueResult


@pytest.fixture(scope="module")
def ctx():
    D = mf.newforms(12, 1, B=400)[0]
    return W.WaldContext(D, 13, DC.trivial(8), 5)


def test_hypotheses(ctx):
    assert W.hypotheses_ok(ctx)


def test_local_tags(ctx):
    assert sorted(t.label for t in W.local_function_tags(ctx, 2)) == sorted(["c'[alpha]", "c'[alpha']", "gamma0[0]"])
    assert [t.label for t in W.local_function_tags(ctx, 3)] == ["c0[lambda]"]


def test_fiber_dimensions(ctx):
    assert W.fiber_dimension(ctx) == 3
    f8 = mf.newforms(8, 2)[0]                 # Steinberg at 2
    assert W.fiber_dimension(W.WaldContext(f8, 9, DC.trivial(8), 5)) == 2
    c3 = W.WaldContext(ctx.f0, 13, DC.trivial(24), 5, N=3)
    assert W.fiber_dimension(c3) == 6


def test_vanishing_unramified(ctx):
    L = lfunc.central_value(ctx.f0, None)
    v = W.vanishing_criteria(ctx, 1, L)
    assert v.vanishes is False and v.reason == "none"


def test_vanishing_sign_minus(ctx):
    L = lfunc.central_value(ctx.f0, character_from_kronecker(-3))
    v = W.vanishing_criteria(ctx, 3, L)
    assert v.vanishes is True and v.reason == "L-value"


def test_vanishing_indeterminate(ctx):
    L = LValueResult(1e-12, 1e-12, 1, 10)
    assert W.vanishing_criteria(ctx, 1, L).vanishes == "indeterminate"


def test_condition_iii_level_5():
    f = mf.newforms(4, 5)[0]
    c = W.WaldContext(f, 5, DC.trivial(8), 5)
    lam = f.a(5).coords[0]
    # (5, 2)_5 = -1 so the target is -5 = a_5
    v = W.vanishing_criteria(c, 2, None, lam_up2=lam)
    assert v.vanishes is True and v.reason == "condition-iii"


def test_ratio_identity_trivial_cases(ctx):
    L1 = lfunc.central_value(ctx.f0, None)
    F = [0, 1, 3, 0, 5]
    assert W.ratio_identity_check(F, ctx, 1, 1, L1, L1) == 0
    assert W.ratio_identity_check([0] * 50, ctx, 1, 1, L1, L1) == 0


def test_phi_value_cases():
    assert W.phi_value([[0, 1, 2]], 2, 2) == 1
    with pytest.raises(W.WaldError, match="denominator section vanishes"):
        W.phi_value([[0, 0, 2], [0, 0, 5]], 2, 1)
    with pytest.raises(W.WaldError):
        W.phi_value([[0, 1, 2], [0, 1, 3]], 2, 1)


def test_phi_square_identity_cases(ctx):
    L1 = lfunc.central_value(ctx.f0, None)
    assert W.phi_square_identity(1, ctx, 1, 1, L1, L1) == 0
    Lm = lfunc.central_value(ctx.f0, character_from_kronecker(-3))
    with pytest.raises(W.WaldError):
        W.phi_square_identity(1, ctx, 41, 3, L1, Lm)


def test_degenerate_component():
    triv = DC.trivial(8)
    st = mf.LocalType(2, "Steinberg", 1)
    desc = W.ComponentDescriptor(triv, 13, 1, {2: st})
    assert W.degenerate_component(desc, 1)["degenerate"]
    assert W.degenerate_component(desc, 1)["reason"] == "b"
    assert not W.degenerate_component(desc, 3)["degenerate"]
    ps = W.ComponentDescriptor(triv, 13, 1, {2: mf.LocalType(2, "unramified-PS")}, sampled_signs=[1, 1])
    r = W.degenerate_component(ps, 1)
    assert not r["degenerate"] and r["heuristic"]
