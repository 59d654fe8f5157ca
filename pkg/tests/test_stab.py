import pytest

from ghl.complex import boundary, d_C, d_R
from ghl.morita import GammaError, banana_gamma, theta_gamma, z
from ghl.stab import (
    StabContext, StabError, W_coefficients, build_W, build_X, build_Y, build_Yprime,
    build_alpha, build_beta, build_gamma_e, stabilize, verify_stable_triviality,
)
from fractions import Fraction


@pytest.fixture(scope="module")
def ctx():
    return StabContext(theta_gamma())


def test_context(ctx):
    assert (ctx.m, ctx.k, ctx.rank, ctx.dim) == (3, 1, 5, 4)
    assert ctx.corner(0) == ctx.corner(3) == ctx.layout.basepoint
    with pytest.raises(GammaError):
        StabContext(banana_gamma(4))


def test_stabilize_basics():
    zb = z(theta_gamma(), basepointed=True)
    s = stabilize(zb)
    assert s.rank == zb.rank + 1 and len(s) == len(zb)
    assert not stabilize(zb.like())
    with pytest.raises(StabError):
        stabilize(z(theta_gamma()))


def test_stabilize_commutes_with_boundary_termwise():
    zb = z(theta_gamma(), basepointed=True)
    for key, c in zb:
        x = zb.like({key: c})
        assert boundary(stabilize(x)) == stabilize(boundary(x))


def test_alpha_b_is_Zplus(ctx):
    assert build_alpha(ctx, 0) == stabilize(z(theta_gamma(), basepointed=True))


def test_dimensions(ctx):
    assert build_X(ctx, 1).dim == ctx.dim + 1
    assert build_Y(ctx, 1).dim == build_Yprime(ctx, 2).dim == ctx.dim + 1
    assert build_beta(ctx, 1).dim == build_gamma_e(ctx, 3).dim == ctx.dim


def test_X_half_order_only_changes_sign(ctx):
    assert build_X(ctx, 1, first_half_at_start=True) == -build_X(ctx, 1)


def test_X_dR_closed(ctx):
    for i in range(1, ctx.m + 1):
        assert not d_R(build_X(ctx, i))


def test_Y_minus_Yprime_dR_closed(ctx):
    for i in range(1, ctx.m):
        Y, Yp = build_Y(ctx, i), build_Yprime(ctx, i)
        assert d_R(Y) == d_R(Yp) and not d_R(Y - Yp)


def test_index_checks(ctx):
    with pytest.raises(StabError):
        build_X(ctx, 0)
    with pytest.raises(StabError):
        build_Y(ctx, ctx.m)
    with pytest.raises(StabError):
        build_alpha(ctx, ctx.m)


def test_W_coefficients():
    assert W_coefficients(1) == {"Y": Fraction(1, 2), "Y'": Fraction(-1, 2), 1: 1}
    assert W_coefficients(2) == {"Y": Fraction(1, 4), "Y'": Fraction(-1, 4), 1: 1, 2: Fraction(-1, 2)}


def test_W_matches_its_formula(ctx):
    Y = build_Y(ctx, 1) + build_Y(ctx, 2)
    Yp = build_Yprime(ctx, 1) + build_Yprime(ctx, 2)
    assert build_W(ctx) == (Y - Yp) * Fraction(1, 2) + build_X(ctx, 1)


def test_certificate_theta():
    cert = verify_stable_triviality(theta_gamma())
    assert cert.certified and "RESULT: BOUNDARY-CERTIFIED" in cert.report()


def test_certificate_other_base_vertex():
    assert verify_stable_triviality(theta_gamma(), base_vertex=1).certified


def test_broken_W_is_reported():
    cert = verify_stable_triviality(theta_gamma())
    key = next(iter(cert.W))[0]
    cert.W = cert.W - cert.W.like({key: cert.W[key]})
    cert.dR_W, cert.dC_W = d_R(cert.W), d_C(cert.W)
    assert not cert.certified and "RESULT: FAILED" in cert.report()
