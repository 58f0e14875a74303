import math

import numpy as np
import pytest

from conicfinsler import (
    ConvexityError,
    DomainError,
    NormCurve,
    NormJet,
    cartan_scalar,
    constant_curve,
    convexity_margin,
    gram_in_basis,
    indicatrix_point,
    indicatrix_tangent,
    polar_gram,
)
from conicfinsler.flow_oracles import cartan_direct
from conicfinsler.polar_norm import norm_gradient


@pytest.mark.parametrize(
    "f, df, d2f, expected",
    [(0.5, 0.0, 0.0, 1.0), (0.5, 0.5, 0.0, 0.75), (1.0, 3.0, 0.0, -5.0)],
)
def test_convexity_margin_examples(f, df, d2f, expected):
    assert convexity_margin(NormJet(0.0, f, df, d2f)) == pytest.approx(expected)


@pytest.mark.parametrize(
    "df, r, expected",
    [(0.0, 1.0, (1.0, 0.0, 1.0)), (0.5, 1.0, (1.0, 0.0, 0.75)), (0.0, 2.0, (1.0, 0.0, 4.0))],
)
def test_polar_gram_examples(df, r, expected):
    assert polar_gram(NormJet(0.3, 0.5, df, 0.0), r) == pytest.approx(expected)


def test_polar_gram_off_diagonal_is_exactly_zero():
    assert polar_gram(NormJet(0.2, 0.7, -0.3, 1.1), 1.7)[1] == 0.0


@pytest.mark.parametrize("t", [-2.0, 0.0, 0.4, math.pi / 2])
@pytest.mark.parametrize("r", [0.3, 1.0, 5.0])
def test_circle_gram_is_identity(t, r):
    np.testing.assert_allclose(gram_in_basis(NormJet(t, 0.5, 0.0, 0.0), r), np.eye(2), atol=1e-14)


def test_gram_rejects_nonconvex_jet():
    with pytest.raises(ConvexityError):
        gram_in_basis(NormJet(0.0, 1.0, 3.0, 0.0))


def test_gram_matches_hessian_of_half_norm_squared():
    jet = NormJet(0.3, 0.7, -0.2, 0.4, 0.9)
    curve = _quadratic_curve(jet)
    y = 1.3 * np.array([math.cos(0.3), math.sin(0.3)])
    h = 1e-4

    def E(v):
        return 0.5 * curve.norm(v) ** 2

    H = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
            H[i, j] = (E(y + ei + ej) - E(y + ei - ej) - E(y - ei + ej) + E(y - ei - ej)) / (4 * h * h)
    np.testing.assert_allclose(gram_in_basis(jet, 1.3), H, rtol=1e-6, atol=1e-6)


def test_euler_identity():
    jet = NormJet(-0.4, 0.9, 0.3, -0.1)
    r = 2.5
    y = r * np.array([math.cos(jet.t), math.sin(jet.t)])
    assert y @ gram_in_basis(jet, r) @ y == pytest.approx(2 * r * r * jet.f, rel=1e-12)


@pytest.mark.parametrize("jet, expected", [((0.5, 0.0, 0.0, 0.0), 0.0), ((0.5, 0.5, 0.0, 1.0), 1.5)])
def test_cartan_scalar_examples(jet, expected):
    assert cartan_scalar(NormJet(0.0, *jet)) == pytest.approx(expected)


def test_cartan_scalar_matches_third_derivative_of_norm_squared():
    jet = NormJet(0.2, 0.7, -0.2, 0.4, 0.9)
    curve = _quadratic_curve(jet)
    y = indicatrix_point(jet)
    u = indicatrix_tangent(jet)
    assert cartan_direct(curve, y, u) == pytest.approx(cartan_scalar(jet), rel=1e-10)


@pytest.mark.parametrize(
    "t, f, expected", [(0.0, 0.5, (1.0, 0.0)), (math.pi / 2, 0.5, (0.0, 1.0)), (0.0, 2.0, (0.5, 0.0))]
)
def test_indicatrix_point_examples(t, f, expected):
    np.testing.assert_allclose(indicatrix_point(NormJet(t, f, 0.0, 0.0)), expected, atol=1e-15)


def test_norm_gradient_is_dual_to_indicatrix():
    jet = NormJet(0.6, 0.8, 0.4, 0.0)
    y = indicatrix_point(jet)
    grad = norm_gradient(jet)
    assert grad @ y == pytest.approx(1.0)
    assert grad @ indicatrix_tangent(jet) == pytest.approx(0.0, abs=1e-14)


def test_jet_validation():
    with pytest.raises(DomainError):
        NormJet(0.0, -1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        NormJet(0.0, 1.0, float("nan"), 0.0)


def test_curve_certifies_convexity():
    def profile(ts):
        z = np.zeros_like(ts)
        return 1.0 + z, 3.0 + z, z, z

    with pytest.raises(ConvexityError):
        NormCurve((-0.1, 0.1), profile)


def test_curve_rejects_vectors_outside_domain():
    curve = constant_curve(0.5, (-0.5, 0.5))
    with pytest.raises(DomainError):
        curve.norm([0.0, 1.0])
    assert curve.norm([2.0, 0.0]) == pytest.approx(2.0)


def _quadratic_curve(jet):
    """Profile with the given jet as its Taylor polynomial at ``jet.t``."""

    def profile(ts):
        x = np.asarray(ts, dtype=float) - jet.t
        f = jet.f + jet.df * x + jet.d2f * x**2 / 2 + jet.d3f * x**3 / 6
        df = jet.df + jet.d2f * x + jet.d3f * x**2 / 2
        d2f = jet.d2f + jet.d3f * x
        return f, df, d2f, jet.d3f + 0 * x

    return NormCurve((jet.t - 0.3, jet.t + 0.3), profile)
