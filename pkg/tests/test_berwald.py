import math

import numpy as np
import pytest
import scipy.linalg

from _reference import fd_jet, sine_curve
from conicfinsler import (
    CANONICAL,
    BerwaldMatrix,
    CatalogParams,
    LieAlgebra2D,
    SeedM,
    ValidationError,
    berwald_pde_residual,
    catalog_matrix,
    catalog_norm,
    constant_curve,
    eta_quadratic_residual,
    expm2,
    fit_eta_quadratic,
    indicatrix_from_matrix,
    landsberg_first_integral,
    norm_from_indicatrix,
    seed_to_matrix,
)
from conicfinsler.berwald import Indicatrix

ALGEBRAS = [LieAlgebra2D(0.0, 1.0), LieAlgebra2D(1.0, -0.3)]


def _reconstruct(seed):
    m = seed_to_matrix(seed)
    return m, norm_from_indicatrix(indicatrix_from_matrix(m, seed.a0))


@pytest.mark.parametrize(
    "seed, expected",
    [((0.5, 0.5, 0.0, 0.0), (-0.5, -1 / 3, 1.0, -5 / 6)), ((0.5, 0.5, 1.0, 0.0), (-0.5, -12 / 7, 1.0, -1 / 14))],
)
def test_seed_to_matrix_examples(seed, expected):
    m = seed_to_matrix(SeedM(*seed))
    assert m.as_tuple() == pytest.approx(expected, rel=1e-14)


def test_seed_to_matrix_determinant_is_relative_margin():
    seed = SeedM(1.3, -0.7, 0.4, 1.5)
    m = seed_to_matrix(seed)
    rel = (2 * seed.a0 * seed.a2 - seed.a1**2 + 4 * seed.a0**2) / (4 * seed.a0**2)
    assert m.det == pytest.approx(rel, rel=1e-13)
    assert m.c == 1.0 and m.a != 0


def test_matrix_invariants():
    with pytest.raises(ValidationError, match="a\\*c"):
        BerwaldMatrix(0.0, -1.0, 1.0, 0.0)
    with pytest.raises(ValidationError, match="ad - bc"):
        BerwaldMatrix(1.0, 2.0, 1.0, 1.0)
    m = BerwaldMatrix(-1.0, -2.0, 1.0, -0.5)
    assert m.normalized().as_tuple() == (1.0, 2.0, -1.0, 0.5)
    assert BerwaldMatrix(1.0, 0.0, 1.0, 1.0).normalized().as_tuple() == (1.0, 0.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "A",
    [
        [[0.3, 1.2], [0.8, -0.4]],  # real distinct
        [[0.2, -1.0], [1.0, 0.2]],  # complex pair
        [[0.7, 0.0], [1.0, 0.7]],  # defective
        [[0.5, 1e-14], [1.0, 0.5]],  # near defective
    ],
)
def test_expm2_matches_general_exponential(A):
    thetas = np.array([-1.3, 0.0, 0.4, 2.0])
    got = expm2(A, thetas)
    for k, th in enumerate(thetas):
        np.testing.assert_allclose(got[k], scipy.linalg.expm(th * np.asarray(A)), rtol=1e-12, atol=1e-13)


def test_indicatrix_start_and_velocity():
    m = seed_to_matrix(SeedM(0.5, 0.5, 0.0, 0.0))
    ind = indicatrix_from_matrix(m, 0.5)
    np.testing.assert_allclose(ind(0.0), [1.0, 0.0])
    h = 1e-6
    np.testing.assert_allclose((ind(h) - ind(-h)) / (2 * h), m.as_array() @ [1.0, 0.0], atol=1e-8)
    ind2 = indicatrix_from_matrix(m, 2.0)
    np.testing.assert_allclose(ind2(0.0), [0.5, 0.0])


def test_indicatrix_rejects_rotation():
    with pytest.raises(ValidationError):
        indicatrix_from_matrix((0.0, -1.0, 1.0, 0.0), 0.5)


def test_circle_indicatrix_gives_round_profile():
    rotation = np.array([[0.0, -1.0], [1.0, 0.0]])
    curve = norm_from_indicatrix(Indicatrix(rotation, 0.5, (-1.0, 1.0)))
    f, df, d2f, d3f = curve.sample(np.linspace(-0.9, 0.9, 19))
    np.testing.assert_allclose(f, 0.5, rtol=1e-13)
    np.testing.assert_allclose(np.array([df, d2f, d3f]), 0.0, atol=1e-12)


@pytest.mark.parametrize("seed", [(0.5, 0.5, 0.0, 0.0), (0.5, 0.5, 1.0, 0.0), (1.3, -0.7, 0.4, 1.5), (0.3, 0.2, 0.1, 0.5)])
def test_reconstruction_reproduces_seed(seed):
    seed = SeedM(*seed)
    m, curve = _reconstruct(seed)
    assert curve.jet_at(0.0).f == pytest.approx(seed.a0, rel=1e-14)
    np.testing.assert_allclose(curve.jet_at(0.0).as_tuple(), seed.as_tuple(), atol=1e-10)
    np.testing.assert_allclose(fd_jet(curve), seed.as_tuple(), atol=1e-6 * seed.a0)
    assert berwald_pde_residual(m, curve) <= 1e-10


def test_spiral_profile_in_real_jordan_basis():
    rng = np.random.default_rng(3)
    found = 0
    while found < 5:
        try:
            seed = SeedM(rng.uniform(0.2, 2), rng.uniform(0.1, 1.5), rng.uniform(-1, 1), rng.uniform(-2, 2))
        except ValidationError:
            continue
        m = seed_to_matrix(seed)
        A = m.as_array()
        w, V = np.linalg.eig(A)
        if abs(w[0].imag) < 1e-3:
            continue
        found += 1
        k = int(np.argmax(w.imag))
        l1, l2 = w[k].real, w[k].imag
        P = np.column_stack([V[:, k].real, -V[:, k].imag])
        np.testing.assert_allclose(np.linalg.solve(P, A @ P), [[l1, -l2], [l2, l1]], atol=1e-12)
        ind = indicatrix_from_matrix(m, seed.a0)
        z = np.linalg.solve(P, ind(np.linspace(*ind.theta_span, 41)))
        tbar = np.unwrap(np.arctan2(z[1], z[0]))
        fbar = 0.5 / (z[0] ** 2 + z[1] ** 2)
        scale = fbar * np.exp(2 * (l1 / l2) * tbar)
        np.testing.assert_allclose(scale, scale[0], rtol=1e-8)


def test_catalog_examples():
    circle = catalog_norm(CatalogParams(1, 0.0, 0.5))
    np.testing.assert_allclose(circle.sample(np.linspace(-1, 1, 9))[0], 0.5)
    power = catalog_norm(CatalogParams(2, 3.0, 1.0))
    assert power.jet_at(math.pi / 4).f == pytest.approx(0.5, rel=1e-14)
    for lam, mu in [(0.5, 0.7), (2.0, 0.1), (0.1, 3.0)]:
        p = CatalogParams(3, lam, mu)
        assert berwald_pde_residual(catalog_matrix(p), catalog_norm(p)) <= 1e-12


@pytest.mark.parametrize("values", [(4, 1.0), (1, -0.1), (2, 2.0), (3, 0.0), (1, 0.5, 0.0)])
def test_catalog_parameter_ranges(values):
    with pytest.raises(ValidationError):
        CatalogParams(*values)


@pytest.mark.parametrize("case, lam", [(1, 0.7), (3, 0.6)])
def test_catalog_profile_is_the_matrix_orbit(case, lam):
    p = CatalogParams(case, lam, 0.8)
    curve = norm_from_indicatrix(indicatrix_from_matrix(catalog_matrix(p), p.mu))
    ts = np.linspace(curve.domain[0] * 0.9, curve.domain[1] * 0.9, 15)
    np.testing.assert_allclose(curve.sample(ts)[0], catalog_norm(p).sample(ts)[0], rtol=1e-10)


def _product_coeffs(p, q, u, v, den):
    """Coefficients of ``-(p y1 + q y2)(u . y, v . y) / den`` in ``(y1^2, y1 y2, y2^2)``."""
    rows = [(p * w[0], p * w[1] + q * w[0], q * w[1]) for w in (u, v)]
    return -np.array(rows) / den


def _catalog_eta(case, lam, alg):
    e1, e2 = alg.eps1, alg.eps2
    if case == 1:
        return _product_coeffs(e1 - lam * e2, e2 + lam * e1, (lam, -1.0), (1.0, lam), lam**2 + 1)
    if case == 2:
        return _product_coeffs(e2 * lam, e1 * (2 - lam), (-lam, 0.0), (0.0, 2 - lam), lam**2 - 2 * lam)
    return _product_coeffs(e1 - lam * e2, lam * e1, (lam, 0.0), (1.0, lam), lam**2)


@pytest.mark.parametrize("alg", ALGEBRAS, ids=["canonical", "generic"])
@pytest.mark.parametrize("case, lam, mu", [(1, 0.0, 0.5), (1, 0.7, 1.3), (2, 3.0, 1.0), (2, 5.5, 0.4), (3, 0.8, 0.6)])
def test_catalog_spray_matches_closed_form(alg, case, lam, mu):
    fit = fit_eta_quadratic(alg, catalog_norm(CatalogParams(case, lam, mu)))
    assert fit.residual <= 1e-9
    np.testing.assert_allclose(fit.coeffs, _catalog_eta(case, lam, alg), atol=1e-9)


def test_circle_spray_fit_is_exact():
    fit = fit_eta_quadratic(CANONICAL, constant_curve(0.5, (-1.5, 1.5)))
    assert fit.residual <= 1e-12
    np.testing.assert_allclose(fit.coeffs, [[0, 0, 1], [0, -1, 0]], atol=1e-12)


def test_non_berwald_control():
    assert eta_quadratic_residual(CANONICAL, sine_curve()) > 1e-3


def test_degenerate_fit_grid():
    with pytest.raises(ValidationError):
        fit_eta_quadratic(CANONICAL, constant_curve(0.5, (-1.0, 1.0)), n_rays=2)


def test_pde_residual_controls():
    circle = constant_curve(0.5, (-1.0, 1.0))
    assert berwald_pde_residual((0.0, -1.0, 1.0, 0.0), circle) <= 1e-15
    assert berwald_pde_residual((-1.0, 0.0, 1.0, -1.0), circle) > 0.1
    m, curve = _reconstruct(SeedM(0.8, -0.4, 0.2, 1.0))
    assert berwald_pde_residual(m, curve) <= 1e-10
    A = np.array(m.as_tuple())
    assert berwald_pde_residual(2 * A, curve) == pytest.approx(berwald_pde_residual(A, curve), rel=1e-12, abs=1e-16)
    assert berwald_pde_residual(-A, curve) == pytest.approx(berwald_pde_residual(A, curve), rel=1e-12, abs=1e-16)


@pytest.mark.parametrize("case, lam, mu", [(1, 0.4, 0.5), (2, 3.0, 1.0), (3, 0.8, 0.6)])
def test_catalog_conserves_first_integral(case, lam, mu):
    curve = catalog_norm(CatalogParams(case, lam, mu))
    vals = [landsberg_first_integral(curve.jet_at(t)) for t in np.linspace(*curve.domain, 41)]
    assert np.ptp(vals) <= 1e-8 * max(1.0, abs(vals[0]))


def test_negated_matrix_reverses_the_orbit():
    m = seed_to_matrix(SeedM(0.8, -0.4, 0.2, 1.0))
    A = m.as_array()
    ind = indicatrix_from_matrix(m, 0.8)
    neg = indicatrix_from_matrix(-A.ravel(), 0.8)
    thetas = np.linspace(0.9 * ind.theta_span[0], 0.9 * ind.theta_span[1], 11)
    np.testing.assert_allclose(neg(-thetas), ind(thetas), rtol=1e-13, atol=1e-15)
    ts = np.linspace(-0.1, 0.1, 9)
    np.testing.assert_allclose(norm_from_indicatrix(neg).sample(ts)[0], norm_from_indicatrix(ind).sample(ts)[0], rtol=1e-12)
