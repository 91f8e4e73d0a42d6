"""
Tests for Gauss-Kronecker curvatures, boundary weights and quermassintegrals.
"""
import math

import numpy as np
import pytest

from sphereconvex.bodies.generators import cap_body
from sphereconvex.errors import RepresentationError
from sphereconvex.geometry.chart_core import ChartBody, SpaceForm, dual_body, j_lambda, tan_lambda
from sphereconvex.geometry.curvature import (
    boundary_weight,
    chart_exponents,
    gauss_kronecker_euclidean,
    integrate_points,
    mean_curvature_sphere,
    points_at,
    principal_curvatures_sphere,
    quermassintegrals,
    spherical_gk,
)
from sphereconvex.geometry.functionals import perimeter_lambda, volume_lambda
from sphereconvex.geometry.support import Ellipsoid, Fourier2D, Harmonic3D


def _circle(n: int) -> np.ndarray:
    theta = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return np.stack([np.cos(theta), np.sin(theta)], axis=1)


def _sphere(n: int, seed: int = 0) -> np.ndarray:
    u = np.random.default_rng(seed).standard_normal((n, 3))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _harmonic_body() -> ChartBody:
    coeffs = np.zeros(16)
    coeffs[0] = 2 * math.sqrt(math.pi) * 0.6
    coeffs[5] = 0.04
    coeffs[7] = -0.03
    coeffs[11] = 0.01
    return ChartBody(SpaceForm(3, 1.0), Harmonic3D(coeffs))


def test_chart_ball_curvature():
    """Test H_e = r^-(d-1) on a chart ball."""
    r = 0.8
    body = ChartBody(SpaceForm(3, 0.0), Ellipsoid(r * r * np.eye(3)))
    np.testing.assert_allclose(gauss_kronecker_euclidean(body, _sphere(10)), r ** -2, rtol=1e-12)


def test_ellipse_vertex_curvature():
    """Test the vertex curvature a/b^2 of the ellipse (a, b)."""
    a, b = 2.0, 1.0
    body = ChartBody(SpaceForm(2, 0.0), Ellipsoid(np.diag([a * a, b * b])))
    assert gauss_kronecker_euclidean(body, np.array([[1.0, 0.0]]))[0] == pytest.approx(a / b ** 2, rel=1e-12)


def test_finite_difference_curvature_of_curve():
    """Test H_e against the curvature of the boundary curve by differences."""
    body = ChartBody(SpaceForm(2, 0.0), Fourier2D([1.0, 0.0, 0.05, 0.02], [0.0, 0.1, -0.03, 0.0]))
    step = 1e-4
    for theta in (0.3, 1.7, 4.0):
        t = np.array([theta - step, theta, theta + step])
        x = body.jet(np.stack([np.cos(t), np.sin(t)], axis=1)).grad
        ds = 0.5 * (np.linalg.norm(x[2] - x[1]) + np.linalg.norm(x[1] - x[0]))
        # the normal turns by 2 step over the arc
        expected = 2 * step / (2 * ds)
        got = gauss_kronecker_euclidean(body, np.array([[math.cos(theta), math.sin(theta)]]))[0]
        assert got == pytest.approx(expected, rel=1e-6)


def test_cap_spherical_curvature():
    """Test H_lam = tan_lam(alpha)^-(d-1) on caps."""
    for d, lam, alpha in ((2, 1.0, 0.4), (3, 2.0, 0.5), (3, 0.5, 1.2)):
        body = cap_body(d, lam, alpha)
        u = _circle(8) if d == 2 else _sphere(8)
        np.testing.assert_allclose(spherical_gk(body, u), tan_lambda(lam, alpha) ** -(d - 1), rtol=1e-12)


def test_euclidean_weight_is_one():
    """Test sigma_lam = 1 at lam = 0."""
    body = ChartBody(SpaceForm(2, 0.0), Ellipsoid(np.diag([0.4, 0.9]), [0.1, 0.0]))
    np.testing.assert_allclose(boundary_weight(body, _circle(12)), 1.0)
    np.testing.assert_allclose(spherical_gk(body, _circle(12)), gauss_kronecker_euclidean(body, _circle(12)))


def test_cap_perimeter_through_weight():
    """Test P_lam of a cap through the boundary weight."""
    for d, lam, alpha in ((2, 1.0, 0.7), (3, 1.0, 0.5), (3, 3.0, 0.4)):
        body = cap_body(d, lam, alpha)
        expected = (2 * math.pi if d == 2 else 4 * math.pi) * (math.sin(math.sqrt(lam) * alpha) / math.sqrt(lam)) ** (d - 1)
        assert perimeter_lambda(body).value == pytest.approx(expected, rel=1e-10)


def test_p1_chart_integrand_consistency():
    """Test H_lam^{1/(d+1)} sigma_lam against H_e^{1/(d+1)} (1 + lam |x|^2)^{-(d-1)/2}."""
    body = ChartBody(SpaceForm(2, 1.5), Fourier2D([0.5, 0.05, 0.02], [0.0, 0.0, 0.01]))
    d, lam = 2, 1.5
    a = integrate_points(body, lambda pts: pts.H_lambda ** (1 / (d + 1)) * pts.sigma_lambda)
    b = integrate_points(body, lambda pts: pts.H_e ** (1 / (d + 1)) * (1 + lam * pts.x_sq) ** (-(d - 1) / 2))
    assert a.value == pytest.approx(b.value, rel=1e-10)


def test_chart_exponents():
    """Test the combined-integrand exponents and the printed variant."""
    e1, e2 = chart_exponents(2, 1.0)
    assert e1 == pytest.approx(-(4 - 1) / 6)
    assert e2 == 0.0
    printed, _ = chart_exponents(2, 1.0, corrected=False)
    assert printed == pytest.approx(-2 * (2 - 1) / 6)
    assert chart_exponents(3, 0.0) == chart_exponents(3, 0.0, corrected=False)


def test_curvature_duality_product_2d():
    """Test H^s(K, x) H^s(K*, x*) = 1 at corresponding points, d = 2."""
    body = ChartBody(SpaceForm(2, 1.0), Fourier2D([0.6, 0.0, 0.04, 0.01], [0.0, 0.03, 0.0, -0.01]))
    dual = dual_body(body)
    u = _circle(24)
    pts = points_at(body, u)
    dual_normals = -pts.x / np.linalg.norm(pts.x, axis=1, keepdims=True)
    product = pts.H_lambda * spherical_gk(dual, dual_normals)
    np.testing.assert_allclose(product, 1.0, rtol=1e-5)


def test_curvature_duality_product_3d():
    """Test H^s(K, x) H^s(K*, x*) = 1 at corresponding points, d = 3."""
    body = ChartBody(SpaceForm(3, 1.0), Ellipsoid(np.diag([0.3, 0.5, 0.4]), [0.05, -0.02, 0.0]))
    dual = dual_body(body)
    pts = points_at(body, _sphere(16))
    dual_normals = -pts.x / np.linalg.norm(pts.x, axis=1, keepdims=True)
    np.testing.assert_allclose(pts.H_lambda * spherical_gk(dual, dual_normals), 1.0, rtol=1e-5)


def test_principal_curvatures_of_cap():
    """Test kappa_1 = kappa_2 = cot(alpha) on a d = 3 cap."""
    alpha = 0.6
    kappa = principal_curvatures_sphere(cap_body(3, 1.0, alpha), _sphere(6))
    np.testing.assert_allclose(kappa, 1 / math.tan(alpha), rtol=1e-6)


def test_mean_curvature_of_cap():
    """Test H_1 = cot(alpha) on a d = 3 cap."""
    np.testing.assert_allclose(mean_curvature_sphere(cap_body(3, 1.0, 0.8), _sphere(5)), 1 / math.tan(0.8), rtol=1e-6)


def test_principal_curvatures_match_gauss_kronecker():
    """Test kappa_1 kappa_2 = H^s on a random d = 3 body."""
    body = _harmonic_body()
    u = _sphere(10, seed=4)
    kappa = principal_curvatures_sphere(body, u)
    np.testing.assert_allclose(kappa.prod(axis=1), spherical_gk(body, u), rtol=1e-5)


def test_principal_curvature_planar():
    """Test the single curvature of a d = 2 body is H^s."""
    body = ChartBody(SpaceForm(2, 1.0), Fourier2D([0.5, 0.0, 0.02], [0.0, 0.01, 0.0]))
    u = _circle(5)
    np.testing.assert_allclose(principal_curvatures_sphere(body, u)[:, 0], spherical_gk(body, u))


def test_quermassintegrals_of_cap():
    """Test A_-1, A_0 and A_1 of a d = 3 cap."""
    alpha = 0.7
    q = quermassintegrals(cap_body(3, 1.0, alpha))
    assert q.A[-1].value == pytest.approx(4 * math.pi * j_lambda(3, 1.0, alpha), rel=1e-10)
    assert q.A[0].value == pytest.approx(4 * math.pi * math.sin(alpha) ** 2, rel=1e-10)
    assert q.A[1].value == pytest.approx(4 * math.pi * (alpha + math.sin(alpha) * math.cos(alpha)), rel=1e-6)
    assert q.W(0) == q.A[-1].value


def test_quermassintegrals_unsupported():
    """Test quermassintegrals off the unit sphere and in d = 4."""
    with pytest.raises(RepresentationError):
        quermassintegrals(cap_body(3, 2.0, 0.4))
    with pytest.raises(RepresentationError):
        quermassintegrals(cap_body(4, 1.0, 0.4))


def test_perimeter_duality_3d():
    """Test A_0(K) + A_0(K*) = 4 pi in d = 3."""
    body = ChartBody(SpaceForm(3, 1.0), Ellipsoid(np.diag([0.3, 0.5, 0.4]), [0.05, -0.02, 0.0]))
    total = quermassintegrals(body).A[0].value + quermassintegrals(dual_body(body)).A[0].value
    assert total == pytest.approx(4 * math.pi, rel=1e-6)


def test_volume_duality_2d():
    """Test vol_2(K) = 2 pi - P(K*)."""
    body = ChartBody(SpaceForm(2, 1.0), Fourier2D([0.6, 0.0, 0.04, 0.01], [0.0, 0.03, 0.0, -0.01]))
    total = volume_lambda(body).value + perimeter_lambda(dual_body(body)).value
    assert total == pytest.approx(2 * math.pi, rel=1e-6)
