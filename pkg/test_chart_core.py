"""
Tests for the trig-lambda kernels, gnomonic charts and chart bodies.
"""
import math

import numpy as np
import pytest

from sphereconvex.bodies.generators import cap_body
from sphereconvex.errors import AuditError, DomainError
from sphereconvex.geometry.chart_core import (
    ChartBody,
    SpaceForm,
    arctan_lambda,
    cos_lambda,
    dual_body,
    geodesic_distance,
    geodesic_point,
    gnomonic,
    j_lambda,
    j_lambda_inv,
    polar_body,
    recenter,
    sin_lambda,
    spherical_radial,
    tan_lambda,
    unproject,
)
from sphereconvex.geometry.functionals import volume_lambda
from sphereconvex.geometry.support import Cap, Ellipsoid, Fourier2D


def test_pythagorean_identity():
    """Test cos_lam^2 + lam sin_lam^2 = 1 on random (lam, t)."""
    rng = np.random.default_rng(3)
    for _ in range(50):
        lam = rng.uniform(0.01, 4.0)
        t = rng.uniform(0.0, math.pi / math.sqrt(lam))
        c, s = cos_lambda(lam, t), sin_lambda(lam, t)
        assert abs(c * c + lam * s * s - 1.0) < 1e-13


def test_euclidean_limit_of_kernels():
    """Test the lam = 0 kernels."""
    assert cos_lambda(0.0, 0.7) == 1.0
    assert sin_lambda(0.0, 0.7) == 0.7
    assert tan_lambda(0.0, 0.7) == 0.7
    assert j_lambda(3, 0.0, 0.7) == pytest.approx(0.7 ** 3 / 3, rel=1e-15)


def test_tan_rejects_equator():
    """Test tan_lambda at pi / (2 sqrt(lam))."""
    with pytest.raises(DomainError):
        tan_lambda(1.0, math.pi / 2)
    with pytest.raises(DomainError):
        cos_lambda(-1.0, 0.1)


def test_arctan_inverts_tan():
    """Test arctan_lambda o tan_lambda = id."""
    for lam in (0.5, 1.0, 2.0):
        t = np.linspace(0.01, 0.99, 7) * math.pi / (2 * math.sqrt(lam))
        np.testing.assert_allclose(arctan_lambda(lam, tan_lambda(lam, t)), t, rtol=1e-13)


def test_j_lambda_closed_forms():
    """Test J_lam against elementary antiderivatives."""
    alpha = 0.9
    assert j_lambda(2, 1.0, alpha) == pytest.approx(1.0 - math.cos(alpha), rel=1e-13)
    assert j_lambda(3, 1.0, alpha) == pytest.approx((alpha - math.sin(alpha) * math.cos(alpha)) / 2, rel=1e-13)
    # reflected branch past the equator
    assert j_lambda(2, 1.0, 2.5) == pytest.approx(1.0 - math.cos(2.5), rel=1e-13)
    # scaling J_lam(alpha) = lam^{-d/2} J_1(sqrt(lam) alpha)
    assert j_lambda(3, 4.0, 0.3) == pytest.approx(j_lambda(3, 1.0, 0.6) / 8.0, rel=1e-13)


def test_j_lambda_inverse():
    """Test the inverse of J_lam."""
    for d, lam in ((2, 1.0), (3, 0.5), (5, 2.0), (4, 0.0)):
        alpha = 0.4 if lam == 0.0 else 0.6 * math.pi / (2 * math.sqrt(lam))
        assert j_lambda_inv(d, lam, j_lambda(d, lam, alpha)) == pytest.approx(alpha, rel=1e-11)
    with pytest.raises(DomainError):
        j_lambda_inv(2, 1.0, -1.0)


def test_gnomonic_round_trip():
    """Test gnomonic and unproject are inverse."""
    rng = np.random.default_rng(11)
    space = SpaceForm(3, 2.0)
    center = np.array([0.2, -0.1, 0.3, 0.9])
    center /= np.linalg.norm(center)
    x = rng.uniform(-1.0, 1.0, size=(20, 3))
    back = gnomonic(space, center, unproject(space, center, x))
    np.testing.assert_allclose(back, x, atol=1e-12)


def test_gnomonic_rejects_far_hemisphere():
    """Test points below the equator of the chart center."""
    space = SpaceForm(2, 1.0)
    with pytest.raises(DomainError):
        gnomonic(space, None, np.array([[0.0, 0.0, -1.0]]))


def test_geodesic_point_maps_to_tan_radius():
    """Test that chart distance is tan_lam of the geodesic distance."""
    space = SpaceForm(2, 0.5)
    direction = np.array([0.6, 0.8])
    point = geodesic_point(space, None, direction, 1.1)
    chart = gnomonic(space, None, point[None, :])[0]
    assert np.linalg.norm(chart) == pytest.approx(tan_lambda(0.5, 1.1), rel=1e-12)
    assert geodesic_distance(space, space.pole, point) == pytest.approx(1.1, rel=1e-12)


def test_space_form_validation():
    """Test dimension and curvature checks."""
    with pytest.raises(DomainError):
        SpaceForm(1, 1.0)
    with pytest.raises(DomainError):
        SpaceForm(2, -0.5)
    assert SpaceForm(3, 0.0).max_radius == math.inf
    assert SpaceForm(3, 4.0).max_radius == pytest.approx(math.pi / 4)


def test_cap_radial_is_constant():
    """Test the radial function of a centered cap."""
    body = cap_body(3, 1.0, 0.6)
    rng = np.random.default_rng(1)
    u = rng.standard_normal((40, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    np.testing.assert_allclose(body.radial(u), math.tan(0.6), rtol=1e-10)
    np.testing.assert_allclose(spherical_radial(body, u), 0.6, rtol=1e-10)


def test_fourier_radial_matches_ray_march():
    """Test the radial function against a dense boundary-ray intersection."""
    rep = Fourier2D([0.5, 0.0, 0.03, 0.01], [0.0, 0.02, -0.015, 0.005])
    body = ChartBody(SpaceForm(2, 1.0), rep)
    theta = np.linspace(0.0, 2 * math.pi, 200_001)
    normals = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    x = body.jet(normals).grad
    phi = np.unwrap(np.arctan2(x[:, 1], x[:, 0]))
    r = np.linalg.norm(x, axis=1)
    for target in (0.1, 1.3, 2.9, 4.4):
        shifted = target + 2 * math.pi * np.floor((phi[0] - target) / (2 * math.pi) + 1)
        expected = np.interp(shifted, phi, r)
        got = body.radial(np.array([[math.cos(target), math.sin(target)]]))[0]
        assert got == pytest.approx(expected, rel=1e-8)


def test_audit_rejects_non_convex_support():
    """Test the C2+ audit on a support function with h + h'' < 0."""
    with pytest.raises(AuditError):
        ChartBody(SpaceForm(2, 1.0), Fourier2D([0.3, 0.0, 0.0, 0.1]))
    with pytest.raises(AuditError):
        ChartBody(SpaceForm(2, 0.0), Ellipsoid(np.eye(2), [2.0, 0.0]))


def test_properness_bound():
    """Test a declared chart radius bound."""
    with pytest.raises(AuditError):
        ChartBody(SpaceForm(2, 1.0), Ellipsoid(np.eye(2)), properness_bound=0.5)
    body = ChartBody(SpaceForm(2, 1.0), Ellipsoid(np.eye(2)))
    assert body.chart_radius == pytest.approx(1.0)


def test_ball_polarity():
    """Test chart ball of radius r -> chart ball of radius 1/r."""
    body = ChartBody(SpaceForm(2, 0.0), Ellipsoid(0.25 * np.eye(2)))
    polar = polar_body(body)
    u = np.array([[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]])
    np.testing.assert_allclose(polar.h(u), 2.0, rtol=1e-12)


def test_ellipsoid_polarity():
    """Test Ellipsoid A -> Ellipsoid A^-1."""
    a = np.array([[2.0, 0.3], [0.3, 0.5]])
    polar = polar_body(ChartBody(SpaceForm(2, 0.0), Ellipsoid(a)))
    np.testing.assert_allclose(polar.support.matrix, np.linalg.inv(a), rtol=1e-12)


def test_double_polar_of_fourier_body():
    """Test the polar refit returns the original support."""
    rep = Fourier2D([0.6, 0.0, 0.04, 0.0, 0.01], [0.0, 0.03, 0.0, -0.01, 0.0])
    body = ChartBody(SpaceForm(2, 1.0), rep)
    back = polar_body(polar_body(body))
    u = np.stack([np.cos(np.linspace(0, 6, 50)), np.sin(np.linspace(0, 6, 50))], axis=1)
    np.testing.assert_allclose(back.h(u), body.h(u), rtol=1e-6)


def test_dual_of_cap():
    """Test C(alpha)* = C(pi/2 - alpha) and the self-dual cap."""
    dual = dual_body(cap_body(2, 1.0, 0.4))
    assert isinstance(dual.support, Cap)
    assert dual.support.alpha == pytest.approx(math.pi / 2 - 0.4)
    self_dual = dual_body(cap_body(3, 1.0, math.pi / 4))
    assert self_dual.support.alpha == pytest.approx(math.pi / 4)
    scaled = dual_body(cap_body(2, 4.0, 0.3))
    assert scaled.support.alpha == pytest.approx(math.pi / 4 - 0.3)


def test_dual_needs_curvature():
    """Test dual_body at lam = 0."""
    with pytest.raises(DomainError):
        dual_body(ChartBody(SpaceForm(2, 0.0), Ellipsoid(np.eye(2))))


def test_dual_involution():
    """Test dual(dual(K)) = K for a d = 2 body."""
    rep = Fourier2D([0.7, 0.0, 0.05, 0.01], [0.0, 0.02, 0.01, 0.0])
    body = ChartBody(SpaceForm(2, 1.0), rep)
    back = dual_body(dual_body(body))
    u = np.stack([np.cos(np.linspace(0, 6, 64)), np.sin(np.linspace(0, 6, 64))], axis=1)
    assert np.max(np.abs(back.h(u) - body.h(u))) < 1e-6


def test_ellipsoid_dual_is_exact():
    """Test the closed-form dual of an ellipsoid chart."""
    body = ChartBody(SpaceForm(3, 1.0), Ellipsoid(np.diag([0.4, 0.25, 0.6]), [0.05, 0.0, -0.1]))
    back = dual_body(dual_body(body))
    np.testing.assert_allclose(back.support.matrix, body.support.matrix, rtol=1e-10)
    np.testing.assert_allclose(back.support.center, body.support.center, atol=1e-12)


def test_recenter_cap_at_its_center():
    """Test recentering an offset cap at its own center."""
    space = SpaceForm(2, 1.0)
    chart_center = np.array([0.2, -0.1])
    body = cap_body(2, 1.0, 0.5, center=chart_center)
    moved = recenter(body, unproject(space, None, chart_center[None, :])[0])
    np.testing.assert_allclose(moved.support.center, 0.0, atol=1e-12)
    u = np.array([[1.0, 0.0], [0.0, -1.0]])
    np.testing.assert_allclose(moved.h(u), math.tan(0.5), rtol=1e-12)


def test_recenter_round_trip_and_volume():
    """Test recenter there and back, and invariance of the lambda-volume."""
    rep = Fourier2D([0.5, 0.0, 0.03, 0.01], [0.0, 0.02, 0.0, 0.005])
    body = ChartBody(SpaceForm(2, 1.0), rep)
    target = np.array([0.05, -0.03, 1.0])
    target /= np.linalg.norm(target)
    moved = recenter(body, target)
    back = recenter(moved, body.center)
    u = np.stack([np.cos(np.linspace(0, 6, 40)), np.sin(np.linspace(0, 6, 40))], axis=1)
    assert np.max(np.abs(back.h(u) - body.h(u))) < 1e-7
    before, after = volume_lambda(body).value, volume_lambda(moved).value
    assert abs(after - before) / before < 1e-7


def test_recenter_rejects_exterior_center():
    """Test a new center outside the body."""
    body = cap_body(2, 1.0, 0.3)
    far = np.array([0.0, 0.9, 0.4])
    with pytest.raises(DomainError):
        recenter(body, far / np.linalg.norm(far))


def test_rotation_preserves_volume():
    """Test rotating a cap about the sphere keeps its volume."""
    body = cap_body(2, 1.0, 0.5)
    angle = 0.3
    rotation = np.array([[1.0, 0.0, 0.0],
                         [0.0, math.cos(angle), -math.sin(angle)],
                         [0.0, math.sin(angle), math.cos(angle)]])
    rotated = body.rotated(rotation)
    assert volume_lambda(rotated).value == pytest.approx(volume_lambda(body).value, rel=1e-10)


def test_descriptor_round_trip_fields():
    """Test the body-spec document of a chart body."""
    descriptor = cap_body(3, 0.5, 0.4).descriptor()
    assert descriptor["dim"] == 3
    assert descriptor["lambda"] == 0.5
    assert descriptor["rep"]["kind"] == "cap"
    assert descriptor["rep"]["parameters"]["alpha"] == 0.4
