"""
Tests for volumes, perimeters, the L_p family, radii and entropies.
"""
import math

import numpy as np
import pytest

from sphereconvex.bodies.generators import cap_body
from sphereconvex.errors import DomainError
from sphereconvex.geometry.chart_core import ChartBody, SpaceForm, dual_body, polar_body
from sphereconvex.geometry.functionals import (
    as_p_euclid,
    as_p_lambda_o,
    cap_as_p,
    cap_entropy_c,
    cap_entropy_power,
    cap_entropy_pw,
    cap_omega_p,
    cap_perimeter,
    cap_volume,
    chart_volume_euclid,
    dual_curvature_entropy,
    dual_exponent,
    dual_perimeter_lambda,
    dual_volume_lambda,
    duality_factor,
    entropy_lambda_families,
    entropy_spherical,
    euclid_ball_as_p,
    euclid_entropies,
    fv_const,
    fv_ratio,
    lp_exponent,
    omega_p_cap_by_perimeter_2d,
    omega_p_cap_by_volume_2d,
    omega_p_lambda,
    omega_p_lambda_chart,
    parse_p,
    perimeter_lambda,
    polar_volume_euclid,
    radii,
    volume_lambda,
)
from sphereconvex.geometry.quadrature import ball_volume
from sphereconvex.geometry.support import Ellipsoid, Fourier2D

P_VALUES = (0.5, 1.0, 2.0, "inf")


def _fourier_body(lam: float = 1.0) -> ChartBody:
    return ChartBody(SpaceForm(2, lam), Fourier2D([0.6, 0.0, 0.04, 0.01], [0.0, 0.03, 0.0, -0.01]))


def _alpha(lam: float) -> float:
    return 0.6 / math.sqrt(lam)


def test_exponent_helpers():
    """Test parse_p, lp_exponent, dual_exponent and duality_factor."""
    assert parse_p("inf") == math.inf
    assert parse_p(" Infinity ") == math.inf
    assert parse_p("2") == 2.0
    assert lp_exponent(2, 1) == pytest.approx(1 / 3)
    assert lp_exponent(3, "inf") == 1.0
    with pytest.raises(DomainError):
        lp_exponent(2, -2)
    assert dual_exponent(2, 0) == math.inf
    assert dual_exponent(3, "inf") == 0.0
    assert dual_exponent(3, 1.5) == pytest.approx(6.0)
    assert duality_factor(2, 1.0, 0.5) == 1.0
    assert duality_factor(3, 4.0, "inf") == pytest.approx(4.0)


def test_error_propagation():
    """Test error bars through a ratio."""
    a = fv_const(2.0, "a").model_copy(update={"abs_error": 0.1})
    b = fv_const(4.0, "b").model_copy(update={"abs_error": 0.2})
    ratio = fv_ratio(a, b, "a/b")
    assert ratio.value == 0.5
    assert ratio.abs_error == pytest.approx(0.1 / 4 + 0.5 * 0.2 / 4)


@pytest.mark.parametrize("d", [2, 3, 5])
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_cap_closed_forms(d, lam):
    """Test every functional of a cap against its closed form."""
    alpha = _alpha(lam)
    body = cap_body(d, lam, alpha)
    assert volume_lambda(body).value == pytest.approx(cap_volume(d, lam, alpha), rel=1e-10)
    assert perimeter_lambda(body).value == pytest.approx(cap_perimeter(d, lam, alpha), rel=1e-10)
    for p in P_VALUES:
        assert omega_p_lambda(body, p).value == pytest.approx(cap_omega_p(d, lam, alpha, p), rel=1e-10)
        assert as_p_lambda_o(body, p).value == pytest.approx(cap_as_p(d, lam, alpha, p), rel=1e-10)
    assert entropy_lambda_families(body, "E_C^lambda").value == pytest.approx(cap_entropy_c(d, lam, alpha), abs=1e-10)
    assert entropy_lambda_families(body, "E_PW^lambda,o").value == pytest.approx(cap_entropy_pw(d, lam, alpha), abs=1e-10)


def test_floating_area_of_quarter_cap():
    """Test Omega_1 = pi sqrt(2) for d = 2, alpha = pi/4."""
    body = cap_body(2, 1.0, math.pi / 4)
    assert omega_p_lambda(body, 1).value == pytest.approx(math.pi * math.sqrt(2), rel=1e-12)


def test_weighted_affine_area_of_cap():
    """Test as_p^{lam,o} of the cap lam = 2, alpha = 0.4."""
    body = cap_body(3, 2.0, 0.4)
    for p in (1.0, 3.0):
        assert as_p_lambda_o(body, p).value == pytest.approx(cap_as_p(3, 2.0, 0.4, p), rel=1e-10)


def test_euclidean_ball_affine_area():
    """Test as_p(r B) = omega r^{d(d-p)/(d+p)}."""
    r = 0.7
    for d in (2, 3):
        body = ChartBody(SpaceForm(d, 0.0), Ellipsoid(r * r * np.eye(d)))
        for p in (0.5, 1.0, 2.0, "inf"):
            assert as_p_lambda_o(body, p).value == pytest.approx(euclid_ball_as_p(d, r, p), rel=1e-10)


def test_p_zero_is_perimeter():
    """Test Omega_0 = P."""
    body = _fourier_body()
    assert omega_p_lambda(body, 0).value == pytest.approx(perimeter_lambda(body).value, rel=1e-14)


def test_combined_integrand_matches_curvature_form():
    """Test the combined chart integrand against H_lam^{p/(d+p)} sigma_lam."""
    for lam in (0.5, 2.0):
        body = _fourier_body(lam)
        for p in (0.5, 1.0, 3.0, "inf"):
            assert omega_p_lambda_chart(body, p).value == pytest.approx(omega_p_lambda(body, p).value, rel=1e-10)


def test_printed_exponent_fails_on_caps():
    """Test the printed first exponent misses the cap closed form by cos^{-p(d-1)/(d+p)}."""
    d, lam, alpha, p = 3, 2.0, 0.5, 1.0
    body = cap_body(d, lam, alpha)
    exact = cap_omega_p(d, lam, alpha, p)
    corrected = omega_p_lambda_chart(body, p).value
    printed = omega_p_lambda_chart(body, p, corrected=False).value
    assert corrected == pytest.approx(exact, rel=1e-10)
    assert printed != pytest.approx(exact, rel=1e-3)
    factor = math.cos(math.sqrt(lam) * alpha) ** (-p * (d - 1) / (d + p))
    assert printed == pytest.approx(exact * factor, rel=1e-10)


def test_unit_curvature_endpoint_is_bitwise():
    """Test the lam = 1 endpoint of the weighted families reproduces the spherical values exactly."""
    body = _fourier_body(1.0)
    for p in (0.5, 1.0, 2.0):
        assert as_p_lambda_o(body, p).value == omega_p_lambda(body, p).value
    assert entropy_lambda_families(body, "E_PW^lambda,o").value == entropy_lambda_families(body, "E_C^lambda").value
    assert entropy_spherical(body).E_s.value == entropy_lambda_families(body, "E_C").value


def test_as_p_euclid_reads_chart_at_zero_curvature():
    """Test the centro-affine area of a chart body."""
    body = _fourier_body(1.0)
    flat = body.with_lambda(0.0)
    assert as_p_euclid(body, 1).value == as_p_lambda_o(flat, 1).value


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 4.0, "inf"])
def test_duality_ellipse(p):
    """Test Omega_p(K*) = factor * Omega_{d^2/p}(K) on an exact dual."""
    lam = 2.0
    body = ChartBody(SpaceForm(2, lam), Ellipsoid(np.diag([0.2, 0.09]), [0.05, 0.02]))
    dual = dual_body(body)
    lhs = omega_p_lambda(dual, p).value
    rhs = duality_factor(2, lam, p) * omega_p_lambda(body, dual_exponent(2, p)).value
    assert lhs == pytest.approx(rhs, rel=1e-8)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, "inf"])
def test_duality_refitted_body(p):
    """Test the duality relation on a refitted d = 2 dual."""
    body = _fourier_body(1.0)
    dual = dual_body(body)
    lhs = omega_p_lambda(dual, p).value
    rhs = omega_p_lambda(body, dual_exponent(2, p)).value
    assert lhs == pytest.approx(rhs, rel=1e-4)


def test_self_dual_exponent():
    """Test Omega_2(K*) = Omega_2(K) for d = 2."""
    body = _fourier_body(1.0)
    assert omega_p_lambda(dual_body(body), 2).value == pytest.approx(omega_p_lambda(body, 2).value, rel=1e-4)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
def test_weighted_area_polar_duality(lam, p):
    """Test as_p^{lam,o}(K) = as_{d^2/p}^{lam,o} of the unscaled chart polar."""
    ellipse = ChartBody(SpaceForm(2, lam), Ellipsoid(np.diag([0.2, 0.09]), [0.05, 0.02]))
    lhs = as_p_lambda_o(ellipse, p).value
    assert lhs == pytest.approx(as_p_lambda_o(polar_body(ellipse), 4.0 / p).value, rel=1e-8)

    body = _fourier_body(lam)
    lhs = as_p_lambda_o(body, p).value
    assert lhs == pytest.approx(as_p_lambda_o(polar_body(body), 4.0 / p).value, rel=1e-4)


def test_dual_perimeter_two_ways():
    """Test P(K*) from Omega_inf against the refitted dual."""
    body = _fourier_body(1.0)
    via_omega = dual_perimeter_lambda(body).value
    direct = dual_perimeter_lambda(body, direct=True).value
    assert via_omega == pytest.approx(direct, rel=1e-6)
    with pytest.raises(DomainError):
        dual_perimeter_lambda(body.with_lambda(0.0))


def test_dual_volume_from_support():
    """Test vol(K*) from h against the volume of the refitted dual."""
    body = _fourier_body(1.0)
    assert dual_volume_lambda(body).value == pytest.approx(volume_lambda(dual_body(body)).value, rel=1e-6)
    cap = cap_body(3, 1.0, 0.5)
    assert dual_volume_lambda(cap).value == pytest.approx(cap_volume(3, 1.0, math.pi / 2 - 0.5), rel=1e-10)


def test_radii():
    """Test alpha_K and alpha_P on caps and the isoperimetric order on a body."""
    alpha_k, alpha_p = radii(cap_body(3, 1.0, 0.7))
    assert alpha_k.value == pytest.approx(0.7, rel=1e-10)
    assert alpha_p.value == pytest.approx(0.7, rel=1e-10)
    alpha_k, alpha_p = radii(_fourier_body(1.0))
    assert alpha_p.value >= alpha_k.value - alpha_k.abs_error - alpha_p.abs_error


def test_planar_radius_duality():
    """Test alpha_K + alpha_P(K*) = pi/2 for d = 2."""
    body = _fourier_body(1.0)
    alpha_k, _ = radii(body)
    _, alpha_p_dual = radii(dual_body(body))
    assert alpha_k.value + alpha_p_dual.value == pytest.approx(math.pi / 2, rel=1e-6)


def test_planar_cap_forms():
    """Test the d = 2 cap values by volume and by perimeter."""
    alpha = 0.8
    volume = cap_volume(2, 1.0, alpha)
    perimeter = cap_perimeter(2, 1.0, alpha)
    for p in (0.5, 1.0, 2.0):
        exact = cap_omega_p(2, 1.0, alpha, p)
        assert omega_p_cap_by_volume_2d(volume, p) == pytest.approx(exact, rel=1e-12)
        assert omega_p_cap_by_perimeter_2d(perimeter, p) == pytest.approx(exact, rel=1e-12)


def test_spherical_entropy_of_caps():
    """Test E^s, entropy power and D_KL of caps."""
    quarter = entropy_spherical(cap_body(2, 1.0, math.pi / 4))
    assert abs(quarter.E_s.value) < 1e-9
    assert abs(quarter.kl.value) < 1e-9
    bundle = entropy_spherical(cap_body(3, 1.0, 0.5))
    assert bundle.E_s.value == pytest.approx(-2 * math.log(math.tan(0.5)), rel=1e-10)
    assert bundle.entropy_power.value == pytest.approx(cap_entropy_power(3, 0.5), rel=1e-10)
    assert abs(bundle.kl.value) < 1e-9
    for _, probe in bundle.p_limit_check:
        assert probe == pytest.approx(cap_entropy_power(3, 0.5), rel=1e-9)


def test_spherical_entropy_of_body():
    """Test D_KL >= 0 and the probe sequence on a non-cap body."""
    bundle = entropy_spherical(_fourier_body(1.0))
    assert bundle.kl.value >= -bundle.kl.abs_error
    assert bundle.extrapolated == pytest.approx(bundle.entropy_power.value, rel=1e-3)
    with pytest.raises(DomainError):
        entropy_spherical(_fourier_body(2.0))


def test_dual_curvature_entropy():
    """Test E^s(K*) read off K against the refitted dual."""
    body = _fourier_body(1.0)
    direct = entropy_spherical(dual_body(body)).E_s.value
    assert dual_curvature_entropy(body).value == pytest.approx(direct, abs=1e-6)


def test_unknown_entropy_family():
    """Test an unknown entropy name."""
    with pytest.raises(DomainError):
        entropy_lambda_families(_fourier_body(), "E_X")


def test_euclidean_ball_entropies():
    """Test E_C, E_h and E_PW of a ball of radius r."""
    r = 0.8
    for d in (2, 3):
        values = euclid_entropies(ChartBody(SpaceForm(d, 0.0), Ellipsoid(r * r * np.eye(d))))
        assert values.E_C.value == pytest.approx(-(d - 1) * math.log(r), abs=1e-12)
        assert values.E_h.value == pytest.approx(math.log(r), abs=1e-12)
        assert values.E_PW.value == pytest.approx(-2 * d * math.log(r), abs=1e-12)
        assert values.converged


def test_euclidean_entropy_chain():
    """Test E_C >= E_h - log(vol/kappa) >= -((d-1)/d) log(vol/kappa) on a centered body."""
    body = ChartBody(SpaceForm(2, 0.0), Ellipsoid(np.diag([0.8, 0.3])))
    values = euclid_entropies(body)
    ratio = chart_volume_euclid(body).value / ball_volume(2)
    middle = values.E_h.value - math.log(ratio)
    assert values.E_C.value >= middle - 1e-10
    assert middle >= -0.5 * math.log(ratio) - 1e-10


def test_euclidean_information_inequality():
    """Test E_PW >= -log(vol(K)/vol(K°))."""
    body = ChartBody(SpaceForm(2, 0.0), Fourier2D([0.6, 0.0, 0.04, 0.01], [0.0, 0.03, 0.0, -0.01]))
    values = euclid_entropies(body)
    bound = -math.log(chart_volume_euclid(body).value / polar_volume_euclid(body).value)
    assert values.E_PW.value >= bound - 1e-10
