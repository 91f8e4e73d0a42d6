"""
Tests for the verification suites.
"""
import math

import numpy as np
import pytest

from sphereconvex.bodies.generators import cap_body
from sphereconvex.errors import DomainError
from sphereconvex.geometry.chart_core import ChartBody, SpaceForm
from sphereconvex.geometry.support import Ellipsoid, Fourier2D
from sphereconvex.models.schemas import Verdict
from sphereconvex.verify.reports import count_violated
from sphereconvex.verify.suites import (
    DVI,
    II,
    check_implications,
    forms_agree,
    observed_order,
    point_symmetric,
    run_suites,
    verify_core_suite,
    verify_entropy_suite,
    verify_euclidean_suite,
    verify_floating_suite,
    verify_lambda_suite,
    verify_limits,
)


def _by_name(reports):
    return {r.name: r for r in reports}


def _smooth_body() -> ChartBody:
    return ChartBody(SpaceForm(2, 1.0), Fourier2D([0.6, 0.0, 0.04, 0.01], [0.0, 0.03, 0.0, -0.01]))


@pytest.mark.parametrize("d", [2, 3])
def test_core_suite_is_sharp_on_caps(d):
    """Test II and dVI hold with equality on a cap."""
    reports = _by_name(verify_core_suite(cap_body(d, 1.0, 0.5)))
    for name in (II,) + DVI:
        assert reports[name].verdict != Verdict.VIOLATED
        assert reports[name].equality, name


def test_dual_isoperimetric_identity_in_the_plane():
    """Test P(K*) = 2 pi cos alpha_K at d = 2."""
    reports = _by_name(verify_core_suite(_smooth_body()))
    identity = reports["dII (d=2): P(K*) = 2 pi cos alpha_K"]
    assert identity.verdict != Verdict.VIOLATED
    assert identity.equality


def test_dual_perimeter_identity_in_space():
    """Test P(K*) = 4 pi - P(K) at d = 3."""
    body = ChartBody(SpaceForm(3, 1.0), Ellipsoid(np.diag([0.3, 0.5, 0.4]), [0.05, -0.02, 0.0]))
    reports = verify_core_suite(body)
    identity = _by_name(reports)["dPI (d=3): P(K*) = 4 pi - P(K)"]
    assert identity.equality
    assert count_violated(reports) == 0
    assert all(check_implications(reports).values())
    assert all(forms_agree(reports).values())


def test_core_suite_needs_unit_sphere():
    """Test core suite at lam = 2."""
    with pytest.raises(DomainError):
        verify_core_suite(cap_body(2, 2.0, 0.3))


def test_floating_suite_on_smooth_body():
    """Test the floating-area suite on a smooth planar body."""
    reports = verify_floating_suite(_smooth_body(), p_grid=[1.0, 2.0, "inf"])
    assert reports
    assert count_violated(reports) == 0


def test_entropy_suite_on_smooth_body():
    """Test the entropy suite on a smooth planar body."""
    reports = verify_entropy_suite(_smooth_body())
    assert count_violated(reports) == 0
    assert _by_name(reports)["KL divergence >= 0"].verdict == Verdict.HOLDS


def test_euclidean_suite_on_ellipse():
    """Test the Euclidean inequalities on an ellipse."""
    body = ChartBody(SpaceForm(2, 0.0), Ellipsoid(np.diag([0.64, 0.09])))
    assert count_violated(verify_euclidean_suite(body)) == 0


def test_point_symmetry():
    """Test symmetric and asymmetric bodies."""
    assert point_symmetric(ChartBody(SpaceForm(2, 1.0), Ellipsoid(np.diag([0.3, 0.1]))))
    assert not point_symmetric(ChartBody(SpaceForm(2, 0.0), Fourier2D([0.6, 0.0, 0.0, 0.05])))


def test_limits_converge():
    """Test lam -> 0 convergence orders of the lambda functionals."""
    body = ChartBody(SpaceForm(2, 1.0), Ellipsoid(np.diag([0.16, 0.09]), [0.05, 0.0]))
    study = verify_limits(body, lambda_grid=[0.1, 0.05, 0.025, 0.0125])
    assert study.orders
    for label, order in study.orders.items():
        assert order >= 0.9, label
    assert count_violated(study.reports) == 0
    assert {row.lam for row in study.rows} >= {0.0, 1.0, 0.1}


def test_observed_order_uses_finest_pair():
    """Test the order comes from the finest pair above the roundoff floor."""
    lams = [0.1, 0.05, 0.025, 0.0125]
    errors = [0.94, 0.551, 0.304, 0.161]
    assert observed_order(lams, errors, 1e-12) == pytest.approx(math.log(0.304 / 0.161) / math.log(2.0))
    rounded = [0.94, 0.551, 0.304, 1e-15]
    assert observed_order(lams, rounded, 1e-12) == pytest.approx(math.log(0.551 / 0.304) / math.log(2.0))
    assert observed_order(lams, [1e-15] * 4, 1e-12) == math.inf


def test_limits_on_default_grid():
    """Test the default sweep of an off-center ellipse with small support values."""
    body = ChartBody(SpaceForm(2, 1.0), Ellipsoid(np.diag([0.16, 0.09]), [0.05, 0.0]))
    study = verify_limits(body)
    assert study.orders["E_PW^lam,o"] >= 0.9
    assert count_violated(study.reports) == 0
    assert all(r.precondition_flags["finest pair below min h^2"] for r in study.reports)


def test_limits_skip_grids_above_min_support():
    """Test a grid that never goes below min h^2 gives no verdict."""
    study = verify_limits(cap_body(2, 1.0, 0.4), lambda_grid=[0.5, 0.3])
    assert study.reports
    assert all(r.verdict == Verdict.SKIPPED for r in study.reports)


def test_limits_reject_nonpositive_grid():
    """Test lambda grid validation."""
    with pytest.raises(DomainError):
        verify_limits(cap_body(2, 1.0, 0.4), lambda_grid=[0.1, 0.0])


def test_lambda_suite_polar_duality_and_hoelder():
    """Test the weighted polar duality and both Hoelder triples on a smooth body."""
    reports = _by_name(verify_lambda_suite(_smooth_body(), p_grid=[1.0, 2.0]))
    assert count_violated(reports.values()) == 0
    for name in ("weighted polar duality p=1: as_1(K) = as_4(K-bar°)",
                 "weighted polar duality p=2: as_2(K) = as_2(K-bar°)"):
        assert reports[name].verdict != Verdict.VIOLATED
        assert reports[name].equality
    for name in ("as Hoelder p=1 (q=2, r=0.5)", "as Hoelder p=1 (q=3, r=0.25)"):
        assert reports[name].verdict != Verdict.VIOLATED


def test_floating_suite_hoelder_triples():
    """Test the floating-area Hoelder chain samples two triples per p."""
    names = {r.name for r in verify_floating_suite(_smooth_body(), p_grid=[2.0], duality=False)}
    assert {"Omega Hoelder p=2 (q=4, r=1)", "Omega Hoelder p=2 (q=6, r=0.5)"} <= names


@pytest.mark.parametrize("d", [2, 3])
def test_volume_bound_dimension_flag(d):
    """Test the volume bounds record whether d >= 3."""
    reports = verify_floating_suite(cap_body(d, 1.0, 0.5), p_grid=[1.0], duality=False)
    bounds = [r for r in reports if r.name.startswith("volume bound")]
    assert bounds
    for report in bounds:
        assert report.precondition_flags["d >= 3"] == (d >= 3)


def test_run_suites():
    """Test dispatch, skipping and unknown names."""
    reports = run_suites(cap_body(2, 2.0, 0.3), ["core"])
    assert len(reports) == 1
    assert reports[0].verdict == Verdict.SKIPPED
    with pytest.raises(DomainError):
        run_suites(cap_body(2, 1.0, 0.3), ["nonsense"])


def test_run_suites_on_cap_has_no_violations():
    """Test every applicable suite on a unit-sphere cap."""
    reports = run_suites(cap_body(2, 1.0, 0.5), ["core", "floating", "entropy", "lambda"])
    assert count_violated(reports) == 0
    assert not any(r.verdict == Verdict.SKIPPED and r.name.endswith("suite") for r in reports)
    assert math.isfinite(min(r.margin for r in reports))
