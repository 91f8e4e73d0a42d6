"""
Tests for the stability quantities, constants and checks.
"""
import math

import pytest

from sphereconvex.bodies.generators import cap_body
from sphereconvex.errors import DomainError
from sphereconvex.geometry.chart_core import ChartBody, SpaceForm
from sphereconvex.geometry.stability import (
    apparatus_checks,
    beta_constant,
    check_intermediate_bounds,
    check_lemma_hr,
    check_stability_theorems,
    check_symmetric_difference,
    containment_radius,
    gamma_constant,
    stability_quantities,
    tau_constant,
)
from sphereconvex.geometry.support import Fourier2D
from sphereconvex.models.schemas import Verdict


def _perturbed_cap(alpha: float = 0.5, eps: float = 0.01) -> ChartBody:
    return ChartBody(SpaceForm(2, 1.0), Fourier2D([math.tan(alpha), 0.0, eps], [0.0, 0.0, 0.0]))


def test_constants():
    """Test beta, gamma and tau at alpha = pi/4."""
    alpha = math.pi / 4
    assert beta_constant(3, alpha) == pytest.approx(6.0)
    expected = math.pi / 2 * math.sqrt((1 + 8 / (12 * math.pi ** 2)) / math.sin(alpha))
    assert gamma_constant(3, alpha) == pytest.approx(expected)
    assert tau_constant(3, alpha) == pytest.approx(math.sqrt(3.0))


def test_containment_radius():
    """Test sqrt(d(d-2)/lam) and its domain."""
    assert containment_radius(3, 1.0) == pytest.approx(math.sqrt(3.0))
    assert containment_radius(4, 2.0) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        containment_radius(2, 1.0)
    with pytest.raises(DomainError):
        containment_radius(3, 0.0)


def test_cap_has_no_deficit():
    """Test Delta_2, Delta and both deficits vanish on a cap."""
    bundle = stability_quantities(cap_body(3, 1.0, 0.5))
    assert bundle.alpha_k.value == pytest.approx(0.5, rel=1e-10)
    assert bundle.delta2.value == pytest.approx(0.0, abs=1e-10)
    assert bundle.delta_sym.value == pytest.approx(0.0, abs=1e-9)
    assert bundle.deficit_dual_volume.value == pytest.approx(0.0, abs=1e-9)
    assert bundle.deficit_floating.value == pytest.approx(0.0, abs=1e-9)
    assert bundle.containment


def test_projected_volume_stability_is_sharp_on_caps():
    """Test the projected-volume bound is an equality on a cap."""
    report = check_lemma_hr(cap_body(3, 1.0, 0.5))
    assert report.verdict == Verdict.HOLDS
    assert report.equality


def test_projected_volume_stability_on_perturbed_cap():
    """Test the projected-volume bound on tan(alpha) + eps cos(2 theta)."""
    body = _perturbed_cap()
    bundle = stability_quantities(body)
    assert bundle.delta2.value > 0.0
    report = check_lemma_hr(body, bundle)
    assert report.verdict != Verdict.VIOLATED


def test_symmetric_difference_chain():
    """Test Delta / omega <= Delta_2 and the corollary on a perturbed cap."""
    bundle = stability_quantities(_perturbed_cap(0.6, 0.02))
    chain, corollary = check_symmetric_difference(bundle)
    assert chain.verdict != Verdict.VIOLATED
    assert corollary.verdict != Verdict.VIOLATED


def test_stability_theorems_on_cap():
    """Test both stability theorems on a d = 3 cap."""
    dual, floating = check_stability_theorems(cap_body(3, 1.0, 0.5))
    assert dual.verdict != Verdict.VIOLATED
    assert floating.verdict != Verdict.VIOLATED
    assert all(floating.precondition_flags.values())


def test_floating_theorem_skipped_in_the_plane():
    """Test the floating-area theorem needs d >= 3."""
    dual, floating = check_stability_theorems(_perturbed_cap())
    assert floating.verdict == Verdict.SKIPPED
    assert floating.precondition_flags["d >= 3"] is False
    assert dual.verdict != Verdict.VIOLATED


def test_floating_theorem_recorded_in_scans():
    """Test enforce=False keeps the verdict but records the failing flag."""
    _, floating = check_stability_theorems(_perturbed_cap(), enforce=False)
    assert floating.verdict != Verdict.SKIPPED
    assert floating.precondition_flags["d >= 3"] is False


def test_intermediate_bounds_on_cap():
    """Test the Delta_2 floating bound and the dual volume bound on a cap."""
    delta_bound, dual_bound = check_intermediate_bounds(stability_quantities(cap_body(3, 1.0, 0.4)))
    assert delta_bound.verdict != Verdict.VIOLATED
    assert dual_bound.verdict != Verdict.VIOLATED


def test_stability_needs_unit_sphere():
    """Test stability quantities at lam != 1."""
    with pytest.raises(DomainError):
        stability_quantities(cap_body(3, 2.0, 0.3))


@pytest.mark.parametrize("d,lam", [(2, 1.0), (3, 1.0), (4, 1.0), (3, 2.5)])
def test_apparatus_checks(d, lam):
    """Test H' >= d, convexity of H and the sign flip of G''."""
    checks = apparatus_checks(d, lam)
    assert all(checks.values()), checks
