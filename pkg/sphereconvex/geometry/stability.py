"""
Stability of the dual volume and floating area inequalities on the sphere.

All quantities are evaluated in the GHS chart, where both K and the ball
C_K(o) of equal volume are star-shaped about the origin, so every
integral is a radial one.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from sphereconvex.errors import DomainError
from sphereconvex.geometry.centers import CenterResult, ghs_center
from sphereconvex.geometry.chart_core import (
    ChartBody,
    cos_lambda,
    j_lambda,
    j_lambda_inv,
    sin_lambda,
    tan_lambda,
)
from sphereconvex.geometry.functionals import (
    cap_omega_p,
    chart_volume_euclid,
    dual_volume_lambda,
    omega_p_lambda,
)
from sphereconvex.geometry.quadrature import ball_volume, integrate_values, rule_for, sphere_area
from sphereconvex.models.schemas import FunctionalValue, InequalityReport
from sphereconvex.verify.reports import compare

logger = logging.getLogger(__name__)


# ==================== Projected-Volume Apparatus ====================

def _angle(d: int, lam: float, t: float) -> float:
    return j_lambda_inv(d, lam, t)


def h_lambda(d: int, lam: float, t: float) -> float:
    """H_lam(t) = tan_lam(J_lam^{-1}(t))^d, the chart volume ratio of a ball of volume omega t."""
    return tan_lambda(lam, _angle(d, lam, t)) ** d


def h_lambda_prime(d: int, lam: float, t: float) -> float:
    """d / cos_lam(J^{-1}(t))^{d+1}, at least d."""
    return d / cos_lambda(lam, _angle(d, lam, t)) ** (d + 1)


def h_lambda_second(d: int, lam: float, t: float) -> float:
    """lam d (d+1) / (cos^{d+2} sin^{d-2}), at least lam d (d+1)."""
    a = _angle(d, lam, t)
    return lam * d * (d + 1) / (cos_lambda(lam, a) ** (d + 2) * sin_lambda(lam, a) ** (d - 2))


def g_lambda(d: int, lam: float, t: float) -> float:
    """G_lam(t) = sin_lam^d cos_lam^{-1/d} at J^{-1}(t)."""
    a = _angle(d, lam, t)
    return sin_lambda(lam, a) ** d * cos_lambda(lam, a) ** (-1.0 / d)


def g_lambda_prime(d: int, lam: float, t: float) -> float:
    a = _angle(d, lam, t)
    s, c = sin_lambda(lam, a), cos_lambda(lam, a)
    return d * c ** (-(d + 1) / d) * (1.0 - lam * (d * d - 1) / (d * d) * s * s)


def g_lambda_second(d: int, lam: float, t: float) -> float:
    """
    lam (d+1) s^{2-d} c^{-(2d+1)/d} [(2-d)/d + lam (d-1)^2 s^2 / d^2].

    For d >= 3 the sign turns positive exactly past tan_lam = sqrt(d(d-2)/lam).
    """
    a = _angle(d, lam, t)
    s, c = sin_lambda(lam, a), cos_lambda(lam, a)
    bracket = (2.0 - d) / d + lam * (d - 1) ** 2 * s * s / (d * d)
    return lam * (d + 1) * s ** (2 - d) * c ** (-(2 * d + 1) / d) * bracket


def containment_radius(d: int, lam: float) -> float:
    """Chart radius sqrt(d(d-2)/lam) up to which G_lam is concave."""
    if d < 3:
        raise DomainError("the containment radius needs d >= 3")
    if lam <= 0.0:
        raise DomainError("the containment radius needs lambda > 0")
    return math.sqrt(d * (d - 2) / lam)


# ==================== Constants ====================

def beta_constant(d: int, alpha_k: float) -> float:
    """beta = d(d+1) / (2 tan(alpha_K)^d)."""
    return d * (d + 1) / (2.0 * math.tan(alpha_k) ** d)


def beta2_constant(d: int, alpha_k: float) -> float:
    return 1.0 / ((math.pi / 2.0) ** 2 + 1.0 / beta_constant(d, alpha_k))


def beta3_constant(d: int, alpha_k: float) -> float:
    s, t = math.sin(alpha_k), math.tan(alpha_k)
    first = beta2_constant(d, alpha_k) / d * s ** (d + 1) / (t ** d * j_lambda(d, 1.0, math.pi / 2.0 - alpha_k))
    return min(first, 4.0 / math.pi ** 2)


def gamma_constant(d: int, alpha_k: float) -> float:
    """(pi/2) sqrt((1 + 8 tan^d / (d(d+1) pi^2)) / sin(alpha_K))."""
    inner = (1.0 + 8.0 / (d * (d + 1) * math.pi ** 2) * math.tan(alpha_k) ** d) / math.sin(alpha_k)
    return math.pi / 2.0 * math.sqrt(inner)


def tau_constant(d: int, alpha_k: float) -> float:
    """sqrt(3 tan(alpha_K)^d); at most 2 d^{d/2} under the containment hypothesis."""
    return math.sqrt(3.0 * math.tan(alpha_k) ** d)


# ==================== Quantities ====================

@dataclass(frozen=True)
class StabilityBundle:
    """Stability quantities of a body in its GHS chart."""
    d: int
    volume: FunctionalValue
    alpha_k: FunctionalValue
    delta2: FunctionalValue
    delta_sym: FunctionalValue
    beta: float
    beta2: float
    beta3: float
    gamma: float
    tau: float
    chart_volume_ratio: FunctionalValue
    dual_volume: FunctionalValue
    deficit_dual_volume: FunctionalValue
    deficit_floating: FunctionalValue
    containment: bool
    center: CenterResult


def _deficit(actual: FunctionalValue, reference: float, tag: str) -> FunctionalValue:
    return FunctionalValue(value=1.0 - actual.value / reference, abs_error=actual.abs_error / reference,
                           formula_tag=tag, rule_id=actual.rule_id)


def stability_quantities(body: ChartBody, center: Optional[CenterResult] = None) -> StabilityBundle:
    """
    Delta_2, the symmetric-difference volume, the constants and both deficits.

    Args:
        body: Chart body at lam = 1
        center: A GHS result for the body; computed when omitted

    Raises:
        DomainError: Unless lam = 1
    """
    if body.lam != 1.0:
        raise DomainError("stability quantities are defined for lambda = 1")
    center = center or ghs_center(body)
    chart = center.recentered
    d = chart.d
    omega = sphere_area(d - 1)
    rule = rule_for(chart, chart.level)

    def radial_j(r) -> np.ndarray:
        return j_lambda(d, 1.0, np.arctan(chart.radial_at(r)))

    value, error = integrate_values(rule, radial_j)
    volume = FunctionalValue(value=float(value), abs_error=float(error), formula_tag="vol = int J(arctan rho)",
                             rule_id=rule.rule_id)
    alpha = j_lambda_inv(d, 1.0, volume.value / omega)
    alpha_err = volume.abs_error / (omega * math.sin(alpha) ** (d - 1))
    j_k = j_lambda(d, 1.0, alpha)

    square, square_err = integrate_values(rule, lambda r: (radial_j(r) - j_k) ** 2)
    delta2_value = math.sqrt(max(float(square), 0.0) / omega)
    # shifting J(alpha_K) by dJ moves Delta_2 by at most dJ
    delta2_err = math.sqrt(float(square_err) / omega) + math.sin(alpha) ** (d - 1) * alpha_err
    sym, sym_err = integrate_values(rule, lambda r: np.abs(radial_j(r) - j_k))
    sym_err = float(sym_err) + omega * math.sin(alpha) ** (d - 1) * alpha_err

    chart_volume = chart_volume_euclid(chart, rule)
    kappa = ball_volume(d)
    ratio = FunctionalValue(value=chart_volume.value / kappa, abs_error=chart_volume.abs_error / kappa,
                            formula_tag="vol_e(K-bar) / kappa_d", rule_id=rule.rule_id)
    dual_volume = dual_volume_lambda(chart, rule)
    dual_cap = omega * j_lambda(d, 1.0, math.pi / 2.0 - alpha)
    floating = omega_p_lambda(chart, 1.0, rule)
    floating_cap = cap_omega_p(d, 1.0, alpha, 1.0)
    containment = d >= 3 and chart.chart_radius <= containment_radius(d, 1.0)

    bundle = StabilityBundle(
        d=d,
        volume=volume,
        alpha_k=FunctionalValue(value=alpha, abs_error=alpha_err, formula_tag="alpha_K", rule_id=rule.rule_id),
        delta2=FunctionalValue(value=delta2_value, abs_error=delta2_err, formula_tag="Delta_2", rule_id=rule.rule_id),
        delta_sym=FunctionalValue(value=float(sym), abs_error=sym_err, formula_tag="vol(K sym-diff C_K(o))",
                                  rule_id=rule.rule_id),
        beta=beta_constant(d, alpha),
        beta2=beta2_constant(d, alpha),
        beta3=beta3_constant(d, alpha),
        gamma=gamma_constant(d, alpha),
        tau=tau_constant(d, alpha),
        chart_volume_ratio=ratio,
        dual_volume=dual_volume,
        deficit_dual_volume=_deficit(dual_volume, dual_cap, "1 - vol(K*)/vol(C_K*)"),
        deficit_floating=_deficit(floating, floating_cap, "1 - Omega_1(K)/Omega_1(C_K)"),
        containment=containment,
        center=center,
    )
    logger.debug("stability: Delta_2 %.6g, Delta %.6g, eps_dual %.3e, eps_float %.3e",
                 bundle.delta2.value, bundle.delta_sym.value, bundle.deficit_dual_volume.value,
                 bundle.deficit_floating.value)
    return bundle


def _sqrt_bound(factor: float, eps: FunctionalValue, tag: str) -> FunctionalValue:
    """factor sqrt(eps), with an error bar that stays finite at eps = 0."""
    e = max(eps.value, 0.0)
    value = factor * math.sqrt(e)
    error = factor * (math.sqrt(e + eps.abs_error) - math.sqrt(e))
    return FunctionalValue(value=value, abs_error=error, formula_tag=tag, rule_id=eps.rule_id)


# ==================== Checks ====================

def check_lemma_hr(body: ChartBody, bundle: Optional[StabilityBundle] = None,
                   tolerance: float = 1e-8) -> InequalityReport:
    """
    Stability of the projected volume:
    vol_e(K-bar)/kappa_d >= (1 + beta Delta_2^2) tan(alpha_K)^d in the GHS chart.
    """
    bundle = bundle or stability_quantities(body)
    d = bundle.d
    alpha = bundle.alpha_k.value
    h_value = math.tan(alpha) ** d
    factor = 1.0 + bundle.beta * bundle.delta2.value ** 2
    h_err = h_value * d / (math.sin(alpha) * math.cos(alpha)) * bundle.alpha_k.abs_error
    error = factor * h_err + h_value * bundle.beta * 2.0 * bundle.delta2.value * bundle.delta2.abs_error
    lower = FunctionalValue(value=factor * h_value, abs_error=error, formula_tag="(1 + beta Delta_2^2) H(vol/omega)",
                            rule_id=bundle.volume.rule_id)
    return compare("projected volume stability", lower, bundle.chart_volume_ratio, tolerance)


def check_symmetric_difference(bundle: StabilityBundle, tolerance: float = 1e-8) -> Tuple[InequalityReport, InequalityReport]:
    """
    vol(K sym-diff C_K(o)) / omega <= Delta_2, and the corollary
    vol(K sym-diff C_K(o)) <= omega sqrt(eps/beta) with
    eps = vol_e(K-bar) / (kappa_d H) - 1.
    """
    omega = sphere_area(bundle.d - 1)
    scaled = FunctionalValue(value=bundle.delta_sym.value / omega, abs_error=bundle.delta_sym.abs_error / omega,
                             formula_tag="vol(K sym-diff C_K(o)) / omega", rule_id=bundle.delta_sym.rule_id)
    chain = compare("symmetric difference below Delta_2", scaled, bundle.delta2, tolerance)

    h_value = math.tan(bundle.alpha_k.value) ** bundle.d
    eps = FunctionalValue(value=bundle.chart_volume_ratio.value / h_value - 1.0,
                          abs_error=bundle.chart_volume_ratio.abs_error / h_value,
                          formula_tag="projected volume excess", rule_id=bundle.volume.rule_id)
    bound = _sqrt_bound(omega / math.sqrt(bundle.beta), eps, "omega sqrt(eps / beta)")
    corollary = compare("projected volume corollary", bundle.delta_sym, bound, tolerance)
    return chain, corollary


def check_stability_theorems(body: ChartBody, bundle: Optional[StabilityBundle] = None,
                             tolerance: float = 1e-8, enforce: bool = True) -> Tuple[InequalityReport, InequalityReport]:
    """
    Stability of the dual volume (Delta <= omega gamma sqrt(eps_dual)) and of
    the floating area (Delta <= omega tau sqrt(eps_float); d >= 3, eps_float <
    1/(d+1) and chart inside sqrt(d(d-2)) B). Failing hypotheses skip the
    verdict but both sides are recorded.
    """
    bundle = bundle or stability_quantities(body)
    d = bundle.d
    omega = sphere_area(d - 1)
    eps_dual = bundle.deficit_dual_volume
    dual_flags = {"eps_dual < 1": eps_dual.value < 1.0}
    dual = compare("dual volume stability", bundle.delta_sym,
                   _sqrt_bound(omega * bundle.gamma, eps_dual, "omega gamma sqrt(eps_dual)"),
                   tolerance, dual_flags, enforce=enforce)

    eps_float = bundle.deficit_floating
    float_flags = {
        "d >= 3": d >= 3,
        "eps_float < 1/(d+1)": eps_float.value < 1.0 / (d + 1),
        "chart inside sqrt(d(d-2)) B": bundle.containment,
    }
    floating = compare("floating area stability", bundle.delta_sym,
                       _sqrt_bound(omega * bundle.tau, eps_float, "omega tau sqrt(eps_float)"),
                       tolerance, float_flags, enforce=enforce)
    return dual, floating


def check_intermediate_bounds(bundle: StabilityBundle, tolerance: float = 1e-8) -> Tuple[InequalityReport, InequalityReport]:
    """
    Delta_2 <= sqrt(3(d+3) eps_float / beta) (floating-area hypotheses) and
    vol(K*) <= (1 - beta_3 Delta_2^2) vol(C_K(o)*).
    """
    d = bundle.d
    eps_float = bundle.deficit_floating
    flags = {
        "d >= 3": d >= 3,
        "eps_float < 1/(d+1)": eps_float.value < 1.0 / (d + 1),
        "chart inside sqrt(d(d-2)) B": bundle.containment,
    }
    delta_bound = compare("Delta_2 floating bound", bundle.delta2,
                          _sqrt_bound(math.sqrt(3.0 * (d + 3) / bundle.beta), eps_float, "sqrt(3(d+3) eps / beta)"),
                          tolerance, flags)

    dual_cap = sphere_area(d - 1) * j_lambda(d, 1.0, math.pi / 2.0 - bundle.alpha_k.value)
    factor = 1.0 - bundle.beta3 * bundle.delta2.value ** 2
    upper = FunctionalValue(value=factor * dual_cap,
                            abs_error=dual_cap * 2.0 * bundle.beta3 * bundle.delta2.value * bundle.delta2.abs_error
                            + sphere_area(d - 1) * math.cos(bundle.alpha_k.value) ** (d - 1) * bundle.alpha_k.abs_error,
                            formula_tag="(1 - beta_3 Delta_2^2) vol(C_K*)", rule_id=bundle.volume.rule_id)
    dual_bound = compare("dual volume stability bound", bundle.dual_volume, upper, tolerance)
    return delta_bound, dual_bound


def apparatus_checks(d: int, lam: float, points: int = 48, step: float = 1e-4) -> Dict[str, bool]:
    """
    Finite-difference checks of the projected-volume apparatus on a t-grid:
    H' >= d, H convex, and G'' <= 0 exactly where tan_lam(J^{-1}(t)) <= sqrt(d(d-2)/lam).
    """
    top = j_lambda(d, lam, math.pi / (2.0 * math.sqrt(lam)))
    grid = np.linspace(0.05, 0.9, points) * top
    h_slope, h_convex, g_sign = True, True, True
    for t in grid:
        hp = (h_lambda(d, lam, t + step) - h_lambda(d, lam, t - step)) / (2.0 * step)
        hpp = (h_lambda(d, lam, t + step) - 2.0 * h_lambda(d, lam, t) + h_lambda(d, lam, t - step)) / step ** 2
        gpp = (g_lambda(d, lam, t + step) - 2.0 * g_lambda(d, lam, t) + g_lambda(d, lam, t - step)) / step ** 2
        h_slope &= hp >= d * (1.0 - 1e-6)
        h_convex &= hpp > 0.0
        if d >= 3:
            inside = tan_lambda(lam, j_lambda_inv(d, lam, t)) <= containment_radius(d, lam)
            analytic = g_lambda_second(d, lam, t)
            # skip the sign test right at the flip
            if abs(analytic) > 1e-4:
                g_sign &= (gpp <= 0.0) == inside
    return {"H' >= d": bool(h_slope), "H convex": bool(h_convex), "G'' sign flip": bool(g_sign)}

