"""
Verification suites.

Each suite evaluates the functionals of one body once and turns them into
InequalityReports (lhs expected <= rhs). Hypotheses are evaluated into
precondition flags; with `enforce=True` a failed hypothesis skips the
verdict, scans pass `enforce=False` to keep the verdicts of bodies outside
the theorem regime.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from sphereconvex import config
from sphereconvex.errors import DomainError, SphereConvexError
from sphereconvex.geometry.centers import (
    CenterResult,
    blaschke_santalo_margin,
    chart_moments,
    ghs_center,
    polar_centroid_residual,
)
from sphereconvex.geometry.chart_core import ChartBody, dual_body, j_lambda, polar_body, sin_lambda
from sphereconvex.geometry.functionals import (
    PLike,
    as_p_euclid,
    as_p_lambda_o,
    cap_omega_p,
    chart_volume_euclid,
    dual_curvature_entropy,
    dual_volume_lambda,
    duality_factor,
    entropy_lambda_families,
    entropy_power_lambda,
    entropy_spherical,
    euclid_entropies,
    fv_const,
    fv_map,
    fv_power,
    fv_product,
    fv_ratio,
    fv_scale,
    fv_sum,
    omega_p_cap_by_perimeter_2d,
    omega_p_cap_by_volume_2d,
    omega_p_lambda,
    omega_p_perimeter_bound,
    parse_p,
    perimeter_lambda,
    perimeter_radius,
    polar_volume_euclid,
    volume_lambda,
    volume_radius,
)
from sphereconvex.geometry.quadrature import audit_nodes, ball_volume, rule_for, sphere_area
from sphereconvex.geometry.stability import (
    check_intermediate_bounds,
    check_lemma_hr,
    check_stability_theorems,
    check_symmetric_difference,
    containment_radius,
    stability_quantities,
)
from sphereconvex.models.schemas import FunctionalValue, InequalityReport, SweepRow, Verdict
from sphereconvex.verify.reports import compare, equality_report, skipped

logger = logging.getLogger(__name__)

DEFAULT_P_GRID: Tuple[float, ...] = (0.5, 1.0, 2.0)
MONOTONE_GRID: Tuple[float, ...] = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0)
DEFAULT_LAMBDA_GRID: Tuple[float, ...] = (1e-1, 1e-2, 1e-3, 1e-4)
# Hoelder triples r < p < q as (r/p, q/p)
HOELDER_SPLITS: Tuple[Tuple[float, float], ...] = ((0.5, 2.0), (0.25, 3.0))
# allowed relative gap between the integral entropy power and the probe extrapolation
PROBE_AGREEMENT = 1e-3

HALF_PI = 0.5 * math.pi

# report names shared with the implication checks
II = "II: alpha_K <= alpha_P(K)"
II_DUAL = "II for K*: alpha_K* <= alpha_P(K*)"
DVI = ("dVI (i): vol(K*) <= vol(C_K*)",
       "dVI (ii): alpha_K + alpha_K* <= pi/2",
       "dVI (iii): tan alpha_K tan alpha_K* <= 1")
DII = ("dII (i): P(K*) <= P(C_K*)",
       "dII (ii): alpha_K + alpha_P(K*) <= pi/2",
       "dII (iii): tan alpha_K tan alpha_P(K*) <= 1")
DPI = ("dPI (i): P(K*) <= P(C(alpha_P(K))*)",
       "dPI (ii): alpha_P(K) + alpha_P(K*) <= pi/2",
       "dPI (iii): tan alpha_P(K) tan alpha_P(K*) <= 1")

IMPLICATIONS: Dict[str, Tuple[Tuple[str, ...], str]] = {
    "II + dII => dVI": ((II_DUAL, DII[1]), DVI[1]),
    "II + dPI => dII": ((II, DPI[1]), DII[1]),
}


# ==================== Helpers ====================

def _tolerance(tolerance: Optional[float]) -> float:
    return config.DEFAULT_TOLERANCE if tolerance is None else tolerance


def _through(a: FunctionalValue, fn: Callable[[float], float], tag: str, step: float = 1e-6) -> FunctionalValue:
    """fn(a) with the error propagated through a central difference."""
    h = step * max(1.0, abs(a.value))
    return fv_map(a, fn, lambda v: (fn(v + h) - fn(v - h)) / (2.0 * h), tag)


def _tan(a: FunctionalValue, tag: str) -> FunctionalValue:
    return fv_map(a, math.tan, lambda v: 1.0 / math.cos(v) ** 2, tag)


def _complement(a: FunctionalValue, tag: str) -> FunctionalValue:
    """pi/2 - a."""
    return fv_sum([(1.0, fv_const(HALF_PI, "pi/2")), (-1.0, a)], tag)


def _finite_positive(p_grid: Iterable[PLike]) -> List[float]:
    return [p for p in (parse_p(v) for v in p_grid) if p > 0.0 and math.isfinite(p)]


def _p_label(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


def _hoelder_reports(prefix: str, value: Callable[[float], FunctionalValue], d: int, p: float,
                     tol: float) -> List[InequalityReport]:
    """value(p) <= value(q)^{1/t} value(r)^{1/t'} with t = (q-r)(d+p) / ((p-r)(d+q)) for each sampled triple."""
    reports = []
    for r_share, q_share in HOELDER_SPLITS:
        r, q_exp = r_share * p, q_share * p
        t = (q_exp - r) * (d + p) / ((p - r) * (d + q_exp))
        tags = (_p_label(q_exp), _p_label(r))
        interpolation = fv_product(fv_power(value(q_exp), 1.0 / t, f"{prefix}_{tags[0]}^(1/t)"),
                                   fv_power(value(r), 1.0 - 1.0 / t, f"{prefix}_{tags[1]}^(1/t')"),
                                   f"{prefix}_{tags[0]}^(1/t) {prefix}_{tags[1]}^(1/t'), t={t:.6g}")
        reports.append(compare(f"{prefix} Hoelder p={_p_label(p)} (q={tags[0]}, r={tags[1]})",
                               value(p), interpolation, tol))
    return reports


def _require_sphere(body: ChartBody, what: str) -> None:
    if body.lam != 1.0:
        raise DomainError(f"the {what} suite runs on the unit sphere (lambda = 1)")


class BodyQuantities:
    """Lazily evaluated functionals of one body, shared across the suites."""

    def __init__(self, body: ChartBody, center: Optional[CenterResult] = None):
        self.body = body
        self.d = body.d
        self.lam = body.lam
        self.omega = sphere_area(body.d - 1)
        self._center = center
        self._omega_p: Dict[float, FunctionalValue] = {}

    def omega_p(self, p: float) -> FunctionalValue:
        if p not in self._omega_p:
            self._omega_p[p] = omega_p_lambda(self.body, p)
        return self._omega_p[p]

    @cached_property
    def volume(self) -> FunctionalValue:
        return volume_lambda(self.body)

    @cached_property
    def perimeter(self) -> FunctionalValue:
        return perimeter_lambda(self.body)

    @cached_property
    def omega_inf(self) -> FunctionalValue:
        return self.omega_p(math.inf)

    @cached_property
    def dual_perimeter(self) -> FunctionalValue:
        return fv_scale(self.omega_inf, self.lam ** (-(self.d - 1) / 2.0), "P(K*) = Omega_inf / lam^{(d-1)/2}")

    @cached_property
    def dual_volume(self) -> FunctionalValue:
        return dual_volume_lambda(self.body)

    def _volume_radius(self, volume: FunctionalValue, tag: str) -> FunctionalValue:
        d, lam, omega = self.d, self.lam, self.omega
        return fv_map(volume, lambda v: volume_radius(d, lam, v),
                      lambda v: 1.0 / (omega * sin_lambda(lam, volume_radius(d, lam, v)) ** (d - 1)), tag)

    def _perimeter_radius(self, perimeter: FunctionalValue, tag: str) -> FunctionalValue:
        d, lam, omega = self.d, self.lam, self.omega

        def slope(v: float) -> float:
            a = perimeter_radius(d, lam, v)
            s = math.sqrt(lam) if lam > 0.0 else 0.0
            cos_a = math.cos(s * a) if lam > 0.0 else 1.0
            value = (d - 1) * omega * sin_lambda(lam, a) ** (d - 2) * cos_a
            return 1.0 / value if value > 0.0 else 0.0

        return fv_map(perimeter, lambda v: perimeter_radius(d, lam, v), slope, tag)

    @cached_property
    def alpha_k(self) -> FunctionalValue:
        return self._volume_radius(self.volume, "alpha_K")

    @cached_property
    def alpha_p(self) -> FunctionalValue:
        return self._perimeter_radius(self.perimeter, "alpha_P(K)")

    @cached_property
    def alpha_dual(self) -> FunctionalValue:
        return self._volume_radius(self.dual_volume, "alpha_K*")

    @cached_property
    def alpha_p_dual(self) -> FunctionalValue:
        return self._perimeter_radius(self.dual_perimeter, "alpha_P(K*)")

    @property
    def center(self) -> CenterResult:
        if self._center is None:
            self._center = ghs_center(self.body)
        return self._center

    @cached_property
    def contained(self) -> bool:
        """GHS chart inside sqrt(d(d-2)/lam) B (the floating-area hypothesis)."""
        return self.d >= 3 and self.center.recentered.chart_radius <= containment_radius(self.d, self.lam)

    @cached_property
    def inradius(self) -> float:
        """Smallest chart radial value of the GHS chart."""
        chart = self.center.recentered
        return float(np.min(chart.radial_at(rule_for(chart, chart.level))))

    def ball_omega_p(self, p: float) -> FunctionalValue:
        d, lam = self.d, self.lam
        return _through(self.alpha_k, lambda a: cap_omega_p(d, lam, a, p), f"Omega_p(C_K), p={_p_label(p)}")


def _symmetric_chart(chart: ChartBody) -> bool:
    u = audit_nodes(chart.d, chart.support.is_zonal, chart.level, 1)
    h = chart.h(u)
    gap = float(np.max(np.abs(h - chart.h(-u))))
    return gap <= max(1e-9, 10.0 * chart.fit_residual) * float(np.max(h))


def point_symmetric(body: ChartBody, center: Optional[CenterResult] = None) -> bool:
    """True when the body is symmetric about a point (its chart center or its GHS center)."""
    if _symmetric_chart(body):
        return True
    if body.space.is_euclidean:
        return False
    center = center or ghs_center(body)
    return _symmetric_chart(center.recentered)


# ==================== Core Suite ====================

def _form_reports(names: Sequence[str], q: BodyQuantities, first: Tuple[FunctionalValue, FunctionalValue],
                  a: FunctionalValue, b: FunctionalValue, tol: float) -> List[InequalityReport]:
    """Forms (i)-(iii) of a dual inequality: `first`, a + b <= pi/2 and tan a tan b <= 1."""
    total = fv_sum([(1.0, a), (1.0, b)], f"{a.formula_tag} + {b.formula_tag}")
    product = fv_product(_tan(a, f"tan {a.formula_tag}"), _tan(b, f"tan {b.formula_tag}"), "tan product")
    return [
        compare(names[0], first[0], first[1], tol),
        compare(names[1], total, fv_const(HALF_PI, "pi/2"), tol),
        compare(names[2], product, fv_const(1.0, "1"), tol),
    ]


def verify_core_suite(body: ChartBody, tolerance: Optional[float] = None) -> List[InequalityReport]:
    """
    Isoperimetric and dual inequalities on S^d.

    II, the three forms of the dual volume inequality, the dual isoperimetric
    inequality (an identity at d = 2) and the dual perimeter inequality
    (odd d > 3; an identity at d = 3 and reversed at d = 2), plus the
    isoperimetric inequality of the dual body used by the implication chains.

    Raises:
        DomainError: Unless lam = 1
    """
    _require_sphere(body, "core")
    tol = _tolerance(tolerance)
    q = BodyQuantities(body)
    d, omega = q.d, q.omega

    reports = [
        compare(II, q.alpha_k, q.alpha_p, tol),
        compare(II_DUAL, q.alpha_dual, q.alpha_p_dual, tol),
    ]

    dual_cap_volume = _through(q.alpha_k, lambda a: omega * j_lambda(d, 1.0, HALF_PI - a), "vol(C_K*)")
    reports += _form_reports(DVI, q, (q.dual_volume, dual_cap_volume), q.alpha_k, q.alpha_dual, tol)

    dual_cap_perimeter = _through(q.alpha_k, lambda a: omega * math.cos(a) ** (d - 1), "P(C_K*)")
    if d == 2:
        reports.append(equality_report("dII (d=2): P(K*) = 2 pi cos alpha_K", q.dual_perimeter, dual_cap_perimeter,
                                       tol, note="vol(K) = 2 pi - P(K*)"))
    else:
        reports += _form_reports(DII, q, (q.dual_perimeter, dual_cap_perimeter), q.alpha_k, q.alpha_p_dual, tol)

    perimeter_cap_dual = _through(q.alpha_p, lambda a: omega * math.cos(a) ** (d - 1), "P(C(alpha_P(K))*)")
    if d == 2:
        reports.append(compare("dPI reversed (d=2): P(C(alpha_P(K))*) <= P(K*)", perimeter_cap_dual,
                               q.dual_perimeter, tol))
    elif d == 3:
        complement = fv_sum([(1.0, fv_const(4.0 * math.pi, "4 pi")), (-1.0, q.perimeter)], "4 pi - P(K)")
        reports.append(equality_report("dPI (d=3): P(K*) = 4 pi - P(K)", q.dual_perimeter, complement, tol))
    elif d % 2 == 1:
        reports += _form_reports(DPI, q, (q.dual_perimeter, perimeter_cap_dual), q.alpha_p, q.alpha_p_dual, tol)
    else:
        reports.append(skipped("dPI", "the dual perimeter inequality is stated for odd d"))
    return reports


def forms_agree(reports: Iterable[InequalityReport]) -> Dict[str, bool]:
    """For dVI, dII and dPI: do the forms (i)-(iii) reach the same verdict?"""
    by_name = {r.name: r.verdict for r in reports}
    result = {}
    for label, names in (("dVI", DVI), ("dII", DII), ("dPI", DPI)):
        verdicts = [by_name[n] for n in names if n in by_name]
        if len(verdicts) == len(names):
            result[label] = len(set(verdicts)) == 1
    return result


def check_implications(reports: Iterable[InequalityReport]) -> Dict[str, bool]:
    """An implication fails only if every premise holds and the conclusion is violated."""
    by_name = {r.name: r.verdict for r in reports}
    result = {}
    for label, (premises, conclusion) in IMPLICATIONS.items():
        if conclusion not in by_name or any(p not in by_name for p in premises):
            continue
        premises_hold = all(by_name[p] == Verdict.HOLDS for p in premises)
        result[label] = not (premises_hold and by_name[conclusion] == Verdict.VIOLATED)
    return result


# ==================== Floating Area Suite ====================

def verify_floating_suite(body: ChartBody, p_grid: Optional[Sequence[PLike]] = None,
                          tolerance: Optional[float] = None, enforce: bool = True,
                          center: Optional[CenterResult] = None, duality: bool = True) -> List[InequalityReport]:
    """
    Upper bounds, interpolation and duality for the L_p floating areas.

    The floating area inequality and the p-isoperimetric, monotonicity,
    Hoelder and duality statements are checked in any space form lam > 0;
    the volume bounds of the L_p family and the odd-dimensional perimeter
    bound only on the unit sphere.

    Args:
        body: Chart body with lam > 0
        p_grid: Exponents for the per-p statements
        tolerance: Run tolerance
        enforce: Skip verdicts whose hypotheses fail
        center: Precomputed GHS result
        duality: Include the duality identities (refits the dual body)
    """
    if body.space.is_euclidean:
        raise DomainError("the floating suite needs lambda > 0")
    tol = _tolerance(tolerance)
    grid = _finite_positive(p_grid or DEFAULT_P_GRID)
    q = BodyQuantities(body, center)
    d, lam = q.d, q.lam
    reports: List[InequalityReport] = []

    reports.append(compare(
        "floating area: Omega_1 <= Omega_1(C_K)", q.omega_p(1.0), q.ball_omega_p(1.0), tol,
        {"d >= 3": d >= 3, "GHS chart inside sqrt(d(d-2)/lam) B": q.contained}, enforce=enforce,
    ))

    for p in grid:
        label = _p_label(p)
        bound = fv_product(fv_power(q.perimeter, d / (d + p), "P^{d/(d+p)}"),
                           fv_power(q.omega_inf, p / (d + p), "Omega_inf^{p/(d+p)}"),
                           "lam^{(d-1)p/(2(d+p))} P^{d/(d+p)} P(K*)^{p/(d+p)}")
        reports.append(compare(f"p-isoperimetric p={label}", q.omega_p(p), bound, tol))
        reports += _hoelder_reports("Omega", q.omega_p, d, p, tol)

    def normalized(p: float) -> FunctionalValue:
        ratio = fv_ratio(q.omega_p(p), q.omega_inf, "Omega_p / Omega_inf")
        return fv_power(ratio, 1.0 + p / d, f"(Omega_p/Omega_inf)^(1+p/d), p={_p_label(p)}")

    for low, high in zip(MONOTONE_GRID, MONOTONE_GRID[1:]):
        reports.append(compare(f"monotone p={_p_label(low)} -> {_p_label(high)}", normalized(high), normalized(low), tol))

    if duality:
        reports += _duality_reports(body, q, grid, tol)
    if lam == 1.0:
        reports += _volume_bounds(q, grid, tol, enforce)
        reports += _perimeter_bounds(q, grid, tol, enforce)
    return reports


def _duality_reports(body: ChartBody, q: BodyQuantities, grid: List[float], tol: float) -> List[InequalityReport]:
    try:
        dual = dual_body(body)
    except SphereConvexError as exc:
        return [skipped("duality", f"dual body unavailable: {exc}")]
    d, lam = q.d, q.lam
    reports = []
    for p in grid + [math.inf]:
        dual_value = omega_p_lambda(dual, p)
        partner = 0.0 if math.isinf(p) else d * d / p
        direct = fv_scale(q.omega_p(partner), duality_factor(d, lam, p), f"factor * Omega_{_p_label(partner)}(K)")
        reports.append(equality_report(f"duality p={_p_label(p)}: Omega_p(K*) = factor Omega_(d^2/p)(K)",
                                       dual_value, direct, tol))
    return reports


def _volume_bounds(q: BodyQuantities, grid: List[float], tol: float, enforce: bool) -> List[InequalityReport]:
    """Omega_p <= Omega_p(C_K): the containment branch for p >= 1 and the inradius branch."""
    d = q.d
    reports = []
    for p in grid:
        label = _p_label(p)
        if p >= 1.0:
            reports.append(compare(
                f"volume bound p={label} (containment)", q.omega_p(p), q.ball_omega_p(p), tol,
                {"d >= 3": d >= 3, "GHS chart inside sqrt(d(d-2)) B": q.contained}, enforce=enforce,
            ))
        if d >= 3:
            # some q in (0, min(p, d^2)] with sqrt(d/q) B inside the chart
            covered = d / q.inradius ** 2 <= min(p, d * d)
            reports.append(compare(
                f"volume bound p={label} (inradius)", q.omega_p(p), q.ball_omega_p(p), tol,
                {"d >= 3": d >= 3, "GHS chart contains sqrt(d/q) B with q <= p": covered}, enforce=enforce,
            ))
    return reports


def _perimeter_bounds(q: BodyQuantities, grid: List[float], tol: float, enforce: bool) -> List[InequalityReport]:
    """The perimeter bound in odd dimensions and the d = 2 ball comparisons."""
    d = q.d
    reports = []
    for p in grid:
        label = _p_label(p)
        if d % 2 == 1:
            bound = _through(q.perimeter, lambda v: omega_p_perimeter_bound(d, v, p), "Omega_p(C(alpha_P(K)))")
            volume_ball = q.ball_omega_p(p)
            smaller = "volume" if volume_ball.value < bound.value else "perimeter"
            note = (f"volume bound {volume_ball.value:.12g}, perimeter bound {bound.value:.12g}; "
                    f"smaller: {smaller}")
            reports.append(compare(f"perimeter bound p={label}", q.omega_p(p), bound, tol, note=note))
            steep = math.tan(q.alpha_k.value) >= math.sqrt(d / p)
            reports.append(compare(f"perimeter bound p={label} (volume form)", q.omega_p(p), volume_ball, tol,
                                   {"tan alpha_K >= sqrt(d/p)": steep}, enforce=enforce))
        elif d == 2:
            weak = fv_product(fv_power(q.perimeter, 2.0 / (2.0 + p), "P^{2/(2+p)}"),
                              fv_power(q.dual_perimeter, p / (2.0 + p), "P(K*)^{p/(2+p)}"),
                              "P^{2/(2+p)} P(K*)^{p/(2+p)}")
            by_volume = _through(q.volume, lambda v: omega_p_cap_by_volume_2d(v, p), "Omega_p(C_K) from vol")
            by_perimeter = _through(q.perimeter, lambda v: omega_p_cap_by_perimeter_2d(v, p),
                                    "Omega_p(C(alpha_P)) from P")
            reports.append(compare(f"d=2 volume ball below p-isoperimetric bound p={label}", by_volume, weak, tol))
            reports.append(compare(f"d=2 perimeter ball below p-isoperimetric bound p={label}", by_perimeter, weak, tol))
    return reports


# ==================== Entropy Suite ====================

def verify_entropy_suite(body: ChartBody, p_grid: Optional[Sequence[PLike]] = None,
                         tolerance: Optional[float] = None, enforce: bool = True) -> List[InequalityReport]:
    """
    Spherical curvature entropy: information inequality and its product
    form, the dual entropy inequality, the implication from the strong
    floating inequality, the probe sequence, and on S^2 the entropy
    inequality and positivity for symmetric bodies.

    Raises:
        DomainError: Unless lam = 1
    """
    _require_sphere(body, "entropy")
    tol = _tolerance(tolerance)
    grid = _finite_positive(p_grid or DEFAULT_P_GRID)
    q = BodyQuantities(body)
    d, omega = q.d, q.omega
    bundle = entropy_spherical(body)
    power = bundle.entropy_power

    reports = [
        compare("information inequality: entropy power <= P(K)/P(K*)", power,
                fv_ratio(q.perimeter, q.dual_perimeter, "P(K)/P(K*)"), tol),
        compare("KL divergence >= 0", fv_const(0.0, "0"), bundle.kl, tol),
    ]

    dual_entropy = dual_curvature_entropy(body)
    dual_power = fv_map(dual_entropy, lambda e: math.exp(-e), lambda e: math.exp(-e), "entropy power of K*")
    reports.append(compare("entropy power product <= 1", fv_product(power, dual_power, "E(K) E(K*)"),
                           fv_const(1.0, "1"), tol))
    ball_dual_power = _through(q.alpha_k, lambda a: math.tan(HALF_PI - a) ** (d - 1), "entropy power of C_K*")
    reports.append(compare("dual entropy inequality", dual_power, ball_dual_power, tol))

    ball_power = _through(q.alpha_k, lambda a: math.tan(a) ** (d - 1), "entropy power of C_K")
    dual_ratio = q.dual_perimeter.value / (omega * math.cos(q.alpha_k.value) ** (d - 1))
    strong_at = [p for p in grid if q.omega_p(p).value / q.ball_omega_p(p).value <= dual_ratio]
    note = f"strong floating ratio holds at p in {[_p_label(p) for p in strong_at]}" if strong_at else None
    reports.append(compare("strong floating inequality => entropy inequality", power, ball_power, tol,
                           {"strong floating ratio at some p": bool(strong_at)}, note=note, enforce=enforce))

    gap = abs(power.value - bundle.extrapolated)
    reports.append(compare(
        "entropy power probe agreement",
        FunctionalValue(value=gap, abs_error=power.abs_error, formula_tag="|integral - probe extrapolation|",
                        rule_id=power.rule_id),
        fv_const(PROBE_AGREEMENT * abs(power.value), "relative probe accuracy"), tol,
    ))

    if d == 2:
        symmetric = point_symmetric(body)
        small = q.volume.value <= (2.0 - math.sqrt(2.0)) * math.pi
        bound = _through(q.volume,
                         lambda v: -0.5 * math.log((4.0 * math.pi * v - v * v) / (2.0 * math.pi - v) ** 2),
                         "E^s(C_K) from vol")
        reports.append(compare("S^2 entropy inequality (symmetric bodies)", bound, bundle.E_s, tol,
                               {"point symmetric": symmetric}, enforce=enforce))
        reports.append(compare("S^2 entropy positivity", fv_const(0.0, "0"), bundle.E_s, tol,
                               {"point symmetric": symmetric, "vol <= (2 - sqrt 2) pi": small}, enforce=enforce))
    return reports


# ==================== Euclidean Suite ====================

def verify_euclidean_suite(body: ChartBody, p_grid: Optional[Sequence[PLike]] = None,
                           tolerance: Optional[float] = None, enforce: bool = True) -> List[InequalityReport]:
    """
    The chart body read as a Euclidean body: Blaschke-Santalo at the origin,
    the information inequality, the entropy chains of E_C, E_h and E_PW and
    the L_p affine isoperimetric inequalities.
    """
    tol = _tolerance(tolerance)
    grid = _finite_positive(p_grid or DEFAULT_P_GRID)
    flat = body if body.space.is_euclidean else body.with_lambda(0.0)
    d = flat.d
    kappa = ball_volume(d)

    volume = chart_volume_euclid(flat)
    lhs, rhs = blaschke_santalo_margin(flat)
    polar_volume = polar_volume_euclid(flat)
    moments = chart_moments(flat)
    centered = (float(np.linalg.norm(moments.centroid)) / moments.mean_radius <= 1e-6
                or polar_centroid_residual(flat) <= 1e-6)
    centered_flag = {"centroid or Santalo point at the origin": centered}

    log_ratio = fv_map(volume, lambda v: math.log(v / kappa), lambda v: 1.0 / v, "log(vol/kappa)")
    log_info = fv_map(fv_ratio(volume, polar_volume, "vol/vol°"), lambda v: -math.log(v), lambda v: 1.0 / v,
                      "-log(vol/vol°)")
    entropies = euclid_entropies(flat)
    converged = {"support entropy maximizer converged": entropies.converged}
    as_1 = as_p_euclid(flat, 1.0)
    chow = fv_map(as_1, lambda v: -(d + 1) / d * math.log(v / sphere_area(d - 1)), lambda v: (d + 1) / (d * v),
                  "-((d+1)/d) log(as_1/omega)")

    reports = [
        compare("Blaschke-Santalo: vol(K) vol(K°) <= kappa^2", lhs, rhs, tol, centered_flag, enforce=enforce),
        compare("information inequality: -log(vol/vol°) <= E_PW", log_info, entropies.E_PW, tol),
        compare("Chow: -((d+1)/d) log(as_1/omega) <= E_C", chow, entropies.E_C, tol),
        compare("affine isoperimetric: -((d-1)/d) log(vol/kappa) <= -((d+1)/d) log(as_1/omega)",
                fv_scale(log_ratio, -(d - 1) / d, "-((d-1)/d) log(vol/kappa)"), chow, tol),
        compare("Guan-Ni: E_h - log(vol/kappa) <= E_C",
                fv_sum([(1.0, entropies.E_h), (-1.0, log_ratio)], "E_h - log(vol/kappa)"), entropies.E_C, tol,
                converged, enforce=enforce),
        compare("support entropy: (1/d) log(vol/kappa) <= E_h", fv_scale(log_ratio, 1.0 / d, "(1/d) log(vol/kappa)"),
                entropies.E_h, tol, converged, enforce=enforce),
        compare("centro-affine chain: -d E_h - log(vol/kappa) <= E_PW",
                fv_sum([(-d, entropies.E_h), (-1.0, log_ratio)], "-d E_h - log(vol/kappa)"), entropies.E_PW, tol,
                converged, enforce=enforce),
    ]

    for p in grid:
        label = _p_label(p)
        as_p = as_p_euclid(flat, p)
        cone_bound = fv_scale(fv_product(fv_power(volume, d / (d + p), "vol^{d/(d+p)}"),
                                         fv_power(polar_volume, p / (d + p), "vol°^{p/(d+p)}"), "product"),
                              float(d), "d vol^{d/(d+p)} vol(K°)^{p/(d+p)}")
        ball_bound = fv_scale(fv_power(volume, (d - p) / (d + p), "vol^{(d-p)/(d+p)}"),
                              d * kappa ** (2.0 * p / (d + p)), "as_p(B_K)")
        reports.append(compare(f"L_p affine bound p={label}: as_p <= d vol^(d/(d+p)) vol(K°)^(p/(d+p))",
                               as_p, cone_bound, tol))
        reports.append(compare(f"L_p affine isoperimetric p={label}: as_p <= as_p(B_K)", as_p, ball_bound, tol,
                               centered_flag, enforce=enforce))
    return reports


# ==================== Lambda Families ====================

def verify_lambda_suite(body: ChartBody, p_grid: Optional[Sequence[PLike]] = None,
                        tolerance: Optional[float] = None) -> List[InequalityReport]:
    """
    Inequalities of the weighted family as_p^{lam,o} about the chart center
    (any lam >= 0) and the entropy power bounds of both lambda families.
    """
    tol = _tolerance(tolerance)
    grid = _finite_positive(p_grid or DEFAULT_P_GRID)
    d, lam = body.d, body.lam
    cache: Dict[float, FunctionalValue] = {}

    def as_p(p: float) -> FunctionalValue:
        if p not in cache:
            cache[p] = as_p_lambda_o(body, p)
        return cache[p]

    reports = []
    for p in grid:
        label = _p_label(p)
        bound = fv_product(fv_power(as_p(0.0), d / (d + p), "as_0^{d/(d+p)}"),
                           fv_power(as_p(math.inf), p / (d + p), "as_inf^{p/(d+p)}"),
                           "as_0(K)^{d/(d+p)} as_0(K^o)^{p/(d+p)}")
        reports.append(compare(f"weighted p-isoperimetric p={label}", as_p(p), bound, tol))
        reports += _hoelder_reports("as", as_p, d, p, tol)

    def normalized(p: float) -> FunctionalValue:
        return fv_power(fv_ratio(as_p(p), as_p(math.inf), "as_p/as_inf"), 1.0 + p / d,
                        f"(as_p/as_inf)^(1+p/d), p={_p_label(p)}")

    for low, high in zip(MONOTONE_GRID, MONOTONE_GRID[1:]):
        reports.append(compare(f"weighted monotone p={_p_label(low)} -> {_p_label(high)}",
                               normalized(high), normalized(low), tol))

    reports += _polar_duality_reports(body, as_p, grid, tol)
    reports.append(compare("weighted entropy power <= as_0/as_inf", entropy_power_lambda(body, "E_PW^lambda,o"),
                           fv_ratio(as_p(0.0), as_p(math.inf), "as_0/as_inf"), tol))
    if lam > 0.0:
        ratio = fv_ratio(omega_p_lambda(body, 0.0), omega_p_lambda(body, math.inf),
                         "P(K) / (lam^{(d-1)/2} P(K*))")
        reports.append(compare("lambda entropy power <= P(K)/(lam^{(d-1)/2} P(K*))",
                               entropy_power_lambda(body, "E_C^lambda"), ratio, tol))
    return reports


def _polar_duality_reports(body: ChartBody, as_p: Callable[[float], FunctionalValue], grid: List[float],
                           tol: float) -> List[InequalityReport]:
    """as_p^{lam,o}(K) = as_{d^2/p}^{lam,o}(K-bar°) with the chart polar taken unscaled."""
    try:
        polar = polar_body(body)
    except SphereConvexError as exc:
        return [skipped("weighted polar duality", f"chart polar unavailable: {exc}")]
    d = body.d
    reports = []
    for p in grid:
        partner = d * d / p
        reports.append(equality_report(
            f"weighted polar duality p={_p_label(p)}: as_p(K) = as_{_p_label(partner)}(K-bar°)",
            as_p(p), as_p_lambda_o(polar, partner), tol,
        ))
    return reports


# ==================== Stability Suite ====================

def verify_stability_suite(body: ChartBody, tolerance: Optional[float] = None, enforce: bool = True,
                           center: Optional[CenterResult] = None) -> List[InequalityReport]:
    """Projected-volume stability, its corollaries and both stability theorems, plus chart Blaschke-Santalo."""
    _require_sphere(body, "stability")
    tol = _tolerance(tolerance)
    bundle = stability_quantities(body, center)
    reports = [check_lemma_hr(body, bundle, tol)]
    reports += check_symmetric_difference(bundle, tol)
    reports += check_stability_theorems(body, bundle, tol, enforce)
    reports += check_intermediate_bounds(bundle, tol)
    lhs, rhs = blaschke_santalo_margin(bundle.center.recentered)
    reports.append(compare("chart Blaschke-Santalo at the GHS center", lhs, rhs, tol))
    return reports


# ==================== Conjecture Targets ====================

def conjecture_reports(body: ChartBody, p_grid: Optional[Sequence[PLike]] = None,
                       tolerance: Optional[float] = None, center: Optional[CenterResult] = None) -> List[InequalityReport]:
    """
    Open inequalities for scanning. Verdicts are never skipped; the flag
    "theorem regime" marks bodies for which a proven statement covers the
    inequality.

    Raises:
        DomainError: Unless lam = 1
    """
    _require_sphere(body, "conjecture")
    tol = _tolerance(tolerance)
    grid = _finite_positive(p_grid or DEFAULT_P_GRID)
    q = BodyQuantities(body, center)
    d, omega = q.d, q.omega
    reports = []

    steep = math.tan(q.alpha_k.value)
    ball_perimeter = _through(q.alpha_k, lambda a: omega * math.sin(a) ** (d - 1), "P(C_K)")
    dual_ball_perimeter = _through(q.alpha_dual, lambda a: omega * math.sin(a) ** (d - 1), "P(C_K*)")
    for p in grid:
        label = _p_label(p)
        covered = ((d >= 3 and p >= 1.0 and q.contained)
                   or (d == 2 and p == 1.0)
                   or (d % 2 == 1 and steep >= math.sqrt(d / p)))
        reports.append(compare(f"conjecture: Omega_p <= Omega_p(C_K) p={label}", q.omega_p(p), q.ball_omega_p(p),
                               tol, {"theorem regime": covered}, enforce=False,
                               note="exploration only" if p < 1.0 else None))
        strong = fv_product(fv_power(ball_perimeter, d / (d + p), "P(C_K)^{d/(d+p)}"),
                            fv_power(dual_ball_perimeter, p / (d + p), "P(C_K*)^{p/(d+p)}"),
                            "P(C_K)^{d/(d+p)} P(C_K*)^{p/(d+p)}")
        reports.append(compare(f"conjecture: strong bound p={label}", q.omega_p(p), strong, tol,
                               {"theorem regime": False}, enforce=False))

    power = entropy_spherical(body).entropy_power
    ball_power = _through(q.alpha_k, lambda a: math.tan(a) ** (d - 1), "entropy power of C_K")
    symmetric = d == 2 and point_symmetric(body, q.center)
    reports.append(compare("conjecture: entropy power <= entropy power of C_K", power, ball_power, tol,
                           {"theorem regime": symmetric}, enforce=False))

    flat = q.center.recentered.with_lambda(0.0)
    volume = chart_volume_euclid(flat)
    bound = fv_map(volume, lambda v: -2.0 * math.log(v / ball_volume(d)), lambda v: 2.0 / v, "-2 log(vol/kappa)")
    e_pw = entropy_lambda_families(flat, "E_PW")
    reports.append(compare("conjecture: centro-affine entropy E_PW >= -2 log(vol/kappa)", bound, e_pw, tol,
                           {"theorem regime": False}, enforce=False))
    return reports


# ==================== Limits ====================

@dataclass
class LimitStudy:
    """A lambda sweep of one chart body with observed convergence orders."""
    rows: List[SweepRow] = field(default_factory=list)
    orders: Dict[str, float] = field(default_factory=dict)
    reports: List[InequalityReport] = field(default_factory=list)


def limit_functionals(p: float = 1.0) -> Dict[str, Callable[[ChartBody], FunctionalValue]]:
    """Functionals whose lam -> 0 limits are the Euclidean ones."""
    return {
        f"as_{_p_label(p)}^lam,o": lambda b: as_p_lambda_o(b, p),
        f"Omega_{_p_label(p)}^lam": lambda b: omega_p_lambda(b, p),
        "E_C^lam": lambda b: entropy_lambda_families(b, "E_C"),
        "E_PW^lam,o": lambda b: entropy_lambda_families(b, "E_PW"),
    }


def observed_order(lams: Sequence[float], errors: Sequence[float], floor: float) -> float:
    """
    Convergence order log(e_i/e_j)/log(lam_i/lam_j) of the finest pair of
    consecutive grid values with both errors above the roundoff floor.

    Coarse pairs are ignored: while lam is comparable to h^2 the o-weight
    lam + h^2 has not reached its linear regime and the local order is low.

    Args:
        lams: Decreasing grid
        errors: Errors against the lam = 0 value, one per grid value
        floor: Roundoff floor
    """
    finest = math.inf
    for (l1, e1), (l2, e2) in zip(zip(lams, errors), zip(lams[1:], errors[1:])):
        if e2 > floor and e1 > floor:
            finest = math.log(e1 / e2) / math.log(l1 / l2)
    return finest


def verify_limits(body: ChartBody, lambda_grid: Optional[Sequence[float]] = None, p: PLike = 1.0,
                  min_order: float = 0.9, tolerance: Optional[float] = None) -> LimitStudy:
    """
    Read the chart body in the space forms of the grid, compare each
    functional against its lam = 0 value and estimate the convergence order.

    Rows cover the grid, the lam = 1 endpoint and the lam = 0 reference.
    """
    tol = _tolerance(tolerance)
    lams = sorted((float(v) for v in (lambda_grid or DEFAULT_LAMBDA_GRID)), reverse=True)
    if any(v <= 0.0 for v in lams):
        raise DomainError("lambda grid values must be positive")
    name = body.name or body.support.kind
    study = LimitStudy()
    readings = {lam: body.with_lambda(lam) for lam in lams + [1.0]}
    flat = body.with_lambda(0.0)
    # below min h^2 on the boundary the o-weight lam + h^2 is in its linear regime
    onset = float(np.min(body.h(rule_for(body, body.level).nodes))) ** 2
    settled = len(lams) >= 2 and lams[-2] < onset
    if not settled:
        logger.warning("lambda grid stops above min h^2 = %.3g; orders are pre-asymptotic", onset)
    for label, fn in limit_functionals(parse_p(p)).items():
        reference = fn(flat)
        errors = []
        for lam in lams + [1.0]:
            value = fn(readings[lam])
            study.rows.append(SweepRow(body=name, functional=label, lam=lam, value=value.value,
                                       abs_error=value.abs_error, reference=reference.value))
            if lam != 1.0:
                errors.append(abs(value.value - reference.value))
        study.rows.append(SweepRow(body=name, functional=label, lam=0.0, value=reference.value,
                                   abs_error=reference.abs_error, reference=reference.value))
        floor = 10.0 * (reference.abs_error + 1e-14 * abs(reference.value))
        order = observed_order(lams, errors, floor)
        study.orders[label] = order
        logger.info("lambda -> 0 limit of %s: observed order %.3f", label, order)
        reports_order = order if math.isfinite(order) else 1e6
        study.reports.append(compare(f"convergence order of {label}", fv_const(min_order, "minimum order"),
                                     fv_const(reports_order, "observed order"), tol,
                                     {"finest pair below min h^2": settled},
                                     note=None if math.isfinite(order) else "converged to roundoff"))
    return study


# ==================== Dispatch ====================

SUITES: Dict[str, Callable[..., List[InequalityReport]]] = {
    "core": lambda body, p_grid, tol, enforce: verify_core_suite(body, tol),
    "floating": lambda body, p_grid, tol, enforce: verify_floating_suite(body, p_grid, tol, enforce),
    "entropy": lambda body, p_grid, tol, enforce: verify_entropy_suite(body, p_grid, tol, enforce),
    "euclidean": lambda body, p_grid, tol, enforce: verify_euclidean_suite(body, p_grid, tol, enforce),
    "lambda": lambda body, p_grid, tol, enforce: verify_lambda_suite(body, p_grid, tol),
    "stability": lambda body, p_grid, tol, enforce: verify_stability_suite(body, tol, enforce),
    "conjectures": lambda body, p_grid, tol, enforce: conjecture_reports(body, p_grid, tol),
}


def run_suites(body: ChartBody, names: Sequence[str], p_grid: Optional[Sequence[PLike]] = None,
               tolerance: Optional[float] = None, enforce: bool = True) -> List[InequalityReport]:
    """
    Run the named suites in order.

    A suite that does not apply to the body (wrong space form, failed center
    search, refit failure) contributes one skipped report carrying the reason.

    Raises:
        DomainError: For an unknown suite name
    """
    reports: List[InequalityReport] = []
    for name in names:
        if name not in SUITES:
            raise DomainError(f"unknown suite '{name}' (available: {', '.join(SUITES)})")
        try:
            found = SUITES[name](body, p_grid, tolerance, enforce)
        except SphereConvexError as exc:
            logger.warning("[%s] suite skipped: %s", name, exc)
            found = [skipped(f"{name} suite", str(exc))]
        logger.info("[%s] %d reports", name, len(found))
        reports.extend(found)
    return reports
