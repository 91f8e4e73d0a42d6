"""
Scalar functionals of chart bodies.

Every computed functional is returned as a FunctionalValue carrying the
quadrature error estimate and the refit residual of the representation.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Tuple, Union

import numpy as np

from sphereconvex.errors import DomainError
from sphereconvex.geometry.chart_core import (
    ChartBody,
    arctan_lambda,
    cos_lambda,
    dual_body,
    j_lambda,
    j_lambda_inv,
    sin_lambda,
    tan_lambda,
)
from sphereconvex.geometry.curvature import (
    CurvaturePoint,
    chart_exponents,
    integrate_points,
    weighted_curvature,
)
from sphereconvex.geometry.quadrature import (
    QuadratureRule,
    ball_volume,
    integrate_boundary,
    integrate_radial,
    integrate_values,
    rule_for,
    sphere_area,
)
from sphereconvex.models.schemas import EntropyBundleModel, FunctionalValue

logger = logging.getLogger(__name__)

PLike = Union[float, str]

ENTROPY_PROBES = (1e-1, 1e-2, 1e-3)


# ==================== Exponents ====================

def parse_p(p: PLike) -> float:
    """Accept floats and the string 'inf'."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        return float(p)
    return float(p)


def lp_exponent(d: int, p: PLike) -> float:
    """p / (d + p), with the value 1 at p = inf."""
    p = parse_p(p)
    if p == -d:
        raise DomainError("p = -d is excluded")
    if math.isinf(p):
        return 1.0
    return p / (d + p)


def dual_exponent(d: int, p: PLike) -> float:
    """d^2 / p (inf for p = 0, 0 for p = inf)."""
    p = parse_p(p)
    if p == 0.0:
        return math.inf
    if math.isinf(p):
        return 0.0
    return d * d / p


def duality_factor(d: int, lam: float, p: PLike) -> float:
    """lam^{(d-1)(p-d)/(2(d+p))}, the factor in Omega_p(K*) = factor * Omega_{d^2/p}(K)."""
    p = parse_p(p)
    if math.isinf(p):
        return lam ** ((d - 1) / 2.0)
    return lam ** ((d - 1) * (p - d) / (2.0 * (d + p)))


# ==================== Error Propagation ====================

def fv_const(value: float, formula_tag: str) -> FunctionalValue:
    return FunctionalValue(value=float(value), abs_error=0.0, formula_tag=formula_tag, rule_id="closed-form")


def fv_map(a: FunctionalValue, fn: Callable[[float], float], derivative: Callable[[float], float],
           formula_tag: str) -> FunctionalValue:
    """Push a value through fn with first-order error propagation."""
    value = fn(a.value)
    error = abs(derivative(a.value)) * a.abs_error
    return FunctionalValue(value=float(value), abs_error=float(error), formula_tag=formula_tag, rule_id=a.rule_id)


def fv_ratio(a: FunctionalValue, b: FunctionalValue, formula_tag: str) -> FunctionalValue:
    value = a.value / b.value
    error = abs(a.abs_error / b.value) + abs(value) * b.abs_error / abs(b.value)
    return FunctionalValue(value=value, abs_error=error, formula_tag=formula_tag, rule_id=a.rule_id or b.rule_id)


def fv_product(a: FunctionalValue, b: FunctionalValue, formula_tag: str) -> FunctionalValue:
    value = a.value * b.value
    error = abs(a.abs_error * b.value) + abs(a.value * b.abs_error)
    return FunctionalValue(value=value, abs_error=error, formula_tag=formula_tag, rule_id=a.rule_id or b.rule_id)


def fv_power(a: FunctionalValue, exponent: float, formula_tag: str) -> FunctionalValue:
    value = a.value ** exponent
    error = abs(exponent * value / a.value) * a.abs_error if a.value != 0.0 else 0.0
    return FunctionalValue(value=value, abs_error=error, formula_tag=formula_tag, rule_id=a.rule_id)


def fv_scale(a: FunctionalValue, factor: float, formula_tag: Optional[str] = None) -> FunctionalValue:
    return FunctionalValue(value=a.value * factor, abs_error=a.abs_error * abs(factor),
                           formula_tag=formula_tag or a.formula_tag, rule_id=a.rule_id)


def fv_sum(terms: Iterable[Tuple[float, FunctionalValue]], formula_tag: str) -> FunctionalValue:
    """sum c_i a_i."""
    terms = list(terms)
    value = sum(c * a.value for c, a in terms)
    error = sum(abs(c) * a.abs_error for c, a in terms)
    rule_id = next((a.rule_id for _, a in terms if a.rule_id), "")
    return FunctionalValue(value=value, abs_error=error, formula_tag=formula_tag, rule_id=rule_id)


# ==================== Volumes and Perimeters ====================

def volume_lambda(body: ChartBody, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """vol_lam(K) = int J_lam(arctan_lam rho(u)) du."""
    d, lam = body.d, body.lam
    rule = rule or rule_for(body, body.level)
    return integrate_radial(body, lambda rho, u: j_lambda(d, lam, arctan_lambda(lam, rho)), rule,
                            formula_tag="vol = int J(arctan rho)")


def dual_volume_lambda(body: ChartBody, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """
    vol_lam(K*) straight from the support function.

    The dual chart has radial function 1/(lam h(-u)), so its geodesic radial
    function is pi/(2 sqrt(lam)) - arctan_lam h(-u).
    """
    if body.space.is_euclidean:
        raise DomainError("the dual body needs lambda > 0")
    d, lam = body.d, body.lam
    top = body.space.max_radius
    rule = rule or rule_for(body, body.level)

    def at_nodes(r: QuadratureRule) -> np.ndarray:
        return j_lambda(d, lam, top - arctan_lambda(lam, body.h(-r.nodes)))

    value, error = integrate_values(rule, at_nodes)
    value = float(value)
    error = float(error) + abs(value) * body.fit_residual * (d + 1)
    return FunctionalValue(value=value, abs_error=error, formula_tag="vol* = int J(pi/2 - arctan h)",
                           rule_id=rule.rule_id)


def perimeter_lambda(body: ChartBody, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """P_lam(K) = int sigma_lam dA_e."""
    return integrate_points(body, lambda pts: pts.sigma_lambda, rule, formula_tag="P = int sigma dA")


def dual_perimeter_lambda(body: ChartBody, direct: bool = False,
                          rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """
    P_lam(K*).

    By default through Omega_inf(K) = lam^{(d-1)/2} P(K*), valid for C2+ bodies;
    `direct=True` integrates over the refitted dual chart instead.
    """
    if body.space.is_euclidean:
        raise DomainError("the dual body needs lambda > 0")
    if direct:
        return perimeter_lambda(dual_body(body))
    omega_inf = omega_p_lambda(body, math.inf, rule)
    return fv_scale(omega_inf, body.lam ** (-(body.d - 1) / 2.0), "P* = Omega_inf / lam^{(d-1)/2}")


# ==================== L_p Functionals ====================

def omega_p_lambda(body: ChartBody, p: PLike, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """
    L_p floating area Omega_p^lam(K) = int H_lam^{p/(d+p)} sigma_lam dA_e.

    p = inf gives int H_lam sigma_lam dA_e.

    Raises:
        DomainError: For p = -d
    """
    exponent = lp_exponent(body.d, p)
    return integrate_points(body, lambda pts: pts.H_lambda ** exponent * pts.sigma_lambda, rule,
                            formula_tag=f"Omega_p^lam, p={parse_p(p)}")


def omega_p_lambda_chart(body: ChartBody, p: PLike, corrected: bool = True,
                         rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """Omega_p^lam through the single combined chart integrand (see `chart_exponents`)."""
    d, lam = body.d, body.lam
    p = parse_p(p)
    exponent = lp_exponent(d, p)
    e1, e2 = chart_exponents(d, p, corrected)

    def integrand(pts: CurvaturePoint) -> np.ndarray:
        return pts.H_e ** exponent * (1.0 + lam * pts.x_sq) ** e1 * (1.0 + lam * pts.h_x ** 2) ** e2

    tag = "combined chart integrand" + ("" if corrected else " (printed exponent)")
    return integrate_points(body, integrand, rule, formula_tag=tag)


def as_p_lambda_o(body: ChartBody, p: PLike, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """
    Weighted L_p affine surface area about the chart center.

    Integrand (H_e ((1+lam|x|^2)/(lam+h^2))^{(d+1)/2})^{p/(d+p)} sqrt(lam+h^2) (1+lam|x|^2)^{-d/2}.
    At lam = 1 this is the same computation as `omega_p_lambda`; at lam = 0 it is
    the centro-affine as_p.
    """
    d, lam = body.d, body.lam
    exponent = lp_exponent(d, p)

    def integrand(pts: CurvaturePoint) -> np.ndarray:
        curvature, measure = weighted_curvature(d, lam, pts.H_e, pts.x_sq, pts.h_x, o_weighted=True)
        return curvature ** exponent * measure

    return integrate_points(body, integrand, rule, formula_tag=f"as_p^lam,o, p={parse_p(p)}")


# ==================== Radii ====================

def volume_radius(d: int, lam: float, volume: float) -> float:
    return j_lambda_inv(d, lam, volume / sphere_area(d - 1))


def perimeter_radius(d: int, lam: float, perimeter: float) -> float:
    """alpha with omega_{d-1} sin_lam(alpha)^{d-1} = perimeter."""
    scaled = (perimeter / sphere_area(d - 1)) ** (1.0 / (d - 1))
    if lam == 0.0:
        return scaled
    s = math.sqrt(lam)
    return math.asin(min(s * scaled, 1.0)) / s


def radii(body: ChartBody, rule: Optional[QuadratureRule] = None) -> Tuple[FunctionalValue, FunctionalValue]:
    """(alpha_K, alpha_P): radii of the geodesic balls with K's volume and K's perimeter."""
    d, lam = body.d, body.lam
    omega = sphere_area(d - 1)
    volume = volume_lambda(body, rule)
    perimeter = perimeter_lambda(body, rule)
    alpha_k = volume_radius(d, lam, volume.value)
    alpha_p = perimeter_radius(d, lam, perimeter.value)
    # first-order propagation through dJ/dalpha = sin^{d-1} and dP/dalpha = (d-1) omega sin^{d-2} cos
    sin_k = sin_lambda(lam, alpha_k)
    err_k = volume.abs_error / (omega * sin_k ** (d - 1))
    sin_p, cos_p = sin_lambda(lam, alpha_p), cos_lambda(lam, alpha_p)
    slope = (d - 1) * omega * sin_p ** (d - 2) * cos_p
    err_p = perimeter.abs_error / slope if slope > 0.0 else math.inf
    return (
        FunctionalValue(value=alpha_k, abs_error=err_k, formula_tag="alpha_K = J^-1(vol/omega)", rule_id=volume.rule_id),
        FunctionalValue(value=alpha_p, abs_error=err_p, formula_tag="alpha_P from P = omega sin^{d-1}", rule_id=perimeter.rule_id),
    )


# ==================== Entropies ====================

_ENTROPY_KINDS = {"E_C": False, "E_C^lambda": False, "E_PW": True, "E_PW^lambda,o": True}


def entropy_lambda_families(body: ChartBody, which: str, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """
    Curvature entropies of the two lambda families.

    E_C^lam = int H_lam log H_lam sigma_lam dA / int H_lam sigma_lam dA, and
    E_PW^{lam,o} the same with the weighted curvature and measure of
    `as_p_lambda_o`. At lam = 1 both equal E^s; at lam = 0 they are the
    Gaussian entropy E_C and the centro-affine entropy E_PW.
    """
    if which not in _ENTROPY_KINDS:
        raise DomainError(f"unknown entropy '{which}' (expected E_C or E_PW)")
    d, lam = body.d, body.lam
    o_weighted = _ENTROPY_KINDS[which]

    def parts(pts: CurvaturePoint) -> Tuple[np.ndarray, np.ndarray]:
        return weighted_curvature(d, lam, pts.H_e, pts.x_sq, pts.h_x, o_weighted=o_weighted)

    def weighted_log(pts: CurvaturePoint) -> np.ndarray:
        curvature, measure = parts(pts)
        return curvature * np.log(curvature) * measure

    def total(pts: CurvaturePoint) -> np.ndarray:
        curvature, measure = parts(pts)
        return curvature * measure

    numerator = integrate_points(body, weighted_log, rule, formula_tag=f"int k log k ({which})")
    denominator = integrate_points(body, total, rule, formula_tag=f"int k ({which})")
    tag = "E_PW^lam,o" if o_weighted else "E_C^lam"
    return fv_ratio(numerator, denominator, f"{tag} = int k log k / int k")


def entropy_power_lambda(body: ChartBody, which: str, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """exp(-E) for either lambda family."""
    entropy = entropy_lambda_families(body, which, rule)
    return fv_map(entropy, lambda e: math.exp(-e), lambda e: math.exp(-e), f"exp(-{entropy.formula_tag})")


def entropy_probe(body: ChartBody, q: float, rule: Optional[QuadratureRule] = None) -> float:
    """
    (Omega_q(K*) / P(K*))^{1 + d/q} at lam = 1, through the duality identities
    Omega_q(K*) = Omega_{d^2/q}(K) and P(K*) = Omega_inf(K).
    """
    d = body.d
    numerator = omega_p_lambda(body, d * d / q, rule).value
    denominator = omega_p_lambda(body, math.inf, rule).value
    return (numerator / denominator) ** (1.0 + d / q)


def entropy_spherical(body: ChartBody, rule: Optional[QuadratureRule] = None) -> EntropyBundleModel:
    """
    Spherical curvature entropy E^s with entropy power, KL divergence and the
    q -> 0+ probe sequence.

    D_KL = E^s + log(P(K) / P(K*)), which is >= 0 and vanishes on caps.

    Raises:
        DomainError: Unless lam = 1
    """
    if body.lam != 1.0:
        raise DomainError("the spherical entropy needs lambda = 1")
    entropy = entropy_lambda_families(body, "E_C", rule)
    entropy = entropy.model_copy(update={"formula_tag": "E^s = int H log H dP / P(K*)"})
    power = fv_map(entropy, lambda e: math.exp(-e), lambda e: math.exp(-e), "entropy power exp(-E^s)")
    perimeter = perimeter_lambda(body, rule)
    dual_perimeter = omega_p_lambda(body, math.inf, rule)
    log_ratio = fv_map(fv_ratio(perimeter, dual_perimeter, "P/P*"), math.log, lambda v: 1.0 / v, "log P/P*")
    kl = fv_sum([(1.0, entropy), (1.0, log_ratio)], "D_KL = E^s + log(P/P*)")
    probes = [(q, entropy_probe(body, q, rule)) for q in ENTROPY_PROBES]
    # probe(q) = E + O(q): eliminate the linear term from the last two probes
    extrapolated = (10.0 * probes[-1][1] - probes[-2][1]) / 9.0
    return EntropyBundleModel(E_s=entropy, entropy_power=power, kl=kl, p_limit_check=probes, extrapolated=extrapolated)


def dual_curvature_entropy(body: ChartBody, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """
    E^s(K*) = -(1/P(K)) int log H dP, read off the boundary of K.

    The Gauss map of K carries dP(K) to H dP and H to 1/H on the dual.
    """
    if body.lam != 1.0:
        raise DomainError("the spherical entropy needs lambda = 1")
    numerator = integrate_points(body, lambda pts: np.log(pts.H_lambda) * pts.sigma_lambda, rule,
                                 formula_tag="int log H dP")
    perimeter = perimeter_lambda(body, rule)
    return fv_scale(fv_ratio(numerator, perimeter, "E^s(K*)"), -1.0)


@dataclass(frozen=True)
class EuclideanEntropies:
    """Gaussian, centro-affine and support entropies of a Euclidean body."""
    E_C: FunctionalValue
    E_PW: FunctionalValue
    E_h: FunctionalValue
    maximizer: np.ndarray
    converged: bool


def _euclidean(body: ChartBody) -> ChartBody:
    return body if body.space.is_euclidean else body.with_lambda(0.0)


def support_entropy(body: ChartBody, rule: Optional[QuadratureRule] = None,
                    max_iter: int = 100) -> Tuple[FunctionalValue, np.ndarray, bool]:
    """
    E_h = max over interior z of (1/omega) int log(h(u) - z.u) du.

    Damped Newton ascent; steps are halved until h - z.u stays positive at
    every node and the objective does not decrease.

    Returns:
        (E_h, maximizer, converged)
    """
    rule = rule or rule_for(body, body.level)
    omega = sphere_area(body.d - 1)
    u, w = rule.nodes, rule.weights
    h = body.h(u)
    z = np.zeros(body.d)

    def objective(point: np.ndarray) -> float:
        gap = h - u @ point
        if np.any(gap <= 0.0):
            return -math.inf
        return float(w @ np.log(gap)) / omega

    value = objective(z)
    converged = False
    for iteration in range(max_iter):
        gap = h - u @ z
        grad = rule.symmetrize(-(w / gap) @ u / omega)
        if np.linalg.norm(grad) <= 1e-13:
            converged = True
            break
        hess = rule.symmetrize(-np.einsum("n,ni,nj->ij", w / gap ** 2, u, u) / omega)
        step = -np.linalg.solve(hess, grad)
        t = 1.0
        while t > 1e-14:
            trial = objective(z + t * step)
            if trial >= value - 1e-15 * abs(value):
                z = z + t * step
                value = trial
                break
            t *= 0.5
        else:
            break
        logger.debug("support entropy iteration %d: value %.15g |grad| %.3e", iteration, value, np.linalg.norm(grad))
    result, error = integrate_values(rule, lambda r: np.log(body.h(r.nodes) - r.nodes @ z))
    entropy = FunctionalValue(value=float(result) / omega, abs_error=float(error) / omega,
                              formula_tag="E_h = max int log(h - z.u)", rule_id=rule.rule_id)
    return entropy, z, converged


def euclid_entropies(body: ChartBody, rule: Optional[QuadratureRule] = None) -> EuclideanEntropies:
    """E_C, E_PW and E_h of the chart body read as a Euclidean body."""
    flat = _euclidean(body)
    e_c = entropy_lambda_families(flat, "E_C", rule)
    e_pw = entropy_lambda_families(flat, "E_PW", rule)
    e_h, z, converged = support_entropy(flat, rule)
    return EuclideanEntropies(e_c, e_pw, e_h, z, converged)


def chart_volume_euclid(body: ChartBody, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """Euclidean volume of the chart body, (1/d) int h dA_e."""
    d = body.d
    rule = rule or rule_for(body, body.level)
    return integrate_boundary(body, lambda x, n, H_e, h: h / d, rule, formula_tag="vol_e = (1/d) int h dA")


def polar_volume_euclid(body: ChartBody, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """Euclidean volume of the chart polar, (1/d) int h^{-d} du."""
    d = body.d
    rule = rule or rule_for(body, body.level)
    value, error = integrate_values(rule, lambda r: body.h(r.nodes) ** (-d) / d)
    return FunctionalValue(value=float(value), abs_error=float(error), formula_tag="vol_e(K°) = (1/d) int h^-d",
                           rule_id=rule.rule_id)


def as_p_euclid(body: ChartBody, p: PLike, rule: Optional[QuadratureRule] = None) -> FunctionalValue:
    """Centro-affine L_p affine surface area of the chart body."""
    return as_p_lambda_o(_euclidean(body), p, rule)


# ==================== Geodesic Balls ====================

def _cap_trig(d: int, lam: float, alpha: float) -> Tuple[float, float, float]:
    s = sin_lambda(lam, alpha)
    c = cos_lambda(lam, alpha)
    return s, c, lam * c * c + s * s


def cap_volume(d: int, lam: float, alpha: float) -> float:
    return sphere_area(d - 1) * j_lambda(d, lam, alpha)


def cap_perimeter(d: int, lam: float, alpha: float) -> float:
    return sphere_area(d - 1) * sin_lambda(lam, alpha) ** (d - 1)


def cap_omega_p(d: int, lam: float, alpha: float, p: PLike) -> float:
    """omega sin^{d(d-1)/(d+p)} cos^{p(d-1)/(d+p)} (omega cos^{d-1} at p = inf)."""
    p = parse_p(p)
    s, c, _ = _cap_trig(d, lam, alpha)
    if math.isinf(p):
        return sphere_area(d - 1) * c ** (d - 1)
    if p == -d:
        raise DomainError("p = -d is excluded")
    return sphere_area(d - 1) * s ** (d * (d - 1) / (d + p)) * c ** (p * (d - 1) / (d + p))


def cap_as_p(d: int, lam: float, alpha: float, p: PLike) -> float:
    """Weighted L_p affine surface area of a ball about its own center."""
    p = parse_p(p)
    s, c, w = _cap_trig(d, lam, alpha)
    if math.isinf(p):
        return sphere_area(d - 1) * c ** (d - 1) * w ** (-d / 2.0)
    if p == -d:
        raise DomainError("p = -d is excluded")
    return (sphere_area(d - 1) * s ** (d * (d - 1) / (d + p)) * c ** (p * (d - 1) / (d + p))
            * w ** (-d * (p - 1) / (2.0 * (d + p))))


def cap_entropy_c(d: int, lam: float, alpha: float) -> float:
    return -(d - 1) * math.log(tan_lambda(lam, alpha))


def cap_entropy_pw(d: int, lam: float, alpha: float) -> float:
    _, _, w = _cap_trig(d, lam, alpha)
    return -(d - 1) * math.log(tan_lambda(lam, alpha)) - (d + 1) / 2.0 * math.log(w)


def cap_entropy_power(d: int, alpha: float) -> float:
    """Spherical entropy power tan(alpha)^{d-1}."""
    return math.tan(alpha) ** (d - 1)


def euclid_ball_as_p(d: int, r: float, p: PLike) -> float:
    """as_p(r B) = omega_{d-1} r^{d(d-p)/(d+p)}."""
    p = parse_p(p)
    if math.isinf(p):
        return sphere_area(d - 1) * r ** (-d)
    return sphere_area(d - 1) * r ** (d * (d - p) / (d + p))


def omega_p_cap_by_volume_2d(volume: float, p: PLike) -> float:
    """Omega_p of the d = 2 cap with the given area."""
    p = parse_p(p)
    v = volume
    return v ** (1.0 / (p + 2)) * (2 * math.pi - v) ** (p / (p + 2)) * (4 * math.pi - v) ** (1.0 / (p + 2))


def omega_p_cap_by_perimeter_2d(perimeter: float, p: PLike) -> float:
    """Omega_p of the d = 2 cap with the given perimeter."""
    p = parse_p(p)
    return perimeter ** (2.0 / (p + 2)) * (4 * math.pi ** 2 - perimeter ** 2) ** (p / (2.0 * (p + 2)))


def omega_p_perimeter_bound(d: int, perimeter: float, p: PLike) -> float:
    """P^{d/(d+p)} (omega^{2/(d-1)} - P^{2/(d-1)})^{((d-1)/2) p/(d+p)}, the ball value at radius alpha_P."""
    p = parse_p(p)
    omega = sphere_area(d - 1)
    gap = max(omega ** (2.0 / (d - 1)) - perimeter ** (2.0 / (d - 1)), 0.0)
    return perimeter ** (d / (d + p)) * gap ** ((d - 1) / 2.0 * p / (d + p))


def euclid_volume_ratio(volume: float, d: int) -> float:
    """vol / kappa_d."""
    return volume / ball_volume(d)
