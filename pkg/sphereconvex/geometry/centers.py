"""
Centers of spherical convex bodies.

The GHS center is the unique chart center at which the chart body has its
centroid at the origin. It minimizes the projected volume

    F(delta) = (1 + |delta|^2)^{(d+1)/2} int rho^d / (d (1 + rho delta.u)^d) du,

the Euclidean volume of the chart body seen from the center o + E delta
(chart coordinates scaled by sqrt(lam)). F is strictly convex, so damped
Newton steps with backtracking converge globally.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize, special

from sphereconvex import config
from sphereconvex.errors import CenterError, DomainError
from sphereconvex.geometry.chart_core import (
    ChartBody,
    dual_body,
    recenter,
)
from sphereconvex.geometry.functionals import chart_volume_euclid, polar_volume_euclid
from sphereconvex.geometry.quadrature import QuadratureRule, ball_volume, rule_for, sphere_area, sphere_rule
from sphereconvex.geometry.support import normalize
from sphereconvex.models.schemas import FunctionalValue

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CenterResult:
    """Outcome of a center search."""
    center: np.ndarray          # unit vector of R^{d+1}
    recentered: ChartBody       # the body in the chart at `center`
    residual: float             # centroid norm relative to the mean radius
    iterations: int
    objective: float            # objective value at the returned center


# ==================== Projected Volume ====================

@dataclass(frozen=True)
class ChartMoments:
    """Euclidean moments of a chart body in sqrt(lam)-scaled coordinates."""
    volume: float
    first: np.ndarray    # int x dx
    second: np.ndarray   # int x x^t dx
    mean_radius: float

    @property
    def centroid(self) -> np.ndarray:
        return self.first / self.volume


def chart_moments(body: ChartBody, rule: Optional[QuadratureRule] = None) -> ChartMoments:
    """Volume, first and second moments of the chart body by radial quadrature."""
    d = body.d
    rule = rule or rule_for(body, body.level)
    scale = 1.0 if body.space.is_euclidean else body.space.sqrt_lam
    rho = scale * body.radial_at(rule)
    u = rule.nodes
    volume = float(rule.apply(rho ** d)) / d
    first = rule.symmetrize(rule.apply((rho ** (d + 1))[:, None] * u) / (d + 1))
    second = rule.symmetrize(rule.apply((rho ** (d + 2))[:, None, None] * u[:, :, None] * u[:, None, :]) / (d + 2))
    mean_radius = float(rule.apply(rho)) / sphere_area(d - 1)
    return ChartMoments(volume, first, second, mean_radius)


def projected_volume(body: ChartBody, delta: np.ndarray, rule: Optional[QuadratureRule] = None) -> float:
    """
    F(delta): Euclidean volume of the chart body seen from the chart center
    normalize(o + E delta), with delta in sqrt(lam)-scaled chart coordinates.

    Returns inf when the body leaves the open hemisphere of that center.
    """
    d = body.d
    rule = rule or rule_for(body, body.level)
    scale = 1.0 if body.space.is_euclidean else body.space.sqrt_lam
    rho = scale * body.radial_at(rule)
    delta = np.asarray(delta, dtype=float)
    tilt = 1.0 + rho * (rule.nodes @ delta)
    if np.any(tilt <= 0.0):
        return math.inf
    integral = float(rule.apply(rho ** d / (d * tilt ** d)))
    return (1.0 + delta @ delta) ** ((d + 1) / 2.0) * integral


def _tilted_center(body: ChartBody, delta: np.ndarray) -> np.ndarray:
    return normalize(body.center + body.frame @ delta)


# ==================== GHS Center ====================

def ghs_center(body: ChartBody, tol: Optional[float] = None, max_iter: Optional[int] = None) -> CenterResult:
    """
    GHS center: the chart center at which the chart body is centered.

    Each iteration takes the Newton step delta = [V I + (d+2) M]^{-1} V c of
    the projected volume (V volume, c centroid, M second moment of the
    current chart body), halves it until F decreases, and recenters the
    original body at normalize(o + E delta). Recentering always starts from
    the input body so refit residuals do not accumulate.

    Args:
        body: Chart body with lam > 0
        tol: Relative centroid tolerance (default GHS_TOLERANCE)
        max_iter: Iteration cap (default GHS_MAX_ITER)

    Raises:
        DomainError: For lam = 0
        CenterError: If the line search fails or the iteration cap is hit
    """
    if body.space.is_euclidean:
        raise DomainError("the GHS center needs lambda > 0")
    tol = config.GHS_TOLERANCE if tol is None else tol
    max_iter = config.GHS_MAX_ITER if max_iter is None else max_iter
    d = body.d
    # refit noise floors the attainable centroid norm
    target = max(tol, 10.0 * body.fit_residual)

    current = body
    best: Tuple[float, np.ndarray] = (math.inf, body.center)
    for iteration in range(max_iter + 1):
        rule = rule_for(current, current.level)
        moments = chart_moments(current, rule)
        residual = float(np.linalg.norm(moments.centroid)) / moments.mean_radius
        if residual < best[0]:
            best = (residual, current.center)
        logger.debug("GHS iteration %d: residual %.3e", iteration, residual)
        if residual <= target:
            logger.info("GHS center found after %d iterations (residual %.3e)", iteration, residual)
            return CenterResult(current.center, current, residual, iteration, moments.volume)
        if iteration == max_iter:
            break

        system = moments.volume * np.eye(d) + (d + 2) * moments.second
        step = rule.symmetrize(np.linalg.solve(system, moments.first))
        base = moments.volume
        t = 1.0
        while True:
            trial = projected_volume(current, t * step, rule)
            if trial <= base * (1.0 + 1e-14):
                break
            t *= 0.5
            if t < 1e-10:
                raise CenterError("GHS line search failed", best_center=best[1], residual=best[0])
        try:
            current = recenter(body, _tilted_center(current, t * step))
        except DomainError as exc:
            raise CenterError(f"GHS step left the body: {exc}", best_center=best[1], residual=best[0]) from exc
    raise CenterError("GHS iteration cap reached", best_center=best[1], residual=best[0])


def is_centered(body: ChartBody, tol: Optional[float] = None) -> bool:
    """True when the chart body has its centroid at the origin within tol."""
    tol = config.GHS_TOLERANCE if tol is None else tol
    moments = chart_moments(body)
    return float(np.linalg.norm(moments.centroid)) / moments.mean_radius <= max(tol, 10.0 * body.fit_residual)


# ==================== Santalo Chart ====================

def polar_centroid_residual(body: ChartBody, rule: Optional[QuadratureRule] = None) -> float:
    """
    Centroid norm of the chart polar relative to its mean radius.

    The polar has radial function 1/h, so its centroid is
    (d/(d+1)) int h^{-(d+1)} u du / int h^{-d} du.
    """
    d = body.d
    rule = rule or rule_for(body, body.level)
    inv = 1.0 / body.h(rule.nodes)
    first = rule.symmetrize(rule.apply((inv ** (d + 1))[:, None] * rule.nodes) / (d + 1))
    volume = float(rule.apply(inv ** d)) / d
    mean_radius = float(rule.apply(inv)) / sphere_area(d - 1)
    return float(np.linalg.norm(first / volume)) / mean_radius


def santalo_chart(body: ChartBody, tol: Optional[float] = None) -> CenterResult:
    """
    Santalo point o*: the GHS center of the dual body.

    In the chart at o* the polar chart body is centered. Returns the input
    body recentered at o*.
    """
    dual = dual_body(body)
    dual_result = ghs_center(dual, tol)
    recentered = recenter(body, dual_result.center)
    residual = polar_centroid_residual(recentered)
    logger.info("Santalo chart: polar centroid residual %.3e", residual)
    return CenterResult(dual_result.center, recentered, residual, dual_result.iterations, dual_result.objective)


def blaschke_santalo_margin(body: ChartBody) -> Tuple[FunctionalValue, FunctionalValue]:
    """
    (vol(K-bar) vol(K-bar°), kappa_d^2) for the chart as given.

    The product is at most kappa_d^2 whenever the chart body or its polar is
    centered, in particular at the GHS chart.
    """
    d = body.d
    volume = chart_volume_euclid(body)
    polar_volume = polar_volume_euclid(body)
    product = volume.value * polar_volume.value
    error = volume.abs_error * polar_volume.value + volume.value * polar_volume.abs_error
    lhs = FunctionalValue(value=product, abs_error=error, formula_tag="vol(K) vol(K°)", rule_id=volume.rule_id)
    rhs = FunctionalValue(value=ball_volume(d) ** 2, abs_error=0.0, formula_tag="kappa_d^2", rule_id="closed-form")
    return lhs, rhs


# ==================== H_alpha Barycenters ====================

def _interior_samples(body: ChartBody, rule: QuadratureRule, radial_nodes: int = 32) -> Tuple[np.ndarray, np.ndarray]:
    """Points and weights of a radial Gauss-Legendre rule over the chart body."""
    d = body.d
    t, g = special.roots_legendre(radial_nodes)
    t = 0.5 * (t + 1.0)
    g = 0.5 * g
    rho = body.radial_at(rule)
    radii = rho[:, None] * t[None, :]
    points = (radii[:, :, None] * rule.nodes[:, None, :]).reshape(-1, d)
    weights = (rule.weights[:, None] * rho[:, None] * g[None, :] * radii ** (d - 1)).reshape(-1)
    return points, weights


def h_alpha_objective(points: np.ndarray, weights: np.ndarray, alpha: float, d: int,
                      delta: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Phi(delta) = (1 + |delta|^2)^{alpha/2} int (1+|x|^2)^{(alpha-d-1)/2} (1 + delta.x)^{-alpha} dx
    and its gradient, for a body at lam = 1 seen from normalize(o + E delta).

    Phi is the chart form of int_K sec(dist(v, w))^alpha dvol(w); alpha = d+1
    gives the projected volume.
    """
    tilt = 1.0 + points @ delta
    if np.any(tilt <= 0.0):
        return math.inf, np.zeros_like(delta)
    base = weights * (1.0 + np.einsum("ni,ni->n", points, points)) ** ((alpha - d - 1) / 2.0)
    scale = (1.0 + delta @ delta) ** (alpha / 2.0)
    integral = float(base @ tilt ** (-alpha))
    value = scale * integral
    grad = alpha * delta / (1.0 + delta @ delta) * value - alpha * scale * ((base * tilt ** (-alpha - 1.0)) @ points)
    return value, grad


def h_alpha_barycenter(body: ChartBody, alpha: float, tol: Optional[float] = None) -> CenterResult:
    """
    H_alpha barycenter of the uniform measure on K (lam = 1, alpha >= 1).

    Minimizes the strictly convex `h_alpha_objective` over chart offsets by
    BFGS on a fixed full-sphere rule, then recenters. alpha = d+1 reproduces
    the GHS center.

    Raises:
        DomainError: For lam != 1 or alpha < 1
        CenterError: If the minimizer does not reach the tolerance
    """
    if body.lam != 1.0:
        raise DomainError("H_alpha barycenters are defined for lambda = 1")
    if alpha < 1.0:
        raise DomainError("alpha must be at least 1")
    tol = config.GHS_TOLERANCE if tol is None else tol
    d = body.d
    rule = sphere_rule(body.level, d)
    points, weights = _interior_samples(body, rule)
    value0, _ = h_alpha_objective(points, weights, alpha, d, np.zeros(d))

    def fun(delta: np.ndarray) -> Tuple[float, np.ndarray]:
        value, grad = h_alpha_objective(points, weights, alpha, d, delta)
        if not math.isfinite(value):
            return 1e3 * value0, np.zeros(d)
        return value / value0, grad / value0

    result = optimize.minimize(fun, np.zeros(d), jac=True, method="BFGS", options={"gtol": tol, "maxiter": 500})
    residual = float(np.linalg.norm(result.jac))
    center = _tilted_center(body, result.x)
    if residual > max(100.0 * tol, 10.0 * body.fit_residual):
        raise CenterError(f"H_alpha minimization stopped: {result.message}", best_center=center, residual=residual)
    logger.info("H_%g barycenter after %d iterations (gradient %.3e)", alpha, result.nit, residual)
    return CenterResult(center, recenter(body, center), residual, int(result.nit), float(result.fun) * value0)

