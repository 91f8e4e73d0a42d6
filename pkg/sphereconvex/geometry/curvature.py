"""
Curvature of chart bodies.

Euclidean Gauss-Kronecker curvature comes from the support Hessian form. The
space-form curvature and the boundary-measure weight follow from the chart
identities

    H_lam   = H_e ((1 + lam |x|^2) / (1 + lam h^2))^{(d+1)/2}
    sigma   = (1 + lam |x|^2)^{-d/2} (1 + lam h^2)^{1/2}

at the boundary point x with outer normal u and support value h = x.u.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from sphereconvex import config
from sphereconvex.errors import DomainError, RepresentationError
from sphereconvex.geometry.chart_core import ChartBody, arctan_lambda, full_frame, j_lambda
from sphereconvex.geometry.quadrature import (
    QuadratureRule,
    integrate_radial,
    integrate_values,
    rule_for,
    sphere_area,
)
from sphereconvex.geometry.support import normalize, tangent_frames
from sphereconvex.models.schemas import FunctionalValue

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvaturePoint:
    """Curvature data at a batch of outer normals."""
    u: np.ndarray
    x: np.ndarray
    h_x: np.ndarray
    H_e: np.ndarray
    H_lambda: np.ndarray
    sigma_lambda: np.ndarray
    area_element: np.ndarray  # Euclidean boundary element per du, = 1 / H_e
    x_sq: np.ndarray


def weighted_curvature(d: int, lam: float, H_e: np.ndarray, x_sq: np.ndarray, h: np.ndarray,
                       o_weighted: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """
    Curvature and boundary weight of the two lambda families.

    With o_weighted=False this is (H_lam, sigma_lam). With o_weighted=True the
    factor 1 + lam h^2 becomes lam + h^2, which gives the curvature and measure
    of the weighted affine surface areas; at lam = 1 both agree bit for bit.
    """
    base = 1.0 + lam * x_sq
    denom = lam + h ** 2 if o_weighted else 1.0 + lam * h ** 2
    curvature = H_e * (base / denom) ** ((d + 1) / 2.0)
    measure = np.sqrt(denom) * base ** (-d / 2.0)
    return curvature, measure


def _points(body: ChartBody, data) -> CurvaturePoint:
    H_e = 1.0 / data.det
    x_sq = np.einsum("ni,ni->n", data.x, data.x)
    H_lam, sigma = weighted_curvature(body.d, body.lam, H_e, x_sq, data.h)
    return CurvaturePoint(data.u, data.x, data.h, H_e, H_lam, sigma, data.det, x_sq)


def curvature_points(body: ChartBody, rule: QuadratureRule) -> CurvaturePoint:
    """Curvature data at the nodes of a rule."""
    return _points(body, body.boundary(rule))


def points_at(body: ChartBody, u: np.ndarray) -> CurvaturePoint:
    """Curvature data at arbitrary outer normals."""
    return _points(body, body.boundary_at(u))


def gauss_kronecker_euclidean(body: ChartBody, u: np.ndarray) -> np.ndarray:
    """H_e(u) = 1 / det(support Hessian form)."""
    return points_at(body, u).H_e


def spherical_gk(body: ChartBody, u: np.ndarray) -> np.ndarray:
    """Space-form Gauss-Kronecker curvature H_lam at the boundary point with normal u (H_e when lam = 0)."""
    return points_at(body, u).H_lambda


def boundary_weight(body: ChartBody, u: np.ndarray) -> np.ndarray:
    """sigma_lam(u), the density of the space-form boundary measure against the Euclidean one."""
    return points_at(body, u).sigma_lambda


def chart_exponents(d: int, p: float, corrected: bool = True) -> Tuple[float, float]:
    """
    Exponents (e1, e2) of the single combined L_p integrand

        H_e^{p/(d+p)} (1 + lam |x|^2)^{e1} (1 + lam h^2)^{e2}.

    The consistent first exponent is -(d^2 - p) / (2(d+p)). `corrected=False`
    returns the printed variant -d(d-p) / (2(d+p)), kept for regression
    comparison; on caps it is off by cos_lam(alpha)^{-p(d-1)/(d+p)}.
    """
    if p == -d:
        raise DomainError("p = -d is excluded")
    if math.isinf(p):
        return (0.5 if corrected else d / 2.0), -d / 2.0
    e1 = -(d * d - p) / (2.0 * (d + p)) if corrected else -d * (d - p) / (2.0 * (d + p))
    e2 = d * (1.0 - p) / (2.0 * (d + p))
    return e1, e2


def integrate_points(body: ChartBody, fn: Callable[[CurvaturePoint], np.ndarray], rule: Optional[QuadratureRule] = None,
                     formula_tag: str = "boundary integral") -> FunctionalValue:
    """
    Integrate fn(points) against the Euclidean boundary element of the chart.

    Args:
        body: Chart body
        fn: Vectorized function of a CurvaturePoint batch
        rule: Quadrature rule (defaults to the body's level)
        formula_tag: Provenance tag
    """
    rule = rule or rule_for(body, body.level)
    value, error = integrate_values(rule, lambda r: fn(curvature_points(body, r)) * body.boundary(r).det)
    value = float(value)
    error = float(error) + abs(value) * body.fit_residual * (body.d + 1)
    return FunctionalValue(value=value, abs_error=error, formula_tag=formula_tag, rule_id=rule.rule_id)


# ==================== Principal Curvatures ====================

def _embedded(body: ChartBody, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Boundary point Y on the model sphere and the outer unit normal tangent to the sphere."""
    jet = body.jet(u)
    s = body.space.sqrt_lam
    frame = full_frame(body.center)
    ones = np.ones((u.shape[0], 1))
    y = normalize(np.hstack([s * jet.grad, ones]) @ frame.T) / s
    normal = normalize(np.hstack([u, -(s * jet.h)[:, None]]) @ frame.T)
    return y, normal


def _tangent_derivatives(body: ChartBody, u: np.ndarray, frames: np.ndarray, step: float):
    dy, dn = [], []
    for i in range(frames.shape[2]):
        t = frames[:, :, i]
        plus = math.cos(step) * u + math.sin(step) * t
        minus = math.cos(step) * u - math.sin(step) * t
        y_p, n_p = _embedded(body, plus)
        y_m, n_m = _embedded(body, minus)
        dy.append((y_p - y_m) / (2.0 * step))
        dn.append((n_p - n_m) / (2.0 * step))
    return np.stack(dy, axis=2), np.stack(dn, axis=2)


def principal_curvatures_sphere(body: ChartBody, u: np.ndarray, step: Optional[float] = None) -> np.ndarray:
    """
    Principal curvatures of the boundary inside the model sphere.

    The chart boundary is embedded into the sphere of radius 1/sqrt(lam) in
    R^{d+1}; derivatives of the embedded point and of its normal along the
    normal-sphere directions come from central differences with one Richardson
    step, and the shape operator solves dnu = W dY.

    Args:
        body: Chart body with lam > 0, d in {2, 3}
        u: (n, d) outer normals
        step: Difference step in radians (default FD_STEP)

    Returns:
        (n, d-1) principal curvatures, ascending

    Raises:
        RepresentationError: For d > 3
        DomainError: For lam = 0
    """
    d = body.d
    if d not in (2, 3):
        raise RepresentationError("principal curvatures are available for d = 2 and d = 3")
    if body.space.is_euclidean:
        raise DomainError("principal curvatures in the model sphere need lambda > 0")
    u = normalize(np.atleast_2d(np.asarray(u, dtype=float)))
    if d == 2:
        return spherical_gk(body, u)[:, None]
    step = config.FD_STEP if step is None else step
    frames = tangent_frames(u)
    dy_1, dn_1 = _tangent_derivatives(body, u, frames, step)
    dy_2, dn_2 = _tangent_derivatives(body, u, frames, step / 2.0)
    dy = (4.0 * dy_2 - dy_1) / 3.0
    dn = (4.0 * dn_2 - dn_1) / 3.0
    shape = np.linalg.pinv(dy) @ dn
    return np.sort(np.linalg.eigvals(shape).real, axis=1)


def mean_curvature_sphere(body: ChartBody, u: np.ndarray) -> np.ndarray:
    """Normalized mean curvature H_1 (average of the principal curvatures)."""
    return principal_curvatures_sphere(body, u).mean(axis=1)


# ==================== Quermassintegrals ====================

@dataclass(frozen=True)
class QuermassSet:
    """Spherical quermassintegrals A_k with conversions to W_{k+1} and U_{d-1-k}."""
    d: int
    A: Dict[int, FunctionalValue]

    def W(self, k: int) -> float:
        """W_k = A_{k-1} / (d binom(d-1, k-1)) for k >= 1, W_0 = A_{-1}."""
        if k == 0:
            return self.A[-1].value
        return self.A[k - 1].value / (self.d * math.comb(self.d - 1, k - 1))

    def U(self, j: int) -> float:
        """U_j = A_{d-1-j} / (omega_{d-1-j} omega_j), with U_d = A_{-1} / omega_d."""
        k = self.d - 1 - j
        if k == -1:
            return self.A[-1].value / sphere_area(self.d)
        return self.A[k].value / (sphere_area(k) * sphere_area(self.d - 1 - k))


def quermassintegrals(body: ChartBody, rule: Optional[QuadratureRule] = None) -> QuermassSet:
    """
    A_{-1} (volume), A_0 (perimeter) and, for d = 3, A_1 = 2 int H_1 dP + 2 vol.

    Raises:
        RepresentationError: Unless d in {2, 3} and lam = 1
    """
    d = body.d
    if d not in (2, 3) or body.lam != 1.0:
        raise RepresentationError("quermassintegrals are available for d in {2, 3} and lambda = 1")
    rule = rule or rule_for(body, body.level)
    volume = integrate_radial(body, lambda rho, u: j_lambda(d, 1.0, arctan_lambda(1.0, rho)), rule,
                              formula_tag="A_-1 = radial volume")
    perimeter = integrate_points(body, lambda pts: pts.sigma_lambda, rule, formula_tag="A_0 = perimeter")
    values = {-1: volume, 0: perimeter}
    if d == 3:
        mean = integrate_points(body, lambda pts: mean_curvature_sphere(body, pts.u) * pts.sigma_lambda, rule,
                                formula_tag="int H_1 dP")
        value = 2.0 * mean.value + 2.0 * volume.value
        values[1] = FunctionalValue(value=value, abs_error=2.0 * (mean.abs_error + volume.abs_error),
                                    formula_tag="A_1 = 2 int H_1 dP + 2 vol", rule_id=rule.rule_id)
    logger.debug("quermassintegrals: %s", {k: v.value for k, v in values.items()})
    return QuermassSet(d, values)
