"""
Seeded generators for the body zoo.

Every family member is drawn from its own counter-based Philox stream,
derived from (family seed, index) through numpy's SeedSequence, so a body
depends only on its seed and index and never on the order in which
workers produce it. Draws that fail the C2+ audit are resampled from the
same stream a bounded number of times.
"""
import logging
import math
from typing import Any, Callable, Dict, Iterator, Optional, Tuple

import numpy as np
from scipy import stats

from sphereconvex import config
from sphereconvex.errors import AuditError, DomainError, SpecError
from sphereconvex.geometry.chart_core import ChartBody, SpaceForm, tan_lambda
from sphereconvex.geometry.support import (
    Axisymmetric,
    Cap,
    Ellipsoid,
    Fourier2D,
    Harmonic3D,
    SupportRep,
)
from sphereconvex.models.schemas import FamilyKind, FamilySpec

logger = logging.getLogger(__name__)

MAX_RETRIES = 25
POLYGON_SAMPLES = 4096


def member_rng(seed: int, index: int) -> np.random.Generator:
    """Philox generator for member `index` of the family seeded with `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _uniform(rng: np.random.Generator, parameters: Dict[str, Any], name: str, default: Tuple[float, float]) -> float:
    low, high = parameters.get(name, default)
    return float(rng.uniform(low, high))


def _base_alpha(rng: np.random.Generator, lam: float, parameters: Dict[str, Any]) -> float:
    """Geodesic radius of the reference ball: `alpha`, else drawn from `alpha_range`."""
    if "alpha" in parameters:
        return float(parameters["alpha"])
    if lam == 0.0:
        return _uniform(rng, parameters, "alpha_range", (0.5, 1.5))
    # fractions of the hemisphere radius
    return _uniform(rng, parameters, "alpha_range", (0.2, 0.65)) * math.pi / (2.0 * math.sqrt(lam))


def _chart_scale(lam: float) -> float:
    return 1.0 if lam == 0.0 else 1.0 / math.sqrt(lam)


# ==================== Families ====================

def _cap(rng, dim, lam, parameters) -> SupportRep:
    alpha = _base_alpha(rng, lam, parameters)
    center = np.asarray(parameters.get("center", np.zeros(dim)), dtype=float)
    return Cap(alpha, center, lam)


def _offset_ball(rng, dim, lam, parameters) -> SupportRep:
    """Euclidean ball of the chart whose center is off the chart origin."""
    scale = _chart_scale(lam)
    radius = float(parameters.get("radius", rng.uniform(0.3, 0.8) * scale))
    if "center" in parameters:
        center = np.asarray(parameters["center"], dtype=float)
    else:
        direction = rng.standard_normal(dim)
        direction /= np.linalg.norm(direction)
        center = direction * rng.uniform(0.0, 0.6) * radius
    return Ellipsoid(radius ** 2 * np.eye(dim), center)


def _ellipsoid(rng, dim, lam, parameters) -> SupportRep:
    scale = _chart_scale(lam)
    low, high = parameters.get("eccentricity_range", (1.0, 2.0))
    radius = float(parameters.get("radius", rng.uniform(0.3, 0.7) * scale))
    axes = radius * rng.uniform(low, high, size=dim) / math.sqrt(high)
    rotation = stats.special_ortho_group.rvs(dim, random_state=rng)
    matrix = rotation @ np.diag(axes ** 2) @ rotation.T
    offset = float(parameters.get("offset", 0.0))
    direction = rng.standard_normal(dim)
    center = offset * np.min(axes) * direction / np.linalg.norm(direction)
    return Ellipsoid(matrix, center)


def _amplitude(parameters: Dict[str, Any], default: float) -> float:
    amplitude = float(parameters.get("amplitude", default))
    if amplitude < 0.0:
        raise SpecError("amplitude must be non-negative", field="parameters.amplitude")
    return amplitude


def _axisymmetric(rng, dim, lam, parameters) -> SupportRep:
    alpha = _base_alpha(rng, lam, parameters)
    amplitude = _amplitude(parameters, 0.1)
    if amplitude == 0.0:
        return Cap(alpha, np.zeros(dim), lam)
    bandwidth = int(parameters.get("bandwidth", 6))
    k = np.arange(1, bandwidth + 1)
    coeffs = np.concatenate([[1.0], amplitude * rng.standard_normal(bandwidth) / k ** 3])
    return Axisymmetric(tan_lambda(lam, alpha) * coeffs, dim)


def _random_smooth_2d(rng, dim, lam, parameters) -> SupportRep:
    alpha = _base_alpha(rng, lam, parameters)
    amplitude = _amplitude(parameters, 0.1)
    if amplitude == 0.0:
        return Cap(alpha, np.zeros(2), lam)
    bandwidth = int(parameters.get("bandwidth", 8))
    k = np.arange(1, bandwidth + 1)
    decay = amplitude / k ** 3
    a = np.concatenate([[1.0], decay * rng.standard_normal(bandwidth)])
    b = np.concatenate([[0.0], decay * rng.standard_normal(bandwidth)])
    r = tan_lambda(lam, alpha)
    return Fourier2D(r * a, r * b)


def _random_smooth_3d(rng, dim, lam, parameters) -> SupportRep:
    alpha = _base_alpha(rng, lam, parameters)
    amplitude = _amplitude(parameters, 0.1)
    if amplitude == 0.0:
        return Cap(alpha, np.zeros(3), lam)
    bandwidth = int(parameters.get("bandwidth", 4))
    r = tan_lambda(lam, alpha)
    # Y_00 = 1 / (2 sqrt(pi))
    coeffs = [2.0 * math.sqrt(math.pi)]
    for l in range(1, bandwidth + 1):
        weight = amplitude * math.sqrt(4.0 * math.pi / (2 * l + 1)) / l ** 3
        coeffs.extend(weight * rng.standard_normal(2 * l + 1))
    return Harmonic3D(r * np.asarray(coeffs))


def _symmetric_2sphere(rng, dim, lam, parameters) -> SupportRep:
    """Even planar support function: a body of S^2 symmetric about the chart center."""
    if "alpha" not in parameters and "alpha_range" not in parameters:
        parameters = dict(parameters, alpha_range=(0.25, 0.5))
    alpha = _base_alpha(rng, lam, parameters)
    amplitude = _amplitude(parameters, 0.08)
    if amplitude == 0.0:
        return Cap(alpha, np.zeros(2), lam)
    bandwidth = int(parameters.get("bandwidth", 8))
    a = np.zeros(bandwidth + 1)
    b = np.zeros(bandwidth + 1)
    a[0] = 1.0
    for k in range(2, bandwidth + 1, 2):
        a[k], b[k] = amplitude * rng.standard_normal(2) / k ** 3
    r = tan_lambda(lam, alpha)
    return Fourier2D(r * a, r * b)


def polygon_support(sides: int, radius: float, theta: np.ndarray, phase: float = 0.0) -> np.ndarray:
    """Support function of the regular polygon with the given circumradius."""
    step = 2.0 * math.pi / sides
    offset = np.mod(theta - phase + 0.5 * step, step) - 0.5 * step
    return radius * np.cos(offset)


def _rounded_polygon(rng, dim, lam, parameters) -> SupportRep:
    """
    Regular polygon smoothed by the heat kernel at time rounding^2, plus a
    rounding-sized ball. The kernel is positive, so h + h'' >= rounding > 0.
    """
    sides = int(parameters.get("sides", 5))
    if sides < 3:
        raise SpecError("a polygon needs at least 3 sides", field="parameters.sides")
    rounding = float(parameters.get("rounding", 0.1))
    if rounding <= 0.0:
        raise SpecError("rounding must be positive", field="parameters.rounding")
    radius = float(parameters.get("radius", 0.6 * _chart_scale(lam)))
    phase = float(parameters.get("phase", rng.uniform(0.0, 2.0 * math.pi / sides)))
    bandwidth = int(parameters.get("bandwidth", min(config.MAX_BANDWIDTH_2D, math.ceil(7.0 / rounding))))
    theta = 2.0 * math.pi * np.arange(POLYGON_SAMPLES) / POLYGON_SAMPLES
    spectrum = np.fft.rfft(polygon_support(sides, radius, theta, phase)) / POLYGON_SAMPLES
    k = np.arange(bandwidth + 1)
    kernel = np.exp(-(k * rounding) ** 2)
    a = 2.0 * spectrum.real[: bandwidth + 1] * kernel
    b = -2.0 * spectrum.imag[: bandwidth + 1] * kernel
    a[0] = spectrum.real[0] + rounding
    b[0] = 0.0
    return Fourier2D(a, b)


_FAMILIES: Dict[FamilyKind, Callable[..., SupportRep]] = {
    FamilyKind.CAP: _cap,
    FamilyKind.OFFSET_BALL: _offset_ball,
    FamilyKind.ELLIPSOID: _ellipsoid,
    FamilyKind.AXISYMMETRIC: _axisymmetric,
    FamilyKind.RANDOM_SMOOTH_2D: _random_smooth_2d,
    FamilyKind.RANDOM_SMOOTH_3D: _random_smooth_3d,
    FamilyKind.SYMMETRIC_2SPHERE: _symmetric_2sphere,
    FamilyKind.ROUNDED_POLYGON: _rounded_polygon,
}

_FIXED_DIM = {
    FamilyKind.RANDOM_SMOOTH_2D: 2,
    FamilyKind.RANDOM_SMOOTH_3D: 3,
    FamilyKind.SYMMETRIC_2SPHERE: 2,
    FamilyKind.ROUNDED_POLYGON: 2,
}


# ==================== Public API ====================

def family_member(spec: FamilySpec, index: int, level: Optional[int] = None) -> ChartBody:
    """
    Member `index` of a family.

    Args:
        spec: Family document
        index: Member index (scans use 0..N-1)
        level: Quadrature level of the body (default resolution when omitted)

    Returns:
        An audited chart body

    Raises:
        SpecError: If the family parameters are invalid
        AuditError: If no admissible body was drawn within MAX_RETRIES
    """
    kind = FamilyKind(spec.kind)
    dim = _FIXED_DIM.get(kind, spec.dim)
    if kind in _FIXED_DIM and spec.dim != dim:
        raise SpecError(f"{kind.value} bodies have dimension {dim}", field="dim")
    if kind == FamilyKind.SYMMETRIC_2SPHERE and spec.lam != 1.0:
        raise SpecError("symmetric_2sphere bodies live on the unit sphere", field="lambda")
    level = config.DEFAULT_RESOLUTION if level is None else level
    space = SpaceForm(dim, spec.lam)
    rng = member_rng(spec.seed, index)
    builder = _FAMILIES[kind]
    last_error: Optional[Exception] = None
    for attempt in range(MAX_RETRIES):
        try:
            rep = builder(rng, dim, spec.lam, spec.parameters)
            return ChartBody(space, rep, name=f"{kind.value}-{spec.seed}-{index}", level=level)
        except (AuditError, DomainError) as exc:
            last_error = exc
            logger.debug("[%s] draw %d of member %d rejected: %s", kind.value, attempt, index, exc)
    raise AuditError(f"no admissible {kind.value} body after {MAX_RETRIES} draws: {last_error}")


def generate(spec: FamilySpec, level: Optional[int] = None) -> ChartBody:
    """The first member of a family."""
    return family_member(spec, 0, level)


def iter_family(spec: FamilySpec, count: int, start: int = 0, level: Optional[int] = None) -> Iterator[Tuple[int, ChartBody]]:
    """(index, body) pairs for members start .. start + count - 1."""
    for index in range(start, start + count):
        yield index, family_member(spec, index, level)


def cap_body(dim: int, lam: float, alpha: float, center: Optional[np.ndarray] = None,
             level: Optional[int] = None) -> ChartBody:
    """Geodesic ball of radius alpha; its center is the chart point `center` (default the origin)."""
    level = config.DEFAULT_RESOLUTION if level is None else level
    center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    return ChartBody(SpaceForm(dim, lam), Cap(alpha, center, lam), name=f"cap-{alpha:g}", level=level)
