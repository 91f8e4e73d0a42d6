"""
Chart geometry of the space forms Sp^d(lam), lam >= 0.

Points of the model sphere of radius 1/sqrt(lam) are passed around as unit
vectors p in R^{d+1} (the actual point is p / sqrt(lam)). The gnomonic chart at
a center o maps p to E^t p / ((p . o) sqrt(lam)), where the columns of E are an
orthonormal basis of o-perp. A convex body is stored through the support
function of its chart image.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from scipy import optimize, special

from sphereconvex import config
from sphereconvex.errors import AuditError, DomainError, FitError, RadialError, RepresentationError
from sphereconvex.geometry.quadrature import QuadratureRule, audit_nodes, fit_nodes, seed_nodes, sphere_area
from sphereconvex.geometry.support import (
    Axisymmetric,
    Cap,
    Ellipsoid,
    Fourier2D,
    Harmonic3D,
    SupportJet,
    SupportRep,
    as_directions,
    normalize,
    tangent_frames,
    tangential_form,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class SpaceForm:
    """Space form of dimension d and curvature lam >= 0."""

    d: int
    lam: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        if not self.lam >= 0.0 or math.isinf(self.lam):
            raise DomainError(f"curvature must be finite and >= 0, got {self.lam}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def is_euclidean(self) -> bool:
        return self.lam == 0.0

    @property
    def sqrt_lam(self) -> float:
        return math.sqrt(self.lam)

    @property
    def max_radius(self) -> float:
        """pi / (2 sqrt(lam)), the radius of a half-sphere (infinite when lam = 0)."""
        return math.inf if self.is_euclidean else math.pi / (2.0 * self.sqrt_lam)

    @property
    def omega(self) -> float:
        """omega_{d-1}."""
        return sphere_area(self.d - 1)

    @property
    def pole(self) -> Optional[np.ndarray]:
        if self.is_euclidean:
            return None
        e = np.zeros(self.d + 1)
        e[-1] = 1.0
        return e


# ==================== Trig-lambda Kernels ====================

def _check_range(lam: float, t: np.ndarray) -> None:
    if lam < 0.0:
        raise DomainError(f"curvature must be >= 0, got {lam}")
    if lam > 0.0 and (np.any(t < 0.0) or np.any(math.sqrt(lam) * t > math.pi * (1.0 + 1e-15))):
        raise DomainError("t outside [0, pi/sqrt(lam)]")


def cos_lambda(lam: float, t: ArrayLike) -> ArrayLike:
    t = np.asarray(t, dtype=float)
    _check_range(lam, t)
    if lam == 0.0:
        return _out(np.ones_like(t))
    return _out(np.cos(math.sqrt(lam) * t))


def sin_lambda(lam: float, t: ArrayLike) -> ArrayLike:
    t = np.asarray(t, dtype=float)
    _check_range(lam, t)
    if lam == 0.0:
        return _out(t.copy())
    s = math.sqrt(lam)
    return _out(np.sin(s * t) / s)


def tan_lambda(lam: float, t: ArrayLike) -> ArrayLike:
    """tan(sqrt(lam) t) / sqrt(lam); raises at the equator t = pi / (2 sqrt(lam))."""
    t = np.asarray(t, dtype=float)
    _check_range(lam, t)
    if lam == 0.0:
        return _out(t.copy())
    s = math.sqrt(lam)
    theta = s * t
    if np.any(np.abs(theta - math.pi / 2.0) <= 4.0 * np.finfo(float).eps * math.pi):
        raise DomainError("tan_lambda is undefined at t = pi/(2 sqrt(lam))")
    return _out(np.tan(theta) / s)


def trig_lambda(lam: float, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike, ArrayLike]:
    """
    The kernels (cos_lam t, sin_lam t, tan_lam t).

    lam = 0 returns the analytic limit (1, t, t).

    Raises:
        DomainError: For lam < 0, t outside [0, pi/sqrt(lam)], or tan at the equator
    """
    return cos_lambda(lam, t), sin_lambda(lam, t), tan_lambda(lam, t)


def arctan_lambda(lam: float, r: ArrayLike) -> ArrayLike:
    """Inverse of tan_lam on [0, inf]: chart radius -> geodesic radius."""
    r = np.asarray(r, dtype=float)
    if lam < 0.0:
        raise DomainError(f"curvature must be >= 0, got {lam}")
    if lam == 0.0:
        return _out(r.copy())
    s = math.sqrt(lam)
    return _out(np.arctan(s * r) / s)


def j_lambda(d: int, lam: float, alpha: ArrayLike) -> ArrayLike:
    """
    J_lam(alpha) = int_0^alpha sin_lam(t)^{d-1} dt.

    Closed form through the regularized incomplete beta function; the branch
    alpha > pi/(2 sqrt(lam)) uses the reflection about the equator.
    """
    alpha = np.asarray(alpha, dtype=float)
    _check_range(lam, alpha)
    if lam == 0.0:
        return _out(alpha ** d / d)
    s = math.sqrt(lam)
    theta = s * alpha
    a = d / 2.0
    half = 0.5 * special.beta(a, 0.5)
    reflected = theta > math.pi / 2.0
    base = np.where(reflected, math.pi - theta, theta)
    part = half * special.betainc(a, 0.5, np.sin(base) ** 2)
    value = np.where(reflected, 2.0 * half - part, part)
    return _out(value * lam ** (-d / 2.0))


def j_lambda_inv(d: int, lam: float, value: float) -> float:
    """Inverse of J_lam by bracketed root finding (closed form for lam = 0)."""
    if value < 0.0:
        raise DomainError("J_lambda is non-negative")
    if lam == 0.0:
        return (d * value) ** (1.0 / d)
    upper = math.pi / math.sqrt(lam)
    top = j_lambda(d, lam, upper)
    if value > top * (1.0 + 1e-14):
        raise DomainError(f"value {value} exceeds J_lambda(pi/sqrt(lam)) = {top}")
    if value == 0.0:
        return 0.0
    return optimize.brentq(lambda t: j_lambda(d, lam, t) - value, 0.0, upper, xtol=1e-15, rtol=4 * np.finfo(float).eps)


# ==================== Charts ====================

def chart_frame(center: np.ndarray) -> np.ndarray:
    """
    Orthonormal basis E (shape (d+1, d)) of center-perp.

    E is the first d columns of the Householder reflection that swaps e_{d+1}
    and the center, so the pole gets the identity frame.
    """
    o = np.asarray(center, dtype=float)
    n = o.shape[0]
    v = o.copy()
    v[-1] -= 1.0
    vv = v @ v
    if vv < 1e-30:
        return np.eye(n)[:, : n - 1]
    reflection = np.eye(n) - 2.0 * np.outer(v, v) / vv
    return reflection[:, : n - 1]


def full_frame(center: np.ndarray) -> np.ndarray:
    """[E | o], an orthogonal (d+1) x (d+1) matrix."""
    o = np.asarray(center, dtype=float)
    return np.column_stack([chart_frame(o), o])


def _unit_center(space: SpaceForm, center: Optional[np.ndarray]) -> np.ndarray:
    if space.is_euclidean:
        raise DomainError("lambda = 0 has no model sphere")
    o = space.pole if center is None else np.asarray(center, dtype=float)
    if o.shape != (space.d + 1,):
        raise DomainError(f"chart center must be a vector in R^{space.d + 1}")
    return o / np.linalg.norm(o)


def gnomonic(space: SpaceForm, center: Optional[np.ndarray], points: np.ndarray) -> np.ndarray:
    """
    Gnomonic chart coordinates of model-sphere points.

    Args:
        space: Space form (lam > 0)
        center: Chart center as a unit vector of R^{d+1} (None for the pole)
        points: (n, d+1) unit vectors

    Returns:
        (n, d) chart points

    Raises:
        DomainError: If a point is not in the open half-space of the center
    """
    o = _unit_center(space, center)
    p = normalize(np.atleast_2d(points))
    height = p @ o
    if np.any(height <= 0.0):
        raise DomainError("point outside the open half-space of the chart center")
    return (p @ chart_frame(o)) / (height[:, None] * space.sqrt_lam)


def unproject(space: SpaceForm, center: Optional[np.ndarray], chart_points: np.ndarray) -> np.ndarray:
    """Inverse of `gnomonic`: chart points (n, d) -> unit vectors (n, d+1)."""
    o = _unit_center(space, center)
    x = np.atleast_2d(np.asarray(chart_points, dtype=float))
    return normalize(o[None, :] + space.sqrt_lam * x @ chart_frame(o).T)


def geodesic_distance(space: SpaceForm, p: np.ndarray, q: np.ndarray) -> ArrayLike:
    """Distance on the model sphere of radius 1/sqrt(lam) between unit-vector points."""
    cosine = np.clip(np.sum(normalize(p) * normalize(q), axis=-1), -1.0, 1.0)
    return _out(np.arccos(cosine) / space.sqrt_lam)


def geodesic_point(space: SpaceForm, center: Optional[np.ndarray], direction: np.ndarray, t: float) -> np.ndarray:
    """Point at distance t from the center along the chart direction `direction`."""
    o = _unit_center(space, center)
    u = normalize(np.asarray(direction, dtype=float))
    theta = space.sqrt_lam * t
    return math.cos(theta) * o + math.sin(theta) * (chart_frame(o) @ u)


# ==================== Bodies ====================

@dataclass(frozen=True)
class BoundaryData:
    """Boundary samples at the nodes of a rule, parametrized by the outer normal."""
    u: np.ndarray        # (n, d) outer normals
    x: np.ndarray        # (n, d) boundary points
    h: np.ndarray        # (n,) support values x . u
    det: np.ndarray      # (n,) det of the support Hessian form = 1 / H_e
    min_eig: np.ndarray  # (n,) smallest eigenvalue of the support Hessian form


@dataclass(frozen=True, eq=False)
class ChartBody:
    """
    A convex body of a space form, stored as the support function of its chart.

    Construction audits positivity of h and the C2+ condition on a dense grid
    and records a chart radius bound.
    """

    space: SpaceForm
    support: SupportRep
    center: Optional[np.ndarray] = None
    properness_bound: Optional[float] = None
    fit_residual: float = 0.0
    name: Optional[str] = None
    level: int = config.DEFAULT_RESOLUTION
    chart_radius: float = field(default=0.0, init=False)
    _memo: Dict[Any, Any] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.support.dim != self.space.d:
            raise DomainError(f"{self.support.kind} support has dimension {self.support.dim}, space form has {self.space.d}")
        if isinstance(self.support, Cap) and self.support.lam != self.space.lam:
            raise DomainError("cap was built for a different curvature")
        if self.space.is_euclidean:
            if self.center is not None:
                raise DomainError("lambda = 0 charts have no sphere center")
        else:
            object.__setattr__(self, "center", _unit_center(self.space, self.center))
        self._audit()

    def _audit(self) -> None:
        nodes = audit_nodes(self.space.d, self.support.is_zonal, self.level, config.AUDIT_DENSITY_FACTOR)
        jet = self.support.evaluate(nodes)
        if np.min(jet.h) <= 0.0:
            raise AuditError("chart origin is not interior to the body (h <= 0)")
        form = tangential_form(jet, tangent_frames(nodes))
        ratio = np.linalg.eigvalsh(form)[:, 0] / jet.h
        worst = float(np.min(ratio))
        if worst <= config.AUDIT_EIGEN_FLOOR:
            raise AuditError(
                f"support Hessian form not positive definite (min eigenvalue / h = {worst:.3e})",
                min_eigenvalue=worst,
            )
        radius = float(np.max(np.linalg.norm(jet.grad, axis=1)))
        if self.properness_bound is not None:
            if radius > self.properness_bound:
                raise AuditError(f"chart body reaches radius {radius:.6g} beyond the declared bound {self.properness_bound}")
        else:
            object.__setattr__(self, "properness_bound", 1.05 * radius)
        object.__setattr__(self, "chart_radius", radius)

    # ---------- evaluation ----------

    @property
    def d(self) -> int:
        return self.space.d

    @property
    def lam(self) -> float:
        return self.space.lam

    @property
    def frame(self) -> np.ndarray:
        return chart_frame(self.center)

    def jet(self, u: np.ndarray) -> SupportJet:
        return self.support.evaluate(as_directions(u, self.d))

    def h(self, u: np.ndarray) -> np.ndarray:
        return self.support.values(as_directions(u, self.d))

    def boundary(self, rule: QuadratureRule) -> BoundaryData:
        """Boundary data at the rule nodes (memoized per rule)."""
        key = ("boundary", rule.rule_id)
        if key not in self._memo:
            self._memo[key] = self.boundary_at(rule.nodes)
        return self._memo[key]

    def boundary_at(self, u: np.ndarray) -> BoundaryData:
        u = as_directions(u, self.d)
        jet = self.support.evaluate(u)
        form = tangential_form(jet, tangent_frames(u))
        eig = np.linalg.eigvalsh(form)
        if np.any(eig[:, 0] <= 0.0):
            raise AuditError("support Hessian form not positive definite at a quadrature node",
                             min_eigenvalue=float(np.min(eig[:, 0])))
        return BoundaryData(u, jet.grad, jet.h, np.prod(eig, axis=1), eig[:, 0])

    def radial(self, u: np.ndarray) -> np.ndarray:
        """Chart radial function at directions u (see `radial`)."""
        return _radial_newton(self.support, as_directions(u, self.d))

    def radial_at(self, rule: QuadratureRule) -> np.ndarray:
        key = ("radial", rule.rule_id)
        if key not in self._memo:
            self._memo[key] = self.radial(rule.nodes)
        return self._memo[key]

    # ---------- derived bodies ----------

    def with_support(self, support: SupportRep, fit_residual: Optional[float] = None,
                     center: Optional[np.ndarray] = None) -> "ChartBody":
        return ChartBody(
            space=self.space,
            support=support,
            center=self.center if center is None else center,
            fit_residual=self.fit_residual if fit_residual is None else fit_residual,
            name=self.name,
            level=self.level,
        )

    def with_lambda(self, lam: float) -> "ChartBody":
        """The same chart body read in the space form of curvature lam (chart at the pole)."""
        support = self.support.ellipsoid if isinstance(self.support, Cap) else self.support
        return ChartBody(SpaceForm(self.d, lam), support, fit_residual=self.fit_residual, name=self.name, level=self.level)

    def with_level(self, level: int) -> "ChartBody":
        return ChartBody(self.space, self.support, self.center, fit_residual=self.fit_residual,
                         name=self.name, level=level)

    def rotated(self, rotation: np.ndarray) -> "ChartBody":
        """
        Image of the body under an orthogonal map of R^{d+1} (lam > 0).

        Supported for closed-form representations, whose chart images
        transform exactly.
        """
        if self.space.is_euclidean:
            raise DomainError("rotations act on the model sphere only")
        rot = np.asarray(rotation, dtype=float)
        new_center = rot @ self.center
        q = chart_frame(new_center).T @ rot @ self.frame
        rep = self.support
        if isinstance(rep, Cap):
            new_rep: SupportRep = Cap(rep.alpha, q @ rep.center, rep.lam)
        elif isinstance(rep, Ellipsoid):
            new_rep = Ellipsoid(q @ rep.matrix @ q.T, q @ rep.center)
        else:
            raise RepresentationError(f"rotation is not available for {rep.kind} bodies")
        return self.with_support(new_rep, center=new_center)

    def descriptor(self) -> Dict[str, Any]:
        """Body-spec document of this body."""
        return {
            "dim": self.d,
            "lambda": self.lam,
            "chart_center": "origin" if self.center is None else self.center.tolist(),
            "rep": self.support.describe(),
            "name": self.name,
        }


# ==================== Radial Function ====================

def _radial_newton(rep: SupportRep, u: np.ndarray, tol: Optional[float] = None,
                   max_iter: Optional[int] = None) -> np.ndarray:
    """
    rho(u) = min over v with u.v = 1 of H(v), H the homogeneous support extension.

    Seeds every query from the best direction of a coarse grid, then runs a
    damped Newton iteration on the affine plane u.v = 1.
    """
    tol = config.RADIAL_TOL if tol is None else tol
    max_iter = config.RADIAL_MAX_ITER if max_iter is None else max_iter
    n, d = u.shape
    if n == 0:
        return np.zeros(0)

    # coarse seeding
    cand = seed_nodes(d)
    h_cand = rep.values(cand)
    h_self = rep.values(u)
    v = u.copy()
    best = h_self.copy()
    for lo in range(0, n, 4096):
        hi = min(lo + 4096, n)
        dots = u[lo:hi] @ cand.T
        ratio = np.where(dots > 0.2, h_cand[None, :] / np.where(dots > 0.2, dots, 1.0), np.inf)
        j = np.argmin(ratio, axis=1)
        r = ratio[np.arange(hi - lo), j]
        better = r < best[lo:hi]
        idx = np.nonzero(better)[0] + lo
        v[idx] = cand[j[better]] / dots[better, j[better]][:, None]
        best[idx] = r[better]

    def objective(points: np.ndarray) -> np.ndarray:
        norm = np.linalg.norm(points, axis=1)
        return norm * rep.values(points / norm[:, None])

    f = objective(v)
    eye = np.eye(d)[None]
    uu = np.einsum("ni,nj->nij", u, u)
    proj = eye - uu
    done = np.zeros(n, dtype=bool)
    residual = np.full(n, np.inf)
    for _ in range(max_iter):
        active = np.nonzero(~done)[0]
        if active.size == 0:
            break
        va = v[active]
        norm = np.linalg.norm(va, axis=1)
        jet = rep.evaluate(va / norm[:, None])
        g = jet.grad
        ua = u[active]
        pg = g - np.einsum("ni,ni->n", g, ua)[:, None] * ua
        res = np.linalg.norm(pg, axis=1) / np.linalg.norm(g, axis=1)
        residual[active] = res
        converged = res <= tol
        done[active[converged]] = True
        keep = ~converged
        if not np.any(keep):
            break
        active, va, pg, ua = active[keep], va[keep], pg[keep], ua[keep]
        hess = jet.hess[keep] / norm[keep, None, None]
        pa = proj[active]
        system = pa @ hess @ pa + uu[active]
        step = -np.linalg.solve(system, pg[:, :, None])[:, :, 0]
        slope = np.einsum("ni,ni->n", pg, step)
        t = np.ones(active.size)
        accepted = np.zeros(active.size, dtype=bool)
        f_a = f[active]
        for _ in range(40):
            todo = np.nonzero(~accepted)[0]
            if todo.size == 0:
                break
            trial = va[todo] + t[todo, None] * step[todo]
            f_trial = objective(trial)
            ok = f_trial <= f_a[todo] + 1e-4 * t[todo] * slope[todo] + 1e-15 * np.abs(f_a[todo])
            hit = todo[ok]
            v[active[hit]] = trial[ok]
            f[active[hit]] = f_trial[ok]
            accepted[hit] = True
            t[todo[~ok]] *= 0.5
        # a step that cannot decrease H sits at rounding level
        tiny = np.linalg.norm(step, axis=1) * t <= 1e-15 * np.linalg.norm(va, axis=1)
        stalled = (~accepted | tiny) & (res[keep] <= 1e-7)
        done[active[stalled]] = True
    if not np.all(done):
        raise RadialError("radial refinement did not converge", float(np.max(residual[~done])))
    return objective(v)


def radial(body: ChartBody, u: np.ndarray) -> np.ndarray:
    """
    Chart radial function rho(u) = min over v with u.v > 0 of h(v) / (u.v).

    The spherical radial function is arctan_lambda(lam, rho).

    Raises:
        RadialError: If the refinement does not converge
    """
    return body.radial(u)


def spherical_radial(body: ChartBody, u: np.ndarray) -> np.ndarray:
    return arctan_lambda(body.lam, body.radial(u))


# ==================== Polar, Dual and Recentering ====================

def refit_bandwidth(rep: SupportRep) -> int:
    """Target bandwidth of a refit: twice the source, clamped per family."""
    factor = config.REFIT_BANDWIDTH_FACTOR
    if isinstance(rep, Fourier2D):
        return int(min(max(factor * rep.bandwidth, config.MIN_BANDWIDTH_2D), config.MAX_BANDWIDTH_2D))
    if isinstance(rep, Harmonic3D):
        return int(min(max(factor * rep.bandwidth, config.MIN_BANDWIDTH_3D), config.MAX_BANDWIDTH_3D))
    if isinstance(rep, Axisymmetric):
        return int(min(max(factor * rep.bandwidth, config.MIN_BANDWIDTH_AXIAL), 4 * config.MIN_BANDWIDTH_AXIAL))
    raise RepresentationError(f"{rep.kind} bodies are not refitted")


def _refit(rep: SupportRep, directions: np.ndarray, values: np.ndarray, bandwidth: int) -> Tuple[SupportRep, float]:
    fitted, residual = rep.refit(directions, values, bandwidth)
    if residual > config.FIT_TOLERANCE:
        raise FitError(residual, bandwidth)
    logger.debug("refit %s at bandwidth %d, residual %.3e", rep.kind, bandwidth, residual)
    return fitted, residual


def polar_body(body: ChartBody, bandwidth: Optional[int] = None) -> ChartBody:
    """
    Chart polar body K-bar° = {y : x.y <= 1 for x in K-bar}.

    Ellipsoids and caps use the closed form. Otherwise every boundary point
    x(v) of K-bar yields the polar support sample h°(x/|x|) = 1/|x|, and the
    samples are refitted into the same family.

    Raises:
        FitError: If the refit residual exceeds the tolerance
    """
    exact = body.support.exact_polar()
    if exact is not None:
        return body.with_support(exact)
    target = refit_bandwidth(body.support) if bandwidth is None else bandwidth
    samples = fit_nodes(body.d, target, body.support.is_zonal)
    x = body.jet(samples).grad
    r = np.linalg.norm(x, axis=1)
    fitted, residual = _refit(body.support, x / r[:, None], 1.0 / r, target)
    return body.with_support(fitted, fit_residual=body.fit_residual + residual)


def dual_body(body: ChartBody, bandwidth: Optional[int] = None) -> ChartBody:
    """
    Chart of the spherical dual K* in the same chart: -(1/lam) K-bar°.

    Caps map to the cap of radius pi/(2 sqrt(lam)) - alpha about the same center.

    Raises:
        DomainError: For lam = 0
    """
    if body.space.is_euclidean:
        raise DomainError("the dual body needs lambda > 0")
    rep = body.support
    if isinstance(rep, Cap):
        return body.with_support(Cap(body.space.max_radius - rep.alpha, rep.center, rep.lam))
    polar = polar_body(body, bandwidth)
    dual_rep = polar.support.negated()
    if body.lam != 1.0:
        dual_rep = dual_rep.scaled(1.0 / body.lam)
    return body.with_support(dual_rep, fit_residual=polar.fit_residual)


def _transport_ellipsoid(rep: Ellipsoid, space: SpaceForm, old: np.ndarray, new: np.ndarray) -> Ellipsoid:
    # The body is {Y : Y^t Q Y <= 0} for a quadratic cone; change frames and dehomogenize
    d = space.d
    s = space.sqrt_lam
    mu = s * rep.center
    b_inv = np.linalg.inv(space.lam * rep.matrix)
    quad = np.zeros((d + 1, d + 1))
    quad[:d, :d] = b_inv
    quad[:d, d] = quad[d, :d] = -b_inv @ mu
    quad[d, d] = mu @ b_inv @ mu - 1.0
    change = full_frame(new).T @ full_frame(old)
    moved = change @ quad @ change.T
    p, q, c = moved[:d, :d], moved[:d, d], moved[d, d]
    if np.min(np.linalg.eigvalsh(0.5 * (p + p.T))) <= 0.0:
        raise DomainError("body is not proper with respect to the new center")
    shift = np.linalg.solve(p, q)
    scale = q @ shift - c
    if scale <= 0.0:
        raise DomainError("new center is not interior to the body")
    return Ellipsoid(scale * np.linalg.inv(p) / space.lam, -shift / s)


def _in_axial_plane(point: np.ndarray) -> bool:
    return bool(np.all(np.abs(point[:-2]) <= 1e-13))


def recenter(body: ChartBody, new_center: np.ndarray, bandwidth: Optional[int] = None) -> ChartBody:
    """
    Re-express the body in the chart at another center.

    Caps and ellipsoids are transported exactly. Other representations map each
    supporting hyperplane of a dense sample through the sphere into the new
    chart and refit.

    Raises:
        DomainError: If the new center is not interior to the body
        FitError: If the refit residual exceeds the tolerance
    """
    space = body.space
    if space.is_euclidean:
        raise DomainError("recentering needs lambda > 0")
    old = body.center
    new = normalize(np.asarray(new_center, dtype=float))
    if new @ old <= 0.0:
        raise DomainError("new center is not interior to the body")
    c = gnomonic(space, old, new[None, :])[0]
    probe = audit_nodes(body.d, body.support.is_zonal and _in_axial_plane(new), 1, 1)
    if np.min(body.h(probe) - probe @ c) <= 0.0:
        raise DomainError("new center is not interior to the body")

    rep = body.support
    if isinstance(rep, Cap):
        cap_point = unproject(space, old, rep.center[None, :])
        return body.with_support(Cap(rep.alpha, gnomonic(space, new, cap_point)[0], rep.lam), center=new)
    if isinstance(rep, Ellipsoid):
        return body.with_support(_transport_ellipsoid(rep, space, old, new), center=new)
    if isinstance(rep, Axisymmetric) and not (_in_axial_plane(old) and _in_axial_plane(new)):
        raise RepresentationError("axisymmetric bodies can only be recentered along their axis")

    target = bandwidth or refit_bandwidth(rep)
    samples = fit_nodes(body.d, target, rep.is_zonal)
    h = body.h(samples)
    s = space.sqrt_lam
    # ambient normal of the great sphere through the supporting hyperplane
    normals = samples @ body.frame.T - (s * h)[:, None] * old[None, :]
    a = normals @ chart_frame(new)
    b = -(normals @ new)
    norm_a = np.linalg.norm(a, axis=1)
    fitted, residual = _refit(rep, a / norm_a[:, None], b / (norm_a * s), target)
    return body.with_support(fitted, fit_residual=body.fit_residual + residual, center=new)


def chart_point_of(body: ChartBody, point: np.ndarray) -> np.ndarray:
    """Chart coordinates in the body's chart of a model-sphere point."""
    return gnomonic(body.space, body.center, np.atleast_2d(point))[0]


def sphere_point_of(body: ChartBody, chart_point: np.ndarray) -> np.ndarray:
    """Model-sphere point of a chart point of the body's chart."""
    return unproject(body.space, body.center, np.atleast_2d(chart_point))[0]
