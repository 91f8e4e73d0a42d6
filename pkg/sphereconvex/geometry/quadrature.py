"""
Quadrature on the parameter sphere S^{d-1}.

Deterministic rules carry a coarser companion (nested where possible) whose
disagreement is the reported error bar. Quasi-random rules for d >= 4 report
a jackknife error instead.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import special, stats

from sphereconvex.errors import DomainError
from sphereconvex.models.schemas import FunctionalValue


def sphere_area(n: int) -> float:
    """omega_n, the surface area of the unit sphere S^n in R^{n+1}."""
    return 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)


def ball_volume(d: int) -> float:
    """kappa_d, the volume of the unit ball in R^d."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights on S^{dim-1}, summing to omega_{dim-1}."""

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    error_model: str
    degree: int
    rule_id: str
    coarse_weights: Optional[np.ndarray] = None
    companion: Optional["QuadratureRule"] = None
    zonal: bool = False
    blocks: int = 0

    @property
    def d_minus_1(self) -> int:
        return self.dim - 1

    @property
    def size(self) -> int:
        return self.nodes.shape[0]

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the node axis (pairwise summation)."""
        values = np.asarray(values, dtype=float)
        w = self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        return np.sum(w * values, axis=0)

    def symmetrize(self, moment: np.ndarray) -> np.ndarray:
        """
        Average a vector or matrix moment over rotations about the last axis.

        Zonal rules only sample one meridian, so vector and matrix integrals of
        a body of revolution must be symmetrized before use.
        """
        if not self.zonal:
            return moment
        moment = np.array(moment, dtype=float)
        d = self.dim
        if moment.ndim == 1:
            moment[: d - 1] = 0.0
            return moment
        out = np.zeros_like(moment)
        out[: d - 1, : d - 1] = np.trace(moment[: d - 1, : d - 1]) / (d - 1) * np.eye(d - 1)
        out[d - 1, d - 1] = moment[d - 1, d - 1]
        return out


def integrate_values(rule: QuadratureRule, fn: Callable[[QuadratureRule], np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrate node values produced by `fn(rule)`.

    Args:
        rule: Quadrature rule
        fn: Callable returning values at `rule.nodes` (leading axis = nodes)

    Returns:
        (integral, absolute error estimate)
    """
    values = fn(rule)
    value = rule.apply(values)
    if rule.coarse_weights is not None:
        w = rule.coarse_weights.reshape((-1,) + (1,) * (np.ndim(values) - 1))
        error = np.abs(value - np.sum(w * values, axis=0))
    elif rule.companion is not None:
        error = np.abs(value - rule.companion.apply(fn(rule.companion)))
    elif rule.blocks > 1:
        error = _jackknife(rule, values)
    else:
        error = np.zeros_like(value)
    return value, error


def _jackknife(rule: QuadratureRule, values: np.ndarray) -> np.ndarray:
    total = sphere_area(rule.dim - 1)
    groups = np.array_split(np.asarray(values, dtype=float), rule.blocks, axis=0)
    sums = np.array([g.sum(axis=0) for g in groups])
    counts = np.array([g.shape[0] for g in groups], dtype=float).reshape((-1,) + (1,) * (sums.ndim - 1))
    leave_out = (sums.sum(axis=0) - sums) / (counts.sum() - counts)
    spread = leave_out - leave_out.mean(axis=0)
    b = rule.blocks
    return total * np.sqrt((b - 1) / b * np.sum(spread ** 2, axis=0))


# ==================== Rules ====================

def _clenshaw_curtis(n: int) -> Tuple[np.ndarray, np.ndarray]:
    theta = math.pi * np.arange(n + 1) / n
    x = np.cos(theta)
    w = np.zeros(n + 1)
    inner = theta[1:n]
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n ** 2 - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k ** 2 - 1)
        v -= np.cos(n * inner) / (n ** 2 - 1)
    else:
        w[0] = w[n] = 1.0 / n ** 2
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * inner) / (4 * k ** 2 - 1)
    w[1:n] = 2.0 * v / n
    return x, w


@lru_cache(maxsize=64)
def circle_rule(n: int) -> QuadratureRule:
    """
    Uniform n-point rule on S^1, exact for trigonometric polynomials of degree < n.

    The every-other-node subrule is the nested companion.

    Raises:
        DomainError: If n < 8
    """
    if n < 8:
        raise DomainError(f"circle rule needs n >= 8, got {n}")
    theta = 2.0 * math.pi * np.arange(n) / n
    nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    weights = np.full(n, 2.0 * math.pi / n)
    coarse = None
    if n % 2 == 0:
        coarse = np.zeros(n)
        coarse[::2] = 4.0 * math.pi / n
    return QuadratureRule(2, nodes, weights, "spectral", n - 1, f"circle-{n}", coarse_weights=coarse)


def _product_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    z, wz = _clenshaw_curtis(n)
    phi = math.pi * np.arange(2 * n) / n
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    r = np.sqrt(np.clip(1.0 - zz ** 2, 0.0, None))
    nodes = np.stack([r * np.cos(pp), r * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    weights = np.outer(wz, np.full(2 * n, math.pi / n)).reshape(-1)
    return nodes, weights


@lru_cache(maxsize=64)
def s2_rule(n: int) -> QuadratureRule:
    """
    Clenshaw-Curtis in z times the 2n-point trapezoid in longitude on S^2.

    Exact for spherical polynomials of degree <= n. The rule with n/2 (every
    other latitude and longitude) is nested and serves as companion.
    """
    if n < 8 or n % 4 != 0:
        raise DomainError(f"S^2 product rule needs n >= 8 divisible by 4, got {n}")
    nodes, weights = _product_rule(n)
    _, w_half = _clenshaw_curtis(n // 2)
    coarse = np.zeros((n + 1, 2 * n))
    coarse[::2, ::2] = np.outer(w_half, np.full(n, 2.0 * math.pi / n))
    return QuadratureRule(3, nodes, weights, "product-cc", n, f"s2cc-{n}", coarse_weights=coarse.reshape(-1))


@lru_cache(maxsize=64)
def zonal_rule(dim: int, n: int, with_companion: bool = True) -> QuadratureRule:
    """
    Rule for integrands that depend only on the last coordinate, dim >= 3.

    Gauss-Jacobi in z = u_d with weight (1-z^2)^{(dim-3)/2}, times omega_{dim-2}.
    Nodes lie on the meridian spanned by e_1 and e_d.
    """
    if dim < 3:
        raise DomainError("zonal rules need dim >= 3")
    a = (dim - 3) / 2.0
    z, w = special.roots_jacobi(n, a, a)
    nodes = np.zeros((n, dim))
    nodes[:, 0] = np.sqrt(np.clip(1.0 - z ** 2, 0.0, None))
    nodes[:, -1] = z
    companion = zonal_rule(dim, max(n // 2, 4), False) if with_companion else None
    return QuadratureRule(dim, nodes, w * sphere_area(dim - 2), "zonal", 2 * n - 1,
                          f"zonal-{dim}-{n}", companion=companion, zonal=True)


@lru_cache(maxsize=64)
def quasi_random_rule(dim: int, log2_points: int, seed: int = 0) -> QuadratureRule:
    """Scrambled Sobol points pushed to S^{dim-1} through the normal quantile; equal weights."""
    sampler = stats.qmc.Sobol(d=dim, scramble=True, seed=np.random.Generator(np.random.Philox(seed)))
    points = sampler.random_base2(log2_points)
    gauss = stats.norm.ppf(np.clip(points, 1e-12, 1.0 - 1e-12))
    nodes = gauss / np.linalg.norm(gauss, axis=1, keepdims=True)
    count = nodes.shape[0]
    weights = np.full(count, sphere_area(dim - 1) / count)
    return QuadratureRule(dim, nodes, weights, f"monte-carlo(seed={seed}, N={count})", 0,
                          f"qmc-{dim}-{count}-{seed}", blocks=16)


def sphere_rule(level: int, dim: int = 3, seed: int = 0) -> QuadratureRule:
    """
    Rule on S^{dim-1} at a resolution level.

    dim = 2: circle rule with 64 * level nodes (degree 64 * level - 1).
    dim = 3: product rule with n = 8 * level (degree n).
    dim >= 4: quasi-random rule with 2^(9 + level) points.
    """
    if level < 1:
        raise DomainError("resolution level must be >= 1")
    if dim == 2:
        return circle_rule(64 * level)
    if dim == 3:
        return s2_rule(8 * level)
    return quasi_random_rule(dim, 9 + level, seed)


def rule_for(body, level: int) -> QuadratureRule:
    """Select the integration rule for a chart body at a resolution level."""
    d = body.space.d
    if d >= 3 and body.support.is_zonal:
        return zonal_rule(d, 16 * level)
    return sphere_rule(level, d)


def audit_nodes(dim: int, zonal: bool, level: int, density: int) -> np.ndarray:
    """Dense node set for the C2+ audit (`density` times the quadrature nodes)."""
    if dim >= 3 and zonal:
        return zonal_rule(dim, 16 * level * density, False).nodes
    if dim == 2:
        return circle_rule(64 * level * density).nodes
    if dim == 3:
        scale = int(round(math.sqrt(density)))
        return _product_rule(8 * level * scale)[0]
    return quasi_random_rule(dim, 9 + level + int(round(math.log2(density))), 0).nodes


def fit_nodes(dim: int, bandwidth: int, zonal: bool) -> np.ndarray:
    """Sample directions for a least-squares refit at the given bandwidth."""
    if dim == 2:
        count = max(8 * bandwidth, 512)
        theta = 2.0 * math.pi * (np.arange(count) + 0.5) / count
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if zonal:
        count = max(8 * bandwidth, 256)
        theta = math.pi * (np.arange(count) + 0.5) / count
        nodes = np.zeros((count, dim))
        nodes[:, 0] = np.sin(theta)
        nodes[:, -1] = np.cos(theta)
        return nodes
    if dim == 3:
        n = 4 * max(int(math.ceil(3 * bandwidth / 4)), 6)
        return _product_rule(n)[0]
    raise DomainError(f"no refit sampling for dimension {dim}")


@lru_cache(maxsize=16)
def seed_nodes(dim: int) -> np.ndarray:
    """Coarse direction set used to seed radial refinement."""
    if dim == 2:
        return circle_rule(64).nodes
    if dim == 3:
        return _product_rule(12)[0]
    return quasi_random_rule(dim, 10, 1).nodes


# ==================== Body Integrals ====================

def _with_fit_error(body, value: float, error: float) -> float:
    return float(error + abs(value) * body.fit_residual * (body.space.d + 1))


def integrate_boundary(body, integrand: Callable, rule: QuadratureRule,
                       formula_tag: str = "boundary integral") -> FunctionalValue:
    """
    Integrate f(x, n, H_e, h_x) over the chart boundary.

    The boundary is parametrized by its outer normal u; the Euclidean area
    element is det(support Hessian form) du = du / H_e.

    Args:
        body: ChartBody
        integrand: Vectorized f(x, n, H_e, h_x) -> values at the nodes
        rule: Quadrature rule on S^{d-1}
        formula_tag: Provenance tag

    Returns:
        FunctionalValue with quadrature and refit error folded in

    Raises:
        AuditError: If the support Hessian form is not positive definite at a node
    """
    def at_nodes(r: QuadratureRule) -> np.ndarray:
        data = body.boundary(r)
        return integrand(data.x, data.u, 1.0 / data.det, data.h) * data.det

    value, error = integrate_values(rule, at_nodes)
    value = float(value)
    return FunctionalValue(value=value, abs_error=_with_fit_error(body, value, float(error)),
                           formula_tag=formula_tag, rule_id=rule.rule_id)


def integrate_radial(body, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], rule: QuadratureRule,
                     formula_tag: str = "radial integral") -> FunctionalValue:
    """Integrate fn(rho(u), u) over S^{d-1}, with rho the chart radial function."""
    value, error = integrate_values(rule, lambda r: fn(body.radial_at(r), r.nodes))
    value = float(value)
    return FunctionalValue(value=value, abs_error=_with_fit_error(body, value, float(error)),
                           formula_tag=formula_tag, rule_id=rule.rule_id)


def integrate_interior(body, fn: Callable[[np.ndarray], np.ndarray], rule: QuadratureRule,
                       radial_nodes: int = 32, formula_tag: str = "interior integral") -> FunctionalValue:
    """
    Integrate fn(x) over the chart body in polar coordinates.

    The inner integral over [0, rho(u)] uses Gauss-Legendre with `radial_nodes`
    points; the outer one uses `rule`.
    """
    t, g = special.roots_legendre(radial_nodes)
    t = 0.5 * (t + 1.0)
    g = 0.5 * g
    d = body.space.d

    def inner(r: QuadratureRule) -> np.ndarray:
        rho = body.radial_at(r)
        radii = rho[:, None] * t[None, :]
        points = radii[:, :, None] * r.nodes[:, None, :]
        values = fn(points.reshape(-1, d)).reshape(radii.shape)
        return rho * np.sum(g[None, :] * radii ** (d - 1) * values, axis=1)

    value, error = integrate_values(rule, inner)
    value = float(value)
    return FunctionalValue(value=value, abs_error=_with_fit_error(body, value, float(error)),
                           formula_tag=formula_tag, rule_id=rule.rule_id)


def monte_carlo_volume(body, samples: int = 200_000, seed: int = 0) -> FunctionalValue:
    """
    lambda-volume by uniform sampling of the chart bounding box.

    Each sample inside the chart body contributes (1 + lam |x|^2)^{-(d+1)/2}.
    Uses a counter-based Philox stream, so the estimate depends only on `seed`.

    Returns:
        FunctionalValue with a one-sigma error bar
    """
    d = body.space.d
    lam = body.space.lam
    bound = body.properness_bound
    rng = np.random.Generator(np.random.Philox(seed))
    total = 0.0
    total_sq = 0.0
    chunk = 20_000
    drawn = 0
    while drawn < samples:
        m = min(chunk, samples - drawn)
        points = rng.uniform(-bound, bound, size=(m, d))
        r = np.linalg.norm(points, axis=1)
        inside = r <= body.radial(points / r[:, None])
        weight = np.where(inside, (1.0 + lam * r ** 2) ** (-(d + 1) / 2.0), 0.0)
        total += weight.sum()
        total_sq += (weight ** 2).sum()
        drawn += m
    box = (2.0 * bound) ** d
    mean = total / samples
    std = math.sqrt(max(total_sq / samples - mean ** 2, 0.0))
    return FunctionalValue(value=box * mean, abs_error=box * std / math.sqrt(samples),
                           formula_tag="monte-carlo chart volume", rule_id=f"mc-philox-{seed}-{samples}")
