"""
Support-function representations of chart bodies.

Every representation evaluates the 1-homogeneous extension H of the support
function h at unit directions u. The gradient of H at u is the boundary point
with outer normal u; the Hessian of H at u is tangential (u is in its kernel)
and restricted to u⊥ it equals the support Hessian form (spherical Hessian of h
plus h times identity).
"""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Any, ClassVar, Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import chebyshev
from scipy import linalg, special

from sphereconvex.errors import DomainError, RepresentationError, SpecError


@dataclass(frozen=True)
class SupportJet:
    """Support data at a batch of n unit directions in R^d."""
    h: np.ndarray      # (n,)
    grad: np.ndarray   # (n, d) boundary points x(u)
    hess: np.ndarray   # (n, d, d)


def as_directions(u: np.ndarray, dim: int) -> np.ndarray:
    """Coerce to an (n, dim) float array of directions."""
    arr = np.asarray(u, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DomainError(f"expected directions of shape (n, {dim}), got {arr.shape}")
    return arr


def normalize(v: np.ndarray) -> np.ndarray:
    """Row-normalize a batch of vectors."""
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def tangent_frames(u: np.ndarray) -> np.ndarray:
    """
    Orthonormal bases of the tangent spaces u⊥.

    Uses the Householder reflection that maps e_d to ±u; its remaining
    columns span u⊥.

    Args:
        u: (n, d) unit vectors

    Returns:
        (n, d, d-1) array whose columns are orthonormal and orthogonal to u
    """
    u = np.asarray(u, dtype=float)
    n, d = u.shape
    sign = np.where(u[:, -1] >= 0.0, 1.0, -1.0)
    w = u.copy()
    w[:, -1] += sign
    scale = 2.0 / np.einsum("ni,ni->n", w, w)
    eye = np.eye(d)[None, :, : d - 1]
    return eye - scale[:, None, None] * w[:, :, None] * w[:, None, : d - 1]


def tangential_form(jet: SupportJet, frames: np.ndarray) -> np.ndarray:
    """Support Hessian form T^t D^2H T in the given tangent frames, shape (n, d-1, d-1)."""
    return np.einsum("nia,nij,njb->nab", frames, jet.hess, frames)


def _relative_residual(fitted: np.ndarray, values: np.ndarray) -> float:
    return float(np.max(np.abs(fitted - values)) / np.max(np.abs(values)))


class SupportRep(ABC):
    """A smooth support function on S^{d-1}."""

    kind: ClassVar[str] = ""

    @property
    @abstractmethod
    def dim(self) -> int:
        """Chart dimension d."""

    @property
    def bandwidth(self) -> int:
        """Spectral bandwidth of the representation (0 for closed forms)."""
        return 0

    @property
    def is_zonal(self) -> bool:
        """True when h depends on u only through the last coordinate u_d."""
        return False

    @abstractmethod
    def evaluate(self, u: np.ndarray) -> SupportJet:
        """Evaluate H, grad H and D^2 H at unit directions u of shape (n, d)."""

    def values(self, u: np.ndarray) -> np.ndarray:
        """Support values only."""
        return self.evaluate(u).h

    @abstractmethod
    def negated(self) -> "SupportRep":
        """Representation of u -> h(-u) (the reflected body)."""

    @abstractmethod
    def scaled(self, factor: float) -> "SupportRep":
        """Representation of factor * h (the dilated body)."""

    @abstractmethod
    def to_parameters(self) -> Dict[str, Any]:
        """Parameters of the body-spec document."""

    def exact_polar(self) -> Optional["SupportRep"]:
        """Closed-form polar, if the family is closed under polarity."""
        return None

    def refit(self, directions: np.ndarray, values: np.ndarray, bandwidth: int) -> Tuple["SupportRep", float]:
        """
        Least-squares fit of sampled support values into this family.

        Args:
            directions: (n, d) unit directions
            values: (n,) support values
            bandwidth: Target bandwidth

        Returns:
            (fitted representation, max relative residual at the samples)
        """
        raise RepresentationError(f"{self.kind} bodies cannot be refitted")

    def describe(self) -> Dict[str, Any]:
        """Rep document {kind, parameters}."""
        return {"kind": self.kind, "parameters": self.to_parameters()}


# ==================== Closed Forms ====================

@dataclass(frozen=True, eq=False)
class Ellipsoid(SupportRep):
    """Ellipsoid {x : (x-m)^t A^{-1} (x-m) <= 1}, h(u) = m.u + sqrt(u^t A u)."""

    matrix: np.ndarray
    center: Optional[np.ndarray] = None

    kind: ClassVar[str] = "ellipsoid"

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise DomainError(f"ellipsoid matrix must be square of size >= 2, got {a.shape}")
        a = 0.5 * (a + a.T)
        if np.min(np.linalg.eigvalsh(a)) <= 0.0:
            raise DomainError("ellipsoid matrix must be positive definite")
        m = np.zeros(a.shape[0]) if self.center is None else np.array(self.center, dtype=float)
        if m.shape != (a.shape[0],):
            raise DomainError("ellipsoid center has the wrong dimension")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "center", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_zonal(self) -> bool:
        d = self.dim
        transverse = self.matrix[: d - 1, : d - 1]
        return (
            np.allclose(self.center[: d - 1], 0.0, atol=1e-15)
            and np.allclose(self.matrix[: d - 1, d - 1], 0.0, atol=1e-15)
            and np.allclose(transverse, transverse[0, 0] * np.eye(d - 1), atol=1e-15)
        )

    def evaluate(self, u: np.ndarray) -> SupportJet:
        u = as_directions(u, self.dim)
        au = u @ self.matrix
        q = np.sqrt(np.einsum("ni,ni->n", u, au))
        h = u @ self.center + q
        grad = self.center[None, :] + au / q[:, None]
        hess = self.matrix[None, :, :] / q[:, None, None] - np.einsum("ni,nj->nij", au, au) / q[:, None, None] ** 3
        return SupportJet(h, grad, hess)

    def values(self, u: np.ndarray) -> np.ndarray:
        u = as_directions(u, self.dim)
        return u @ self.center + np.sqrt(np.einsum("ni,ij,nj->n", u, self.matrix, u))

    def negated(self) -> "Ellipsoid":
        return Ellipsoid(self.matrix, -self.center)

    def scaled(self, factor: float) -> "Ellipsoid":
        return Ellipsoid(self.matrix * factor ** 2, self.center * factor)

    def exact_polar(self) -> "Ellipsoid":
        # Polar of an ellipsoid containing the origin is again an ellipsoid
        m = self.center
        n = self.matrix - np.outer(m, m)
        if np.min(np.linalg.eigvalsh(n)) <= 0.0:
            raise DomainError("origin is not interior to the ellipsoid")
        n_inv_m = np.linalg.solve(n, m)
        new_matrix = (1.0 + m @ n_inv_m) * np.linalg.inv(n)
        return Ellipsoid(new_matrix, -n_inv_m)

    def to_parameters(self) -> Dict[str, Any]:
        return {"matrix": self.matrix.tolist(), "center": self.center.tolist()}


def cap_to_ellipsoid(alpha: float, center: np.ndarray, lam: float) -> Ellipsoid:
    """
    Chart image of the geodesic ball of radius alpha whose center has chart
    coordinates `center`.

    For lam = 0 the chart image is the Euclidean ball itself. For lam > 0 the
    ball is the intersection of the model sphere with a quadratic cone, so its
    chart image is an ellipsoid.

    Raises:
        DomainError: If the ball leaves the open half-space of the chart center
    """
    c = np.asarray(center, dtype=float)
    d = c.shape[0]
    if lam == 0.0:
        return Ellipsoid(alpha ** 2 * np.eye(d), c)
    s = math.sqrt(lam)
    xi = s * c
    norm = math.sqrt(1.0 + xi @ xi)
    p_tan = xi / norm
    p_0 = 1.0 / norm
    cos2 = math.cos(s * alpha) ** 2
    m_form = cos2 * np.eye(d) - np.outer(p_tan, p_tan)
    if np.min(np.linalg.eigvalsh(m_form)) <= 0.0:
        raise DomainError("geodesic ball is not contained in the open half-space of the chart center")
    m_inv = np.linalg.inv(m_form)
    m_inv_p = m_inv @ p_tan
    c_0 = p_0 ** 2 - cos2 + p_0 ** 2 * (p_tan @ m_inv_p)
    return Ellipsoid(c_0 * m_inv / lam, p_0 * m_inv_p / s)


@dataclass(frozen=True, eq=False)
class Cap(SupportRep):
    """Geodesic ball of radius alpha centred at chart point `center`."""

    alpha: float
    center: np.ndarray
    lam: float

    kind: ClassVar[str] = "cap"

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        if c.ndim != 1 or c.shape[0] < 2:
            raise DomainError("cap center must be a chart point of dimension >= 2")
        if self.lam < 0.0:
            raise DomainError("lambda must be non-negative")
        upper = math.pi / (2.0 * math.sqrt(self.lam)) if self.lam > 0 else math.inf
        if not 0.0 < self.alpha < upper:
            raise DomainError(f"cap radius {self.alpha} outside (0, {upper})")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "alpha", float(self.alpha))

    @cached_property
    def ellipsoid(self) -> Ellipsoid:
        return cap_to_ellipsoid(self.alpha, self.center, self.lam)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def is_zonal(self) -> bool:
        return bool(np.all(self.center == 0.0))

    def evaluate(self, u: np.ndarray) -> SupportJet:
        return self.ellipsoid.evaluate(u)

    def values(self, u: np.ndarray) -> np.ndarray:
        return self.ellipsoid.values(u)

    def negated(self) -> "Cap":
        return Cap(self.alpha, -self.center, self.lam)

    def scaled(self, factor: float) -> Ellipsoid:
        return self.ellipsoid.scaled(factor)

    def exact_polar(self) -> Ellipsoid:
        return self.ellipsoid.exact_polar()

    def to_parameters(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "center": self.center.tolist()}


# ==================== Spectral Families ====================

@dataclass(frozen=True, eq=False)
class Fourier2D(SupportRep):
    """Planar support function h(theta) = sum a_k cos(k theta) + b_k sin(k theta)."""

    cos_coeffs: np.ndarray
    sin_coeffs: Optional[np.ndarray] = None

    kind: ClassVar[str] = "fourier2d"

    def __post_init__(self):
        a = np.array(self.cos_coeffs, dtype=float)
        b = np.zeros_like(a) if self.sin_coeffs is None else np.array(self.sin_coeffs, dtype=float)
        if a.ndim != 1 or a.shape != b.shape or a.shape[0] < 1:
            raise DomainError("fourier2d needs cos and sin coefficient lists of equal length")
        b = b.copy()
        b[0] = 0.0
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def dim(self) -> int:
        return 2

    @property
    def bandwidth(self) -> int:
        return self.cos_coeffs.shape[0] - 1

    def profile(self, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """h, h' and h'' as functions of the normal angle."""
        k = np.arange(self.bandwidth + 1)
        kt = np.outer(theta, k)
        c, s = np.cos(kt), np.sin(kt)
        a, b = self.cos_coeffs, self.sin_coeffs
        h = c @ a + s @ b
        h1 = (c * k) @ b - (s * k) @ a
        h2 = -(c * k ** 2) @ a - (s * k ** 2) @ b
        return h, h1, h2

    def evaluate(self, u: np.ndarray) -> SupportJet:
        u = as_directions(u, 2)
        theta = np.arctan2(u[:, 1], u[:, 0])
        h, h1, h2 = self.profile(theta)
        t = np.stack([-u[:, 1], u[:, 0]], axis=1)
        grad = h[:, None] * u + h1[:, None] * t
        hess = (h + h2)[:, None, None] * np.einsum("ni,nj->nij", t, t)
        return SupportJet(h, grad, hess)

    def values(self, u: np.ndarray) -> np.ndarray:
        u = as_directions(u, 2)
        return self.profile(np.arctan2(u[:, 1], u[:, 0]))[0]

    def negated(self) -> "Fourier2D":
        sign = (-1.0) ** np.arange(self.bandwidth + 1)
        return Fourier2D(self.cos_coeffs * sign, self.sin_coeffs * sign)

    def scaled(self, factor: float) -> "Fourier2D":
        return Fourier2D(self.cos_coeffs * factor, self.sin_coeffs * factor)

    @staticmethod
    def fit(directions: np.ndarray, values: np.ndarray, bandwidth: int) -> Tuple["Fourier2D", float]:
        """Least-squares Fourier fit of sampled support values."""
        theta = np.arctan2(directions[:, 1], directions[:, 0])
        k = np.arange(bandwidth + 1)
        kt = np.outer(theta, k)
        design = np.hstack([np.cos(kt), np.sin(kt[:, 1:])])
        coeffs, *_ = linalg.lstsq(design, values)
        a = coeffs[: bandwidth + 1]
        b = np.concatenate([[0.0], coeffs[bandwidth + 1:]])
        return Fourier2D(a, b), _relative_residual(design @ coeffs, values)

    def refit(self, directions, values, bandwidth):
        return Fourier2D.fit(directions, values, bandwidth)

    def to_parameters(self) -> Dict[str, Any]:
        return {"cos": self.cos_coeffs.tolist(), "sin": self.sin_coeffs.tolist()}


@dataclass(frozen=True, eq=False)
class Axisymmetric(SupportRep):
    """
    Body of revolution about the last chart axis.

    h(u) = phi(u_d) with phi a Chebyshev series on [-1, 1]; the polar-angle
    profile is h(theta) = phi(cos theta).
    """

    coefficients: np.ndarray
    dimension: int

    kind: ClassVar[str] = "axisymmetric"

    def __post_init__(self):
        a = np.array(self.coefficients, dtype=float)
        if a.ndim != 1 or a.shape[0] < 1:
            raise DomainError("axisymmetric needs a non-empty coefficient list")
        if self.dimension < 2:
            raise DomainError("dimension must be >= 2")
        object.__setattr__(self, "coefficients", a)

    @property
    def dim(self) -> int:
        return self.dimension

    @property
    def bandwidth(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def is_zonal(self) -> bool:
        return True

    @cached_property
    def _derivatives(self) -> Tuple[np.ndarray, np.ndarray]:
        d1 = chebyshev.chebder(self.coefficients) if self.bandwidth >= 1 else np.zeros(1)
        d2 = chebyshev.chebder(d1) if d1.shape[0] >= 2 else np.zeros(1)
        return d1, d2

    def evaluate(self, u: np.ndarray) -> SupportJet:
        u = as_directions(u, self.dim)
        z = np.clip(u[:, -1], -1.0, 1.0)
        d1, d2 = self._derivatives
        phi = chebyshev.chebval(z, self.coefficients)
        phi1 = chebyshev.chebval(z, d1)
        phi2 = chebyshev.chebval(z, d2)
        axis = np.zeros(self.dim)
        axis[-1] = 1.0
        w = axis[None, :] - z[:, None] * u
        grad = phi[:, None] * u + phi1[:, None] * w
        proj = np.eye(self.dim)[None] - np.einsum("ni,nj->nij", u, u)
        hess = (phi - z * phi1)[:, None, None] * proj + phi2[:, None, None] * np.einsum("ni,nj->nij", w, w)
        return SupportJet(phi, grad, hess)

    def values(self, u: np.ndarray) -> np.ndarray:
        u = as_directions(u, self.dim)
        return chebyshev.chebval(np.clip(u[:, -1], -1.0, 1.0), self.coefficients)

    def negated(self) -> "Axisymmetric":
        sign = (-1.0) ** np.arange(self.bandwidth + 1)
        return Axisymmetric(self.coefficients * sign, self.dimension)

    def scaled(self, factor: float) -> "Axisymmetric":
        return Axisymmetric(self.coefficients * factor, self.dimension)

    @staticmethod
    def fit(directions: np.ndarray, values: np.ndarray, bandwidth: int, dimension: int) -> Tuple["Axisymmetric", float]:
        """Least-squares Chebyshev fit in the axial coordinate."""
        design = chebyshev.chebvander(np.clip(directions[:, -1], -1.0, 1.0), bandwidth)
        coeffs, *_ = linalg.lstsq(design, values)
        return Axisymmetric(coeffs, dimension), _relative_residual(design @ coeffs, values)

    def refit(self, directions, values, bandwidth):
        return Axisymmetric.fit(directions, values, bandwidth, self.dimension)

    def to_parameters(self) -> Dict[str, Any]:
        return {"coefficients": self.coefficients.tolist()}


# ==================== Spherical Harmonics ====================
# Real orthonormal harmonics without the Condon-Shortley phase, ordered
# (l, m = -l..l). Values and fits use scipy's sph_harm; the jet uses the same
# harmonics as homogeneous Cartesian polynomials {(i, j, k): c} for x^i y^j z^k,
# whose ambient derivatives stay regular at the poles.

Poly = Dict[Tuple[int, int, int], float]


def _poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for (a0, a1, a2), ca in p.items():
        for (b0, b1, b2), cb in q.items():
            key = (a0 + b0, a1 + b1, a2 + b2)
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def _poly_add(p: Poly, q: Poly, scale: float = 1.0) -> Poly:
    out = dict(p)
    for key, c in q.items():
        out[key] = out.get(key, 0.0) + scale * c
    return out


def _poly_diff(p: Poly, axis: int) -> Poly:
    out: Poly = {}
    for exps, c in p.items():
        if exps[axis] == 0:
            continue
        key = list(exps)
        key[axis] -= 1
        out[tuple(key)] = out.get(tuple(key), 0.0) + c * exps[axis]
    return out


@lru_cache(maxsize=None)
def _harmonic_degree(l: int) -> Tuple[Poly, ...]:
    """The 2l+1 real orthonormal harmonics of degree l, ordered m = -l..l."""
    r2: Poly = {(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0}
    norm = math.sqrt((2 * l + 1) / (4.0 * math.pi))
    cos_part: Dict[int, Poly] = {}
    sin_part: Dict[int, Poly] = {}
    for m in range(l + 1):
        # Re and Im of (x + i y)^m
        a_m: Poly = {}
        b_m: Poly = {}
        for p in range(m + 1):
            coef = math.comb(m, p)
            q = m - p
            phase = q % 4
            if phase == 0:
                a_m[(p, q, 0)] = coef
            elif phase == 1:
                b_m[(p, q, 0)] = coef
            elif phase == 2:
                a_m[(p, q, 0)] = -coef
            else:
                b_m[(p, q, 0)] = -coef
        pi_lm: Poly = {}
        r2k: Poly = {(0, 0, 0): 1.0}
        for k in range((l - m) // 2 + 1):
            coef = ((-1) ** k * 2.0 ** (-l) * math.comb(l, k) * math.comb(2 * l - 2 * k, l)
                    * math.factorial(l - 2 * k) / math.factorial(l - 2 * k - m))
            term = _poly_mul(r2k, {(0, 0, l - 2 * k - m): coef})
            pi_lm = _poly_add(pi_lm, term)
            r2k = _poly_mul(r2k, r2)
        ratio = math.factorial(l - m) / math.factorial(l + m)
        c_norm = norm * math.sqrt((1.0 if m == 0 else 2.0) * ratio)
        cos_part[m] = {key: c_norm * c for key, c in _poly_mul(pi_lm, a_m).items()}
        if m > 0:
            s_norm = norm * math.sqrt(2.0 * ratio)
            sin_part[m] = {key: s_norm * c for key, c in _poly_mul(pi_lm, b_m).items()}
    ordered = [sin_part[-m] for m in range(-l, 0)] + [cos_part[m] for m in range(l + 1)]
    return tuple(ordered)


@lru_cache(maxsize=None)
def _monomials(degree: int) -> Tuple[np.ndarray, Dict[Tuple[int, int, int], int]]:
    exps = [(i, j, t - i - j) for t in range(degree + 1) for i in range(t + 1) for j in range(t - i + 1)]
    return np.array(exps, dtype=int), {e: n for n, e in enumerate(exps)}


def _monomial_table(u: np.ndarray, degree: int) -> np.ndarray:
    """Values of all monomials of total degree <= degree at u, shape (n, n_monomials)."""
    exps, _ = _monomials(degree)
    powers = u[:, :, None] ** np.arange(degree + 1)[None, None, :]
    return powers[:, 0, exps[:, 0]] * powers[:, 1, exps[:, 1]] * powers[:, 2, exps[:, 2]]


def _coefficient_rows(polys: List[Poly], degree: int) -> np.ndarray:
    _, index = _monomials(degree)
    rows = np.zeros((len(polys), len(index)))
    for r, poly in enumerate(polys):
        for key, c in poly.items():
            rows[r, index[key]] += c
    return rows


def harmonic_basis(u: np.ndarray, bandwidth: int) -> np.ndarray:
    """Real orthonormal spherical harmonics up to `bandwidth` at unit u, shape (n, (L+1)^2)."""
    u = as_directions(u, 3)
    polar = np.arccos(np.clip(u[:, 2], -1.0, 1.0))
    azimuth = np.arctan2(u[:, 1], u[:, 0])
    degrees = np.array([l for l in range(bandwidth + 1) for m in range(-l, l + 1)])
    orders = np.array([m for l in range(bandwidth + 1) for m in range(-l, l + 1)])
    # scipy argument order: (order, degree, azimuth, polar)
    complex_y = special.sph_harm(np.abs(orders)[None, :], degrees[None, :], azimuth[:, None], polar[:, None])
    phase = np.where(orders % 2 == 0, 1.0, -1.0) * np.where(orders == 0, 1.0, math.sqrt(2.0))
    return phase[None, :] * np.where(orders[None, :] < 0, complex_y.imag, complex_y.real)


_CHUNK = 8192


@dataclass(frozen=True, eq=False)
class Harmonic3D(SupportRep):
    """Support function on S^2 as a real spherical-harmonic series, ordered (l, m = -l..l)."""

    coefficients: np.ndarray

    kind: ClassVar[str] = "harmonic3d"

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        bandwidth = int(round(math.sqrt(c.shape[0]))) - 1 if c.ndim == 1 else -1
        if bandwidth < 0 or (bandwidth + 1) ** 2 != c.shape[0]:
            raise DomainError("harmonic3d needs (L+1)^2 coefficients")
        object.__setattr__(self, "coefficients", c)

    @property
    def dim(self) -> int:
        return 3

    @property
    def bandwidth(self) -> int:
        return int(round(math.sqrt(self.coefficients.shape[0]))) - 1

    @property
    def is_zonal(self) -> bool:
        mask = np.array([m != 0 for l in range(self.bandwidth + 1) for m in range(-l, l + 1)])
        return bool(np.all(self.coefficients[mask] == 0.0))

    def degree_of(self) -> np.ndarray:
        return np.array([l for l in range(self.bandwidth + 1) for _ in range(2 * l + 1)])

    @cached_property
    def _derivative_rows(self) -> np.ndarray:
        # Per degree: P, dP (3), d2P (6 upper-triangular)
        polys: List[Poly] = []
        start = 0
        for l in range(self.bandwidth + 1):
            p_l: Poly = {}
            for m, y in enumerate(_harmonic_degree(l)):
                p_l = _poly_add(p_l, y, self.coefficients[start + m])
            start += 2 * l + 1
            grads = [_poly_diff(p_l, a) for a in range(3)]
            hessians = [_poly_diff(grads[a], b) for a in range(3) for b in range(a, 3)]
            polys.extend([p_l] + grads + hessians)
        return _coefficient_rows(polys, self.bandwidth)

    def evaluate(self, u: np.ndarray) -> SupportJet:
        u = as_directions(u, 3)
        n = u.shape[0]
        h = np.empty(n)
        grad = np.empty((n, 3))
        hess = np.empty((n, 3, 3))
        for lo in range(0, n, _CHUNK):
            hi = min(lo + _CHUNK, n)
            jet = self._evaluate_chunk(u[lo:hi])
            h[lo:hi], grad[lo:hi], hess[lo:hi] = jet
        return SupportJet(h, grad, hess)

    def _evaluate_chunk(self, u: np.ndarray):
        table = _monomial_table(u, self.bandwidth) @ self._derivative_rows.T
        n = u.shape[0]
        eye = np.eye(3)[None]
        uu = np.einsum("ni,nj->nij", u, u)
        h = np.zeros(n)
        grad = np.zeros((n, 3))
        hess = np.zeros((n, 3, 3))
        upper = [(a, b) for a in range(3) for b in range(a, 3)]
        for l in range(self.bandwidth + 1):
            block = table[:, 10 * l: 10 * (l + 1)]
            p = block[:, 0]
            dp = block[:, 1:4]
            d2p = np.empty((n, 3, 3))
            for col, (a, b) in enumerate(upper):
                d2p[:, a, b] = d2p[:, b, a] = block[:, 4 + col]
            # H = sum_l |x|^{1-l} P_l evaluated on |x| = 1
            s = 1.0 - l
            h += p
            grad += s * p[:, None] * u + dp
            mixed = np.einsum("ni,nj->nij", u, dp)
            hess += (s * (p[:, None, None] * eye + mixed + mixed.transpose(0, 2, 1))
                     + s * (s - 2.0) * p[:, None, None] * uu + d2p)
        return h, grad, hess

    def values(self, u: np.ndarray) -> np.ndarray:
        return harmonic_basis(u, self.bandwidth) @ self.coefficients

    def negated(self) -> "Harmonic3D":
        return Harmonic3D(self.coefficients * (-1.0) ** self.degree_of())

    def scaled(self, factor: float) -> "Harmonic3D":
        return Harmonic3D(self.coefficients * factor)

    @staticmethod
    def fit(directions: np.ndarray, values: np.ndarray, bandwidth: int) -> Tuple["Harmonic3D", float]:
        """Least-squares spherical-harmonic fit of sampled support values."""
        design = harmonic_basis(directions, bandwidth)
        coeffs, *_ = linalg.lstsq(design, values)
        return Harmonic3D(coeffs), _relative_residual(design @ coeffs, values)

    def refit(self, directions, values, bandwidth):
        return Harmonic3D.fit(directions, values, bandwidth)

    def to_parameters(self) -> Dict[str, Any]:
        return {"coefficients": self.coefficients.tolist()}


# ==================== Construction ====================

def build_rep(kind: str, parameters: Dict[str, Any], dim: int, lam: float) -> SupportRep:
    """
    Build a representation from body-spec parameters.

    Args:
        kind: Representation kind
        parameters: Kind-specific parameters
        dim: Chart dimension d
        lam: Curvature (used by caps)

    Returns:
        The representation

    Raises:
        SpecError: On missing or malformed parameters (field path attached)
    """
    try:
        if kind == Cap.kind:
            center = parameters.get("center") or [0.0] * dim
            return Cap(float(parameters["alpha"]), np.asarray(center, dtype=float), lam)
        if kind == Ellipsoid.kind:
            if "semi_axes" in parameters:
                matrix = np.diag(np.asarray(parameters["semi_axes"], dtype=float) ** 2)
            else:
                matrix = np.asarray(parameters["matrix"], dtype=float)
            return Ellipsoid(matrix, parameters.get("center"))
        if kind == Axisymmetric.kind:
            return Axisymmetric(np.asarray(parameters["coefficients"], dtype=float), dim)
        if kind == Fourier2D.kind:
            return Fourier2D(np.asarray(parameters["cos"], dtype=float), parameters.get("sin"))
        if kind == Harmonic3D.kind:
            return Harmonic3D(np.asarray(parameters["coefficients"], dtype=float))
    except KeyError as exc:
        raise SpecError("missing parameter", field=f"rep.parameters.{exc.args[0]}") from exc
    except DomainError as exc:
        raise SpecError(str(exc), field="rep.parameters") from exc
    raise SpecError(f"unknown representation kind '{kind}'", field="rep.kind")
