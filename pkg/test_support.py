"""
Tests for the support-function representations.
"""
import math

import numpy as np
import pytest

from sphereconvex.geometry.quadrature import s2_rule
from sphereconvex.geometry.support import Fourier2D, Harmonic3D, harmonic_basis, normalize


def _directions(count: int, seed: int = 11) -> np.ndarray:
    u = normalize(np.random.default_rng(seed).normal(size=(count, 3)))
    return np.vstack([u, np.eye(3), -np.eye(3)])


def test_low_degree_harmonics():
    """Test Y_00 and the degree-one harmonics against their closed forms."""
    c0 = 1.0 / math.sqrt(4.0 * math.pi)
    c1 = math.sqrt(3.0 / (4.0 * math.pi))
    basis = harmonic_basis(np.eye(3), 1)
    # columns: (0, 0), (1, -1), (1, 0), (1, 1)
    np.testing.assert_allclose(basis[:, 0], c0, atol=1e-14)
    np.testing.assert_allclose(basis[:, 1], [0.0, c1, 0.0], atol=1e-14)
    np.testing.assert_allclose(basis[:, 2], [0.0, 0.0, c1], atol=1e-14)
    np.testing.assert_allclose(basis[:, 3], [c1, 0.0, 0.0], atol=1e-14)


def test_harmonic_basis_is_orthonormal():
    """Test the Gram matrix of the basis on an exact product rule."""
    rule = s2_rule(32)
    basis = harmonic_basis(rule.nodes, 6)
    gram = basis.T @ (rule.weights[:, None] * basis)
    np.testing.assert_allclose(gram, np.eye(49), atol=1e-12)


@pytest.mark.parametrize("bandwidth", [2, 5, 9])
def test_harmonic_values_agree_with_jet(bandwidth):
    """Test the scipy basis and the Cartesian jet describe the same function, poles included."""
    coeffs = np.random.default_rng(bandwidth).normal(scale=0.05, size=(bandwidth + 1) ** 2)
    coeffs[0] = 2.0
    rep = Harmonic3D(coeffs)
    u = _directions(200)
    np.testing.assert_allclose(rep.values(u), rep.evaluate(u).h, atol=1e-11)


def test_harmonic_jet_gradient_is_boundary_point():
    """Test grad H against central differences of the homogeneous extension."""
    coeffs = np.zeros(16)
    coeffs[0], coeffs[6], coeffs[11] = 2.0, 0.05, -0.03
    rep = Harmonic3D(coeffs)
    u = _directions(20)
    step = 1e-6
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = step

        def extension(x):
            r = np.linalg.norm(x, axis=1)
            return r * rep.values(x / r[:, None])

        numeric = (extension(u + e) - extension(u - e)) / (2.0 * step)
        np.testing.assert_allclose(rep.evaluate(u).grad[:, axis], numeric, atol=1e-7)


def test_harmonic_fit_recovers_coefficients():
    """Test the least-squares fit on samples of a known series."""
    coeffs = np.random.default_rng(5).normal(scale=0.05, size=25)
    coeffs[0] = 2.0
    u = _directions(400, seed=2)
    fitted, residual = Harmonic3D.fit(u, Harmonic3D(coeffs).values(u), 4)
    np.testing.assert_allclose(fitted.coefficients, coeffs, atol=1e-10)
    assert residual < 1e-12


def test_fourier_fit_recovers_coefficients():
    """Test the planar Fourier fit."""
    rep = Fourier2D([0.6, 0.0, 0.04, 0.01], [0.0, 0.03, 0.0, -0.01])
    theta = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    u = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    fitted, residual = Fourier2D.fit(u, rep.values(u), 3)
    np.testing.assert_allclose(fitted.values(u), rep.values(u), atol=1e-12)
    assert residual < 1e-12
