"""
Geometry of chart bodies: representations, quadrature, curvature,
functionals, centers and stability quantities.
"""
from .chart_core import ChartBody, SpaceForm, dual_body, polar_body, recenter
from .quadrature import QuadratureRule, rule_for, sphere_rule
from .functionals import (
    as_p_lambda_o,
    entropy_lambda_families,
    entropy_spherical,
    omega_p_lambda,
    perimeter_lambda,
    volume_lambda,
)
from .centers import ghs_center, santalo_chart
from .stability import stability_quantities
from .catalog import compute_functionals

__all__ = [
    'ChartBody',
    'SpaceForm',
    'dual_body',
    'polar_body',
    'recenter',
    'QuadratureRule',
    'rule_for',
    'sphere_rule',
    'as_p_lambda_o',
    'entropy_lambda_families',
    'entropy_spherical',
    'omega_p_lambda',
    'perimeter_lambda',
    'volume_lambda',
    'ghs_center',
    'santalo_chart',
    'stability_quantities',
    'compute_functionals',
]
