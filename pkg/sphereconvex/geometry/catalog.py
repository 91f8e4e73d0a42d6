"""
The named set of functionals reported by `compute`.
"""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

from sphereconvex.errors import SphereConvexError
from sphereconvex.geometry.centers import ghs_center
from sphereconvex.geometry.chart_core import ChartBody
from sphereconvex.geometry.functionals import (
    PLike,
    as_p_lambda_o,
    dual_perimeter_lambda,
    entropy_lambda_families,
    entropy_spherical,
    fv_const,
    omega_p_lambda,
    parse_p,
    perimeter_lambda,
    radii,
    volume_lambda,
)
from sphereconvex.geometry.stability import stability_quantities
from sphereconvex.models.schemas import FunctionalValue

logger = logging.getLogger(__name__)


def _label(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


def compute_functionals(body: ChartBody, p_list: Optional[Sequence[PLike]] = None
                        ) -> Tuple[Dict[str, FunctionalValue], List[str]]:
    """
    Compute every functional that applies to the body.

    Groups that do not apply (P* at lam = 0, E^s and the stability bundle
    off the unit sphere) or that fail numerically are left out and their
    reason goes to the error list.

    Returns:
        (values by name, errors)
    """
    p_values = [parse_p(p) for p in (p_list or [1.0])]
    values: Dict[str, FunctionalValue] = {}
    errors: List[str] = []

    def group(name: str, fn) -> None:
        try:
            values.update(fn())
        except SphereConvexError as exc:
            logger.info("[compute] %s unavailable: %s", name, exc)
            errors.append(f"{name}: {exc}")

    def basics() -> Dict[str, FunctionalValue]:
        alpha_k, alpha_p = radii(body)
        return {"vol": volume_lambda(body), "P": perimeter_lambda(body), "alpha_K": alpha_k, "alpha_P": alpha_p}

    def lp_family() -> Dict[str, FunctionalValue]:
        found = {}
        for p in p_values:
            found[f"Omega_{_label(p)}"] = omega_p_lambda(body, p)
            found[f"as_{_label(p)}"] = as_p_lambda_o(body, p)
        return found

    def entropies() -> Dict[str, FunctionalValue]:
        return {"E_C^lambda": entropy_lambda_families(body, "E_C^lambda"),
                "E_PW^lambda,o": entropy_lambda_families(body, "E_PW^lambda,o")}

    group("volume and perimeter", basics)
    group("L_p family", lp_family)
    group("lambda entropies", entropies)
    if body.space.is_euclidean:
        errors.append("P*, GHS residual: need lambda > 0")
    else:
        group("dual perimeter", lambda: {"P*": dual_perimeter_lambda(body)})
        group("GHS center", lambda: {"GHS residual": fv_const(ghs_center(body).residual, "GHS centroid residual")})
    if body.lam == 1.0:
        group("spherical entropy", lambda: {"E^s": entropy_spherical(body).E_s})
        group("stability bundle", lambda: _stability_values(body))
    else:
        errors.append("E^s, stability bundle: need lambda = 1")
    return values, errors


def _stability_values(body: ChartBody) -> Dict[str, FunctionalValue]:
    bundle = stability_quantities(body)
    return {
        "stability.Delta_2": bundle.delta2,
        "stability.Delta": bundle.delta_sym,
        "stability.chart_volume_ratio": bundle.chart_volume_ratio,
        "stability.eps_dual": bundle.deficit_dual_volume,
        "stability.eps_float": bundle.deficit_floating,
        "stability.beta": fv_const(bundle.beta, "beta"),
        "stability.gamma": fv_const(bundle.gamma, "gamma"),
        "stability.tau": fv_const(bundle.tau, "tau"),
    }
