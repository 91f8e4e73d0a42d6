"""
Loader for body, family and run-config documents.

Loaders never raise on bad input: they return the parsed document together
with a list of problems (each prefixed by the offending field path), so the
CLI can print every problem at once.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from sphereconvex import config
from sphereconvex.errors import SphereConvexError
from sphereconvex.geometry.chart_core import ChartBody, SpaceForm
from sphereconvex.geometry.support import build_rep
from sphereconvex.models.schemas import BodySpec, FamilySpec, RunConfig

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)
PathLike = Union[str, Path]


def _field_errors(exc: ValidationError) -> List[str]:
    return [f"{'.'.join(str(p) for p in err['loc']) or '<document>'}: {err['msg']}" for err in exc.errors()]


class SpecLoader:
    """Parses and validates the structured-text documents of the command line."""

    @staticmethod
    def read_json(path: PathLike) -> Tuple[Optional[Dict[str, Any]], List[str]]:
        """
        Read a JSON object from disk.

        Returns:
            (data, errors); data is None when the file is missing or malformed
        """
        path = Path(path)
        if not path.exists():
            return None, [f"{path}: file not found"]
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (json.JSONDecodeError, IOError) as e:
            return None, [f"{path}: {e}"]
        if not isinstance(data, dict):
            return None, [f"{path}: expected a JSON object"]
        return data, []

    @staticmethod
    def parse(model: Type[Model], data: Dict[str, Any]) -> Tuple[Optional[Model], List[str]]:
        try:
            return model.model_validate(data), []
        except ValidationError as exc:
            return None, _field_errors(exc)

    @classmethod
    def load(cls, model: Type[Model], path: PathLike) -> Tuple[Optional[Model], List[str]]:
        data, errors = cls.read_json(path)
        if data is None:
            return None, errors
        return cls.parse(model, data)

    @classmethod
    def load_body_spec(cls, path: PathLike) -> Tuple[Optional[BodySpec], List[str]]:
        return cls.load(BodySpec, path)

    @classmethod
    def load_family_spec(cls, path: PathLike) -> Tuple[Optional[FamilySpec], List[str]]:
        return cls.load(FamilySpec, path)

    @classmethod
    def load_run_config(cls, path: PathLike) -> Tuple[Optional[RunConfig], List[str]]:
        return cls.load(RunConfig, path)

    @staticmethod
    def body_from_spec(spec: BodySpec, level: Optional[int] = None) -> ChartBody:
        """
        Build and audit the chart body of a body-spec document.

        Raises:
            SpecError: On malformed representation parameters
            AuditError: If the body fails the C2+ or properness audit
            DomainError: If the center and curvature do not fit together
        """
        level = config.DEFAULT_RESOLUTION if level is None else level
        space = SpaceForm(spec.dim, spec.lam)
        rep = build_rep(spec.rep.kind.value, spec.rep.parameters, spec.dim, spec.lam)
        center = None if spec.chart_center == "origin" else np.asarray(spec.chart_center, dtype=float)
        return ChartBody(space, rep, center=center, properness_bound=spec.properness_bound,
                         name=spec.name, level=level)

    @classmethod
    def validate_body(cls, data: Dict[str, Any], level: Optional[int] = None) -> Dict[str, Any]:
        """
        Validate a body document and return a validation report.

        Returns:
            Dict containing:
                - valid: bool - Overall validation status
                - errors: List[str] - Problems found, with field paths
                - warnings: List[str]
                - body: ChartBody or None
        """
        warnings: List[str] = []
        spec, errors = cls.parse(BodySpec, data)
        body = None
        if spec is not None:
            if spec.lam == 0.0 and spec.chart_center != "origin":
                errors.append("chart_center: lambda = 0 bodies use the origin chart")
            else:
                try:
                    body = cls.body_from_spec(spec, level)
                except SphereConvexError as exc:
                    errors.append(str(exc))
            if spec.name is None:
                warnings.append("name: not set, reports use the representation kind")
        return {"valid": not errors, "errors": errors, "warnings": warnings, "body": body}

    @classmethod
    def load_body(cls, path: PathLike, level: Optional[int] = None) -> Tuple[Optional[ChartBody], List[str]]:
        """
        Read, validate and build a body from a body-spec file.

        Returns:
            (body, errors)
        """
        data, errors = cls.read_json(path)
        if data is None:
            return None, errors
        report = cls.validate_body(data, level)
        for warning in report["warnings"]:
            logger.debug("[SpecLoader] %s: %s", path, warning)
        return report["body"], report["errors"]
