"""
Pydantic models for documents, results and API request/response bodies.
"""
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = "1.0"

PValue = Union[float, Literal["inf"]]


class RepKind(str, Enum):
    """Support-function representation enumeration."""
    CAP = "cap"
    ELLIPSOID = "ellipsoid"
    AXISYMMETRIC = "axisymmetric"
    FOURIER2D = "fourier2d"
    HARMONIC3D = "harmonic3d"


class FamilyKind(str, Enum):
    """Body-zoo family enumeration."""
    CAP = "cap"
    OFFSET_BALL = "offset_ball"
    ELLIPSOID = "ellipsoid"
    AXISYMMETRIC = "axisymmetric"
    RANDOM_SMOOTH_2D = "random_smooth_2d"
    RANDOM_SMOOTH_3D = "random_smooth_3d"
    SYMMETRIC_2SPHERE = "symmetric_2sphere"
    ROUNDED_POLYGON = "rounded_polygon"


class Command(str, Enum):
    """CLI command enumeration."""
    COMPUTE = "compute"
    VERIFY = "verify"
    SCAN = "scan"
    SWEEP = "sweep"


class OutputFormat(str, Enum):
    """Artifact format enumeration."""
    JSON = "json"
    CSV = "csv"


class Verdict(str, Enum):
    """Inequality verdict enumeration."""
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"
    SKIPPED = "skipped"


# ==================== Body Documents ====================

class RepSpec(BaseModel):
    """Support representation: a kind plus kind-specific parameters."""
    kind: RepKind
    parameters: Dict[str, Any] = Field(default_factory=dict, description="Kind-specific parameters")


class BodySpec(BaseModel):
    """Body-spec document."""
    model_config = ConfigDict(populate_by_name=True)

    dim: int = Field(..., ge=2, description="Dimension d of the space form")
    lam: float = Field(..., ge=0.0, alias="lambda", description="Curvature lambda >= 0")
    chart_center: Union[List[float], Literal["origin"]] = Field(
        default="origin",
        description="Unit vector in R^{d+1} or 'origin' (the pole e_{d+1}, and the only choice when lambda = 0)"
    )
    rep: RepSpec
    properness_bound: Optional[float] = Field(default=None, gt=0.0)
    name: Optional[str] = Field(default=None, description="Free label carried into reports")


class FamilySpec(BaseModel):
    """Seeded generator document for the body zoo."""
    model_config = ConfigDict(populate_by_name=True)

    kind: FamilyKind
    dim: int = Field(default=2, ge=2)
    lam: float = Field(default=1.0, ge=0.0, alias="lambda")
    seed: int = Field(default=0, ge=0)
    parameters: Dict[str, Any] = Field(
        default_factory=dict,
        description="amplitude, bandwidth, alpha, alpha_range, eccentricity_range, rounding, sides, ..."
    )


# ==================== Results ====================

class FunctionalValue(BaseModel):
    """A computed scalar with provenance and an absolute error bar."""
    value: float
    abs_error: float = Field(default=0.0, ge=0.0)
    formula_tag: str = Field(..., description="Which formula produced the value")
    rule_id: str = Field(default="", description="Quadrature rule identifier")


class EntropyBundleModel(BaseModel):
    """Spherical curvature entropy with its derived members."""
    E_s: FunctionalValue
    entropy_power: FunctionalValue
    kl: FunctionalValue
    p_limit_check: List[Tuple[float, float]] = Field(
        default_factory=list,
        description="(q, probe value) pairs of the q -> 0+ sequence"
    )
    extrapolated: float = Field(..., description="Richardson extrapolation of the probe sequence")


class InequalityReport(BaseModel):
    """One inequality check; margin >= 0 means the inequality holds."""
    name: str
    lhs: FunctionalValue
    rhs: FunctionalValue
    margin: float
    tolerance: float
    precondition_flags: Dict[str, bool] = Field(default_factory=dict)
    verdict: Verdict
    equality: bool = Field(default=False, description="Margin is zero within error bars")
    note: Optional[str] = None


class ScanRecord(BaseModel):
    """One body of a conjecture scan."""
    schema_version: str = SCHEMA_VERSION
    seed: int
    index: int
    body: Dict[str, Any]
    reports: List[InequalityReport] = Field(default_factory=list)
    min_margin: Optional[float] = Field(default=None, description="Smallest margin among evaluated reports")
    min_margin_name: Optional[str] = None
    flags: Dict[str, bool] = Field(default_factory=dict)


class SweepRow(BaseModel):
    """One (lambda, functional) row of a limit study."""
    body: str
    functional: str
    lam: float
    value: float
    abs_error: float
    reference: Optional[float] = None


# ==================== Runs ====================

class RunConfig(BaseModel):
    """Configuration of a CLI run."""
    command: Command
    body_path: Optional[str] = None
    family_path: Optional[str] = None
    resolution: int = Field(default=4, ge=1, description="Quadrature resolution level")
    tolerance: float = Field(default=1e-8, ge=0.0, description="Inequality slack on top of error bars")
    seed: Optional[int] = Field(default=None, ge=0, description="Overrides the family seed of a scan")
    output: Optional[str] = Field(default=None, description="Output directory; defaults to a new run directory")
    format: OutputFormat = OutputFormat.JSON
    threads: int = Field(default=1, ge=1, description="Worker count; never changes results")
    n: int = Field(default=10, ge=1, description="Bodies per scan")
    p_grid: List[PValue] = Field(default_factory=lambda: [0.5, 1.0, 2.0, "inf"])
    lambda_grid: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3, 1e-4])
    suites: List[str] = Field(default_factory=lambda: ["core", "floating", "entropy"], description="Suites run by verify")
    p: PValue = Field(default=1.0, description="Exponent of the sweep functionals")
    resume: bool = False


class RunManifest(BaseModel):
    """Manifest written into every run directory."""
    schema_version: str = SCHEMA_VERSION
    run_id: str
    command: Command
    created_at: datetime
    config: RunConfig
    settings: Dict[str, Any] = Field(default_factory=dict)
    status: str = Field(default="running", description="running, completed, failed")
    violated: int = 0
    records: int = 0


class RunListItem(BaseModel):
    """Run summary for listings."""
    run_id: str
    command: Command
    created_at: datetime
    status: str
    violated: int = 0
    records: int = 0


# ==================== API Models ====================

class ComputeRequest(BaseModel):
    """Request to compute functionals of one body."""
    body: BodySpec
    resolution: int = Field(default=4, ge=1)
    p_list: List[PValue] = Field(default_factory=lambda: [1.0])
    save: bool = Field(default=False, description="Persist the result as a run")


class ComputeResponse(BaseModel):
    """Computed functionals."""
    success: bool
    run_id: Optional[str] = None
    values: Dict[str, FunctionalValue] = Field(default_factory=dict)
    errors: List[str] = Field(default_factory=list)


class VerifyRequest(BaseModel):
    """Request to run verification suites on one body."""
    body: BodySpec
    suites: List[str] = Field(default_factory=lambda: ["core", "floating", "entropy"])
    resolution: int = Field(default=4, ge=1)
    tolerance: float = Field(default=1e-8, ge=0.0)
    p_grid: List[PValue] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    save: bool = False


class VerifyResponse(BaseModel):
    """Verification reports."""
    success: bool
    run_id: Optional[str] = None
    reports: List[InequalityReport] = Field(default_factory=list)
    violated: int = 0


class RunListResponse(BaseModel):
    """List of stored runs."""
    runs: List[RunListItem]
    total: int


class SettingsResponse(BaseModel):
    """Numeric settings in effect."""
    schema_version: str = SCHEMA_VERSION
    settings: Dict[str, Any]


class ErrorResponse(BaseModel):
    """Error response."""
    error: str
    detail: Optional[str] = None
    status_code: int


class SuccessResponse(BaseModel):
    """Generic success response."""
    success: bool = True
    message: str
