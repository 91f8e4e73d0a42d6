"""
FastAPI application for sphereconvex.

Wraps `compute` and `verify` for single bodies and exposes the stored runs.
"""
import logging

from fastapi import FastAPI, HTTPException, status
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from sphereconvex import __version__, config
from sphereconvex.errors import SphereConvexError
from sphereconvex.geometry.catalog import compute_functionals
from sphereconvex.importer.spec_loader import SpecLoader
from sphereconvex.models.schemas import (
    Command,
    ComputeRequest,
    ComputeResponse,
    ErrorResponse,
    RunConfig,
    RunListResponse,
    RunManifest,
    SettingsResponse,
    SuccessResponse,
    VerifyRequest,
    VerifyResponse,
)
from sphereconvex.storage.manager import RunStorage
from sphereconvex.verify.reports import count_violated
from sphereconvex.verify.suites import SUITES, run_suites

logger = logging.getLogger(__name__)

config.setup_logging()

# Initialize FastAPI app
app = FastAPI(
    title="sphereconvex API",
    description="Functionals and inequality checks for convex bodies in space forms",
    version=__version__,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=config.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

storage = RunStorage()


# ==================== API Endpoints ====================

@app.get("/")
async def root():
    """Root endpoint with API information."""
    return {
        "name": "sphereconvex API",
        "version": __version__,
        "features": [
            "Functionals of chart bodies in space forms",
            "Inequality verification suites",
            "Stored runs",
        ],
        "suites": sorted(SUITES),
        "docs": "/docs",
    }


@app.get("/health")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "service": "sphereconvex-api"}


@app.get("/api/settings", response_model=SettingsResponse, tags=["System"])
async def get_settings():
    """Numeric settings in effect."""
    return SettingsResponse(settings=config.settings_snapshot())


# ==================== Compute Endpoints ====================

@app.post("/api/compute", response_model=ComputeResponse, tags=["Compute"])
def compute(request: ComputeRequest):
    """
    Compute the functionals of one body.

    Args:
        request: Body document, resolution level and exponents

    Returns:
        Functional values; groups that do not apply are listed under errors
    """
    body = SpecLoader.body_from_spec(request.body, request.resolution)
    values, errors = compute_functionals(body, request.p_list)
    run_id = None
    if request.save:
        run_id = storage.create_run(RunConfig(command=Command.COMPUTE, resolution=request.resolution,
                                              p_grid=request.p_list))
        storage.save_functionals(run_id, values)
        storage.finish_run(run_id)
    return ComputeResponse(success=True, run_id=run_id, values=values, errors=errors)


@app.post("/api/verify", response_model=VerifyResponse, tags=["Compute"])
def verify(request: VerifyRequest):
    """
    Run verification suites on one body.

    Args:
        request: Body document, suite names, resolution, tolerance and exponents

    Returns:
        Reports and the number of violated verdicts
    """
    unknown = [s for s in request.suites if s not in SUITES]
    if unknown:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST,
                            detail=f"Unknown suites: {', '.join(unknown)}")
    body = SpecLoader.body_from_spec(request.body, request.resolution)
    reports = run_suites(body, request.suites, request.p_grid, request.tolerance)
    violated = count_violated(reports)
    run_id = None
    if request.save:
        run_id = storage.create_run(RunConfig(command=Command.VERIFY, resolution=request.resolution,
                                              tolerance=request.tolerance, p_grid=request.p_grid,
                                              suites=request.suites))
        storage.save_reports(run_id, reports)
        storage.finish_run(run_id, violated=violated)
    return VerifyResponse(success=violated == 0, run_id=run_id, reports=reports, violated=violated)


# ==================== Runs Endpoints ====================

@app.get("/api/runs", response_model=RunListResponse, tags=["Runs"])
async def list_runs():
    """
    List all stored runs.

    Returns:
        Runs with status and counts, newest first
    """
    runs = storage.list_runs()
    return RunListResponse(runs=runs, total=len(runs))


@app.get("/api/runs/{run_id}", response_model=RunManifest, tags=["Runs"])
async def get_run(run_id: str):
    """
    Get the manifest of a run.

    Args:
        run_id: Run ID
    """
    manifest = storage.get_manifest(run_id)
    if not manifest:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Run '{run_id}' not found")
    return manifest


@app.delete("/api/runs/{run_id}", response_model=SuccessResponse, tags=["Runs"])
async def delete_run(run_id: str):
    """
    Delete a run and all its files.

    Args:
        run_id: Run ID
    """
    if not storage.delete_run(run_id):
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=f"Run '{run_id}' not found")
    return SuccessResponse(success=True, message=f"Run '{run_id}' deleted successfully")


@app.get("/api/system/stats", tags=["System"])
async def get_storage_stats():
    """
    Get storage statistics.

    Returns:
        Storage information
    """
    return storage.get_storage_stats()


# Exception handlers
@app.exception_handler(SphereConvexError)
async def sphereconvex_exception_handler(request, exc):
    """Handle invalid bodies and out-of-domain requests."""
    return JSONResponse(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        content=ErrorResponse(
            error=type(exc).__name__,
            detail=str(exc),
            status_code=422
        ).model_dump()
    )


@app.exception_handler(HTTPException)
async def http_exception_handler(request, exc):
    """Handle HTTP exceptions."""
    return JSONResponse(
        status_code=exc.status_code,
        content=ErrorResponse(
            error=exc.detail,
            detail=str(exc.detail) if hasattr(exc, 'detail') else None,
            status_code=exc.status_code
        ).model_dump()
    )


@app.exception_handler(Exception)
async def general_exception_handler(request, exc):
    """Handle general exceptions."""
    return JSONResponse(
        status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
        content=ErrorResponse(
            error="Internal server error",
            detail=str(exc),
            status_code=500
        ).model_dump()
    )


# Main entry point
if __name__ == "__main__":
    import uvicorn

    print(f"\n{'='*60}")
    print(f"sphereconvex API {__version__}")
    print(f"{'='*60}")
    print(f"Starting server on http://{config.APP_HOST}:{config.APP_PORT}")
    print(f"API docs available at http://{config.APP_HOST}:{config.APP_PORT}/docs")
    print(f"Run directory: {storage.data_dir.absolute()}")
    print(f"{'='*60}\n")

    uvicorn.run(
        "sphereconvex.app:app",
        host=config.APP_HOST,
        port=config.APP_PORT,
        reload=True
    )
