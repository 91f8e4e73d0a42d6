"""
Command line for sphereconvex.

    python -m sphereconvex.cli compute --body cap.json --p-grid 1 2 inf
    python -m sphereconvex.cli verify  --body body.json --suites core floating
    python -m sphereconvex.cli scan    --family zoo.json --n 1000 --threads 4
    python -m sphereconvex.cli sweep   --body ellipse.json --lambda-grid 1e-1 1e-2
    python -m sphereconvex.cli runs

Flags override the values of a --config RunConfig document. The exit status
is 1 when any report is violated, 2 when the input documents are invalid and
0 otherwise.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sphereconvex import config
from sphereconvex.errors import SphereConvexError
from sphereconvex.geometry.catalog import compute_functionals
from sphereconvex.importer.spec_loader import SpecLoader
from sphereconvex.models.schemas import Command, InequalityReport, RunConfig
from sphereconvex.storage.manager import RunStorage
from sphereconvex.verify.reports import count_violated
from sphereconvex.verify.scanner import run_scan
from sphereconvex.verify.suites import SUITES, run_suites, verify_limits

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_INVALID = 2


# ==================== Parser ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphereconvex", description="Convex bodies in space forms")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="RunConfig JSON document; flags override its values")
    common.add_argument("--resolution", type=int, help=f"quadrature level (default {config.DEFAULT_RESOLUTION})")
    common.add_argument("--tol", dest="tolerance", type=float, help="slack on top of error bars")
    common.add_argument("--seed", type=int, help="override the family seed")
    common.add_argument("--threads", type=int, help="worker count (never changes results)")
    common.add_argument("--format", choices=["json", "csv"], help="artifact format")
    common.add_argument("--output", help="run directory (default: a new directory under the data dir)")
    common.add_argument("--p-grid", dest="p_grid", nargs="+", help="exponents, 'inf' allowed")
    common.add_argument("--log-level", default=None, help="logging level")

    compute = sub.add_parser("compute", parents=[common], help="compute the functionals of one body")
    compute.add_argument("--body", dest="body_path", help="body-spec JSON")

    verify = sub.add_parser("verify", parents=[common], help="run verification suites on one body")
    verify.add_argument("--body", dest="body_path", help="body-spec JSON")
    verify.add_argument("--suites", nargs="+", choices=sorted(SUITES), help="suites to run")

    scan = sub.add_parser("scan", parents=[common], help="scan a seeded family against the conjectures")
    scan.add_argument("--family", dest="family_path", help="family-spec JSON")
    scan.add_argument("--n", type=int, help="number of bodies")
    scan.add_argument("--resume", action="store_true", default=None, help="continue from the checkpoint in --output")

    sweep = sub.add_parser("sweep", parents=[common], help="lambda -> 0 limit tables of one chart body")
    sweep.add_argument("--body", dest="body_path", help="body-spec JSON")
    sweep.add_argument("--lambda-grid", dest="lambda_grid", nargs="+", type=float, help="positive curvatures")
    sweep.add_argument("--p", help="exponent of the sweep functionals")

    sub.add_parser("runs", help="list stored runs")
    return parser


def _parse_p(value: str) -> Any:
    return "inf" if value.strip().lower() in ("inf", "infinity") else float(value)


def config_from_args(args: argparse.Namespace) -> Tuple[Optional[RunConfig], List[str]]:
    """Merge a --config document with the explicitly given flags."""
    base: Dict[str, Any] = {}
    if args.config:
        data, errors = SpecLoader.read_json(args.config)
        if data is None:
            return None, errors
        base.update(data)
    base["command"] = args.command
    for key in ("body_path", "family_path", "resolution", "tolerance", "seed", "threads", "format", "output",
                "n", "suites", "lambda_grid", "resume"):
        value = getattr(args, key, None)
        if value is not None:
            base[key] = value
    if getattr(args, "p_grid", None):
        base["p_grid"] = [_parse_p(v) for v in args.p_grid]
    if getattr(args, "p", None):
        base["p"] = _parse_p(args.p)
    return SpecLoader.parse(RunConfig, base)


# ==================== Commands ====================

def _storage_for(run_config: RunConfig) -> Tuple[RunStorage, Optional[str]]:
    """Storage and run ID; --output names the run directory itself."""
    if run_config.output:
        out = Path(run_config.output)
        return RunStorage(str(out.parent)), out.name
    return RunStorage(), None


def _print_reports(reports: Sequence[InequalityReport]) -> None:
    for r in reports:
        print(f"{r.verdict.value:>12}  {r.margin:+.3e}  {r.name}")


def _load_body(run_config: RunConfig):
    if not run_config.body_path:
        return None, ["body_path: required for this command"]
    return SpecLoader.load_body(run_config.body_path, run_config.resolution)


def _compute(run_config: RunConfig, storage: RunStorage, run_id: str) -> int:
    body, errors = _load_body(run_config)
    if body is None:
        return _invalid(errors)
    values, problems = compute_functionals(body, run_config.p_grid)
    for problem in problems:
        logger.info("[compute] %s", problem)
    storage.save_functionals(run_id, values, run_config.format)
    for name, value in values.items():
        print(f"{name:>28}  {value.value:.15g}  +- {value.abs_error:.2e}")
    storage.finish_run(run_id)
    return EXIT_OK


def _verify(run_config: RunConfig, storage: RunStorage, run_id: str) -> int:
    body, errors = _load_body(run_config)
    if body is None:
        return _invalid(errors)
    reports = run_suites(body, run_config.suites, run_config.p_grid, run_config.tolerance)
    storage.save_reports(run_id, reports, run_config.format)
    _print_reports(reports)
    violated = count_violated(reports)
    storage.finish_run(run_id, violated=violated)
    return EXIT_VIOLATED if violated else EXIT_OK


def _scan(run_config: RunConfig, storage: RunStorage, run_id: str) -> int:
    if not run_config.family_path:
        return _invalid(["family_path: required for scan"])
    spec, errors = SpecLoader.load_family_spec(run_config.family_path)
    if spec is None:
        return _invalid(errors)
    if run_config.seed is not None:
        spec = spec.model_copy(update={"seed": run_config.seed})
    total, violated = run_scan(storage, run_id, spec, run_config.n, run_config.resolution, run_config.p_grid,
                               run_config.tolerance, run_config.threads, run_config.resume)
    flagged = sum(1 for r in storage.load_scan_records(run_id) if any(r.flags.values()))
    print(f"scanned {total} bodies: {violated} violated reports, {flagged} flagged records")
    storage.finish_run(run_id, violated=violated, records=total)
    return EXIT_VIOLATED if violated else EXIT_OK


def _sweep(run_config: RunConfig, storage: RunStorage, run_id: str) -> int:
    body, errors = _load_body(run_config)
    if body is None:
        return _invalid(errors)
    study = verify_limits(body, run_config.lambda_grid, run_config.p, tolerance=run_config.tolerance)
    storage.save_sweep(run_id, study.rows)
    storage.save_reports(run_id, study.reports, run_config.format)
    for name, order in study.orders.items():
        print(f"{name:>20}  observed order {order:.3f}")
    violated = count_violated(study.reports)
    storage.finish_run(run_id, violated=violated, records=len(study.rows))
    return EXIT_VIOLATED if violated else EXIT_OK


def _invalid(errors: Sequence[str]) -> int:
    for error in errors:
        print(f"error: {error}", file=sys.stderr)
    return EXIT_INVALID


_COMMANDS = {
    Command.COMPUTE: _compute,
    Command.VERIFY: _verify,
    Command.SCAN: _scan,
    Command.SWEEP: _sweep,
}


def run(run_config: RunConfig) -> int:
    """
    Execute one configured command and write its artifacts.

    Returns:
        Exit status (1 iff any verdict is violated, 2 for invalid input)
    """
    storage, run_id = _storage_for(run_config)
    if run_config.resume and run_id and storage.run_exists(run_id):
        logger.info("[%s] resuming", run_id)
    else:
        run_id = storage.create_run(run_config, run_id)
    try:
        status = _COMMANDS[run_config.command](run_config, storage, run_id)
    except SphereConvexError as exc:
        storage.finish_run(run_id, status="failed")
        return _invalid([str(exc)])
    if status == EXIT_INVALID:
        storage.finish_run(run_id, status="failed")
    logger.info("[%s] artifacts in %s", run_id, storage.data_dir / run_id)
    return status


def _list_runs() -> int:
    for item in RunStorage().list_runs():
        print(f"{item.run_id}  {item.command.value:>8}  {item.status:>9}  "
              f"{item.records:>6} records  {item.violated} violated  {item.created_at:%Y-%m-%d %H:%M}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config.setup_logging(getattr(args, "log_level", None))
    if args.command == "runs":
        return _list_runs()
    run_config, errors = config_from_args(args)
    if run_config is None:
        return _invalid(errors)
    return run(run_config)


if __name__ == "__main__":
    sys.exit(main())
