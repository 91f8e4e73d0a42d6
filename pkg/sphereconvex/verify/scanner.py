"""
Conjecture scans over seeded body families.

Each member is built from (family seed, index) alone and scanned
independently, so the record stream is identical for any worker count.
Negative margins are re-checked at doubled resolution before they are
flagged.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sphereconvex import config
from sphereconvex.bodies.generators import family_member
from sphereconvex.errors import SphereConvexError
from sphereconvex.geometry.functionals import PLike
from sphereconvex.models.schemas import FamilySpec, InequalityReport, ScanRecord, Verdict
from sphereconvex.storage.manager import RunStorage
from sphereconvex.verify.reports import count_violated, min_margin, skipped
from sphereconvex.verify.suites import conjecture_reports

logger = logging.getLogger(__name__)


def _record(spec: FamilySpec, index: int, body: Dict, reports: List[InequalityReport],
            flags: Dict[str, bool]) -> ScanRecord:
    margin, name = min_margin(reports)
    return ScanRecord(
        seed=spec.seed,
        index=index,
        body=body,
        reports=reports,
        min_margin=margin if math.isfinite(margin) else None,
        min_margin_name=name,
        flags=flags,
    )


def scan_body(spec: FamilySpec, index: int, level: Optional[int] = None,
              p_grid: Optional[Sequence[PLike]] = None, tolerance: Optional[float] = None) -> ScanRecord:
    """
    Scan member `index` of a family against the conjecture targets.

    Reports with margin < -tolerance are recomputed on the same body at
    doubled resolution and replaced by the recomputed report; the name of a
    report that is still violated lands in the record flags.
    """
    level = config.DEFAULT_RESOLUTION if level is None else level
    tol = config.DEFAULT_TOLERANCE if tolerance is None else tolerance
    descriptor = {"family": spec.kind.value, "index": index}
    try:
        body = family_member(spec, index, level)
    except SphereConvexError as exc:
        logger.warning("[scan] member %d not generated: %s", index, exc)
        return _record(spec, index, descriptor, [skipped("generation", str(exc))], {"generation failed": True})
    descriptor.update(body.descriptor())
    try:
        reports = conjecture_reports(body, p_grid, tol)
    except SphereConvexError as exc:
        logger.warning("[scan] member %d not evaluated: %s", index, exc)
        return _record(spec, index, descriptor, [skipped("evaluation", str(exc))], {"evaluation failed": True})

    suspects = {r.name for r in reports if r.verdict != Verdict.SKIPPED and r.margin < -tol}
    flags: Dict[str, bool] = {}
    if suspects:
        logger.info("[scan] member %d: re-checking %d negative margins at level %d", index, len(suspects), 2 * level)
        finer = {r.name: r for r in conjecture_reports(body.with_level(2 * level), p_grid, tol)}
        for i, report in enumerate(reports):
            if report.name not in suspects or report.name not in finer:
                continue
            again = finer[report.name]
            note = f"re-checked at level {2 * level} (margin {report.margin:.6g} at level {level})"
            reports[i] = again.model_copy(update={"note": f"{again.note}; {note}" if again.note else note})
            if again.verdict == Verdict.VIOLATED:
                flags[report.name] = True
                logger.warning("[scan] member %d: persistent violation of %s", index, report.name)
    return _record(spec, index, descriptor, reports, flags)


def scan_conjectures(spec: FamilySpec, n: int, level: Optional[int] = None,
                     p_grid: Optional[Sequence[PLike]] = None, tolerance: Optional[float] = None,
                     threads: int = 1, start: int = 0) -> Iterator[ScanRecord]:
    """
    Stream ScanRecords for members start .. n - 1 in index order.

    Args:
        spec: Family document
        n: Total number of members
        level: Quadrature level
        p_grid: Exponents of the per-p targets
        tolerance: Run tolerance
        threads: Worker count (results do not depend on it)
        start: First index (resumed scans)
    """
    indices = range(start, n)
    if threads <= 1:
        for index in indices:
            yield scan_body(spec, index, level, p_grid, tolerance)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map yields in submission order
        yield from pool.map(lambda i: scan_body(spec, i, level, p_grid, tolerance), indices)


def resolution_stability(spec: FamilySpec, index: int, level: Optional[int] = None,
                         factors: Sequence[int] = (1, 2, 4), p_grid: Optional[Sequence[PLike]] = None,
                         tolerance: Optional[float] = None) -> List[Tuple[int, float, float]]:
    """
    Minimal margin of one member across resolution levels.

    Returns:
        (level, min margin, error bar of the minimal report) per factor
    """
    level = config.DEFAULT_RESOLUTION if level is None else level
    body = family_member(spec, index, level)
    rows = []
    for factor in factors:
        reports = conjecture_reports(body.with_level(factor * level), p_grid, tolerance)
        margin, name = min_margin(reports)
        worst = next(r for r in reports if r.name == name)
        rows.append((factor * level, margin, worst.lhs.abs_error + worst.rhs.abs_error))
    return rows


def run_scan(storage: RunStorage, run_id: str, spec: FamilySpec, n: int, level: Optional[int] = None,
             p_grid: Optional[Sequence[PLike]] = None, tolerance: Optional[float] = None,
             threads: int = 1, resume: bool = False) -> Tuple[int, int]:
    """
    Scan a family into a run directory with periodic checkpoints.

    On resume, records past the last checkpoint are dropped and the scan
    continues at the checkpointed index.

    Returns:
        (records written in total, reports with a violated verdict)
    """
    start, violated = 0, 0
    if resume:
        checkpoint = storage.load_checkpoint(run_id)
        if checkpoint:
            start, violated = checkpoint["next_index"], checkpoint["violated"]
            storage.truncate_scan(run_id, start)
            logger.info("[%s] resuming scan at index %d", run_id, start)
    buffer: List[ScanRecord] = []
    index = start
    for record in scan_conjectures(spec, n, level, p_grid, tolerance, threads, start):
        buffer.append(record)
        violated += count_violated(record.reports)
        index = record.index + 1
        if len(buffer) >= config.SCAN_CHECKPOINT_EVERY:
            storage.append_scan_records(run_id, buffer)
            storage.save_checkpoint(run_id, index, violated)
            logger.info("[%s] scanned %d / %d", run_id, index, n)
            buffer = []
    storage.append_scan_records(run_id, buffer)
    storage.save_checkpoint(run_id, index, violated)
    return index, violated
