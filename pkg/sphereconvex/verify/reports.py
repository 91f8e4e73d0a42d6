"""
Inequality reports and verdict logic.

Every report is oriented so that margin = rhs - lhs >= 0 means the
inequality holds. The verdict compares the margin against the combined
error bars of both sides plus the run tolerance.
"""
import logging
from typing import Dict, Iterable, List, Optional, Tuple

from sphereconvex.models.schemas import FunctionalValue, InequalityReport, Verdict

logger = logging.getLogger(__name__)


def decide(margin: float, slack: float, tolerance: float) -> Tuple[Verdict, bool]:
    """
    Verdict and equality flag for a margin.

    holds when margin >= -tolerance, violated when margin < -slack, and
    inconclusive in between; equality when |margin| <= slack.
    """
    equality = abs(margin) <= slack
    if margin >= -tolerance:
        return Verdict.HOLDS, equality
    if margin < -slack:
        return Verdict.VIOLATED, equality
    return Verdict.INCONCLUSIVE, equality


def compare(name: str, lhs: FunctionalValue, rhs: FunctionalValue, tolerance: float,
            flags: Optional[Dict[str, bool]] = None, note: Optional[str] = None,
            enforce: bool = True) -> InequalityReport:
    """
    Report for lhs <= rhs.

    Args:
        name: Inequality name
        lhs: Side expected to be smaller
        rhs: Side expected to be larger
        tolerance: Run tolerance added to the error bars
        flags: Precondition flags; any False flag skips the verdict when `enforce`
        note: Free text carried into the report
        enforce: Skip the verdict when a precondition fails (scans pass False)
    """
    flags = dict(flags or {})
    margin = rhs.value - lhs.value
    slack = lhs.abs_error + rhs.abs_error + tolerance
    verdict, equality = decide(margin, slack, tolerance)
    if enforce and not all(flags.values()):
        verdict = Verdict.SKIPPED
        failed = ", ".join(k for k, v in flags.items() if not v)
        note = f"{note}; " if note else ""
        note += f"precondition not met: {failed}"
    if verdict == Verdict.VIOLATED:
        logger.warning("%s violated: margin %.6g beyond slack %.3g", name, margin, slack)
    return InequalityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        margin=margin,
        tolerance=tolerance,
        precondition_flags=flags,
        verdict=verdict,
        equality=equality,
        note=note,
    )


def equality_report(name: str, a: FunctionalValue, b: FunctionalValue, tolerance: float,
                    flags: Optional[Dict[str, bool]] = None, note: Optional[str] = None) -> InequalityReport:
    """
    Report for an identity a = b.

    The margin is -|a - b|, so the identity holds within tolerance and is
    violated once the gap exceeds the error bars.
    """
    gap = abs(a.value - b.value)
    slack = a.abs_error + b.abs_error + tolerance
    margin = -gap
    if gap <= tolerance:
        verdict = Verdict.HOLDS
    elif gap > slack:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.INCONCLUSIVE
    if flags and not all(flags.values()):
        verdict = Verdict.SKIPPED
    return InequalityReport(
        name=name, lhs=a, rhs=b, margin=margin, tolerance=tolerance,
        precondition_flags=dict(flags or {}), verdict=verdict, equality=gap <= slack, note=note,
    )


def skipped(name: str, reason: str, flags: Optional[Dict[str, bool]] = None) -> InequalityReport:
    """Report for an inequality whose sides could not be evaluated."""
    empty = FunctionalValue(value=0.0, abs_error=0.0, formula_tag="not evaluated")
    return InequalityReport(
        name=name, lhs=empty, rhs=empty, margin=0.0, tolerance=0.0,
        precondition_flags=dict(flags or {}), verdict=Verdict.SKIPPED, note=reason,
    )


def count_violated(reports: Iterable[InequalityReport]) -> int:
    return sum(1 for r in reports if r.verdict == Verdict.VIOLATED)


def min_margin(reports: List[InequalityReport]) -> Tuple[float, Optional[str]]:
    """Smallest margin among evaluated reports and the name carrying it."""
    evaluated = [r for r in reports if r.verdict != Verdict.SKIPPED or r.lhs.formula_tag != "not evaluated"]
    if not evaluated:
        return float("inf"), None
    worst = min(evaluated, key=lambda r: r.margin)
    return worst.margin, worst.name
