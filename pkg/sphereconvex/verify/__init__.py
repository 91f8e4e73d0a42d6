"""
Inequality reports, verification suites and conjecture scans.

Only the report helpers are re-exported here; import the suites and the
scanner from their modules.
"""
from .reports import compare, count_violated, equality_report, min_margin, skipped

__all__ = ['compare', 'count_violated', 'equality_report', 'min_margin', 'skipped']
