"""
Storage manager for run directories.

Every CLI or API invocation that persists results gets its own directory
under the data directory, named by a UUID:

    manifest.json          RunManifest
    functionals.json|csv   computed FunctionalValues
    reports.json|csv       InequalityReports
    scan.jsonl             one ScanRecord per line
    checkpoint.json        next index of an interrupted scan
    sweep.csv              lambda sweep rows
"""
import csv
import json
import logging
import shutil
import uuid
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from sphereconvex import config
from sphereconvex.models.schemas import (
    FunctionalValue,
    InequalityReport,
    OutputFormat,
    RunConfig,
    RunListItem,
    RunManifest,
    ScanRecord,
    SweepRow,
)

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["name", "lhs", "lhs_err", "rhs", "rhs_err", "margin", "verdict", "flags"]
FUNCTIONAL_COLUMNS = ["name", "value", "abs_error", "formula_tag", "rule_id"]
SWEEP_COLUMNS = ["body", "functional", "lam", "value", "abs_error", "reference"]


def report_row(report: InequalityReport) -> Dict[str, Any]:
    """Flat CSV row of a report; flags are written as name=true|false pairs."""
    flags = ";".join(f"{k}={'true' if v else 'false'}" for k, v in report.precondition_flags.items())
    return {
        "name": report.name,
        "lhs": repr(report.lhs.value),
        "lhs_err": repr(report.lhs.abs_error),
        "rhs": repr(report.rhs.value),
        "rhs_err": repr(report.rhs.abs_error),
        "margin": repr(report.margin),
        "verdict": report.verdict.value,
        "flags": flags,
    }


class RunStorage:
    """Manages run directories on the file system."""

    def __init__(self, data_dir: Optional[str] = None):
        """
        Initialize the storage manager.

        Args:
            data_dir: Base directory for run directories (SPHERECONVEX_DATA_DIR by default)
        """
        self.data_dir = Path(data_dir or config.DATA_DIR)
        self.data_dir.mkdir(parents=True, exist_ok=True)

    def _get_run_path(self, run_id: str) -> Path:
        return self.data_dir / run_id

    def _get_manifest_path(self, run_id: str) -> Path:
        return self._get_run_path(run_id) / "manifest.json"

    def _get_scan_path(self, run_id: str) -> Path:
        return self._get_run_path(run_id) / "scan.jsonl"

    def _get_checkpoint_path(self, run_id: str) -> Path:
        return self._get_run_path(run_id) / "checkpoint.json"

    # ==================== Manifest ====================

    def create_run(self, run_config: RunConfig, run_id: Optional[str] = None) -> str:
        """
        Create a run directory with its manifest.

        Args:
            run_config: Configuration echoed into the manifest
            run_id: Directory name; a new UUID when omitted

        Returns:
            run_id: The run ID
        """
        run_id = run_id or str(uuid.uuid4())
        self._get_run_path(run_id).mkdir(parents=True, exist_ok=True)
        manifest = RunManifest(
            run_id=run_id,
            command=run_config.command,
            created_at=datetime.utcnow(),
            config=run_config,
            settings=config.settings_snapshot(),
        )
        self._write_manifest(manifest)
        logger.info("[%s] run created (%s)", run_id, run_config.command.value)
        return run_id

    def _write_manifest(self, manifest: RunManifest) -> None:
        self._get_manifest_path(manifest.run_id).write_text(manifest.model_dump_json(indent=2), encoding="utf-8")

    def get_manifest(self, run_id: str) -> Optional[RunManifest]:
        """
        Get a run manifest by ID.

        Returns:
            RunManifest or None if not found
        """
        manifest_path = self._get_manifest_path(run_id)
        if not manifest_path.exists():
            return None
        try:
            with open(manifest_path, "r", encoding="utf-8") as f:
                return RunManifest(**json.load(f))
        except Exception as e:
            logger.error("error loading manifest for run %s: %s", run_id, e)
            return None

    def finish_run(self, run_id: str, status: str = "completed", violated: int = 0,
                   records: Optional[int] = None) -> bool:
        """Record the final status of a run."""
        manifest = self.get_manifest(run_id)
        if manifest is None:
            return False
        manifest.status = status
        manifest.violated = violated
        if records is not None:
            manifest.records = records
        self._write_manifest(manifest)
        return True

    # ==================== Results ====================

    def save_functionals(self, run_id: str, values: Dict[str, FunctionalValue],
                         fmt: OutputFormat = OutputFormat.JSON) -> Path:
        """Write computed functionals as functionals.json or functionals.csv."""
        if fmt == OutputFormat.CSV:
            path = self._get_run_path(run_id) / "functionals.csv"
            rows = [{"name": name, **value.model_dump()} for name, value in values.items()]
            for row in rows:
                row["value"] = repr(row["value"])
                row["abs_error"] = repr(row["abs_error"])
            self._write_csv(path, FUNCTIONAL_COLUMNS, rows)
        else:
            path = self._get_run_path(run_id) / "functionals.json"
            payload = {name: value.model_dump() for name, value in values.items()}
            path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        self._set_records(run_id, len(values))
        return path

    def load_functionals(self, run_id: str) -> Optional[Dict[str, FunctionalValue]]:
        path = self._get_run_path(run_id) / "functionals.json"
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return {name: FunctionalValue(**value) for name, value in json.load(f).items()}

    def save_reports(self, run_id: str, reports: List[InequalityReport],
                     fmt: OutputFormat = OutputFormat.JSON) -> Path:
        """Write reports as reports.json or reports.csv (fixed columns)."""
        if fmt == OutputFormat.CSV:
            path = self._get_run_path(run_id) / "reports.csv"
            self._write_csv(path, REPORT_COLUMNS, [report_row(r) for r in reports])
        else:
            path = self._get_run_path(run_id) / "reports.json"
            payload = [json.loads(r.model_dump_json()) for r in reports]
            path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
        self._set_records(run_id, len(reports))
        return path

    def load_reports(self, run_id: str) -> Optional[List[InequalityReport]]:
        path = self._get_run_path(run_id) / "reports.json"
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return [InequalityReport(**item) for item in json.load(f)]

    def save_sweep(self, run_id: str, rows: Iterable[SweepRow]) -> Path:
        path = self._get_run_path(run_id) / "sweep.csv"
        rows = [{k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.model_dump().items()}
                for row in rows]
        self._write_csv(path, SWEEP_COLUMNS, rows)
        self._set_records(run_id, len(rows))
        return path

    def _set_records(self, run_id: str, count: int) -> None:
        manifest = self.get_manifest(run_id)
        if manifest is not None:
            manifest.records = count
            self._write_manifest(manifest)

    @staticmethod
    def _write_csv(path: Path, columns: List[str], rows: List[Dict[str, Any]]) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=columns)
            writer.writeheader()
            writer.writerows(rows)

    # ==================== Scans ====================

    def append_scan_records(self, run_id: str, records: Iterable[ScanRecord]) -> int:
        """
        Append records to scan.jsonl.

        Returns:
            Number of records written
        """
        count = 0
        with open(self._get_scan_path(run_id), "a", encoding="utf-8") as f:
            for record in records:
                f.write(record.model_dump_json() + "\n")
                count += 1
        return count

    def load_scan_records(self, run_id: str) -> List[ScanRecord]:
        path = self._get_scan_path(run_id)
        if not path.exists():
            return []
        with open(path, "r", encoding="utf-8") as f:
            return [ScanRecord(**json.loads(line)) for line in f if line.strip()]

    def save_checkpoint(self, run_id: str, next_index: int, violated: int) -> None:
        """Record how far a scan got; resume starts at next_index."""
        payload = {"next_index": next_index, "violated": violated, "updated_at": datetime.utcnow().isoformat()}
        self._get_checkpoint_path(run_id).write_text(json.dumps(payload, indent=2), encoding="utf-8")
        logger.debug("[%s] checkpoint at index %d", run_id, next_index)

    def load_checkpoint(self, run_id: str) -> Optional[Dict[str, Any]]:
        path = self._get_checkpoint_path(run_id)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def truncate_scan(self, run_id: str, count: int) -> None:
        """Keep the first `count` records of scan.jsonl (drops records past the last checkpoint)."""
        records = self.load_scan_records(run_id)[:count]
        path = self._get_scan_path(run_id)
        path.write_text("".join(r.model_dump_json() + "\n" for r in records), encoding="utf-8")

    # ==================== Listing ====================

    def list_runs(self) -> List[RunListItem]:
        """
        List all runs in the storage, newest first.

        Returns:
            List of RunListItem
        """
        runs = []
        if not self.data_dir.exists():
            return runs
        for run_dir in self.data_dir.iterdir():
            if not run_dir.is_dir() or run_dir.name.startswith('.'):
                continue
            manifest = self.get_manifest(run_dir.name)
            if manifest:
                runs.append(RunListItem(
                    run_id=manifest.run_id,
                    command=manifest.command,
                    created_at=manifest.created_at,
                    status=manifest.status,
                    violated=manifest.violated,
                    records=manifest.records,
                ))
        runs.sort(key=lambda x: x.created_at, reverse=True)
        return runs

    def run_exists(self, run_id: str) -> bool:
        return self._get_manifest_path(run_id).exists()

    def delete_run(self, run_id: str) -> bool:
        """
        Delete a run directory and all its files.

        Returns:
            True if deleted successfully, False otherwise
        """
        run_path = self._get_run_path(run_id)
        if not run_path.exists():
            return False
        try:
            shutil.rmtree(run_path)
            return True
        except Exception as e:
            logger.error("error deleting run %s: %s", run_id, e)
            return False

    def get_storage_stats(self) -> Dict[str, Any]:
        """
        Get storage statistics.

        Returns:
            Dictionary with storage stats
        """
        total_runs = 0
        total_size = 0
        if self.data_dir.exists():
            for run_dir in self.data_dir.iterdir():
                if run_dir.is_dir() and not run_dir.name.startswith('.'):
                    total_runs += 1
                    for file_path in run_dir.rglob('*'):
                        if file_path.is_file():
                            total_size += file_path.stat().st_size
        return {
            "total_runs": total_runs,
            "total_size_bytes": total_size,
            "total_size_mb": round(total_size / (1024 * 1024), 2),
            "data_directory": str(self.data_dir.absolute()),
        }
