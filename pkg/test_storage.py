"""
Tests for run directories.
"""
import csv
import json

import pytest

from sphereconvex.models.schemas import (
    Command,
    FunctionalValue,
    InequalityReport,
    OutputFormat,
    RunConfig,
    SweepRow,
    Verdict,
)
from sphereconvex.storage.manager import REPORT_COLUMNS, RunStorage


@pytest.fixture
def storage(tmp_path):
    return RunStorage(str(tmp_path))


def _report(verdict: Verdict = Verdict.HOLDS) -> InequalityReport:
    side = FunctionalValue(value=1.0, abs_error=1e-12, formula_tag="x")
    return InequalityReport(name="test", lhs=side, rhs=side, margin=0.0, tolerance=1e-8,
                            precondition_flags={"d >= 3": False}, verdict=verdict)


def test_create_and_get_run(storage):
    """Test a run directory with its manifest."""
    run_id = storage.create_run(RunConfig(command=Command.COMPUTE))
    manifest = storage.get_manifest(run_id)
    assert manifest.run_id == run_id
    assert manifest.status == "running"
    assert "default_resolution" in manifest.settings
    assert storage.run_exists(run_id)


def test_named_run(storage):
    """Test an explicit run ID names the directory."""
    assert storage.create_run(RunConfig(command=Command.VERIFY), "my-run") == "my-run"
    assert (storage.data_dir / "my-run" / "manifest.json").exists()


def test_functionals_round_trip(storage):
    """Test functionals.json and functionals.csv."""
    run_id = storage.create_run(RunConfig(command=Command.COMPUTE))
    values = {"vol": FunctionalValue(value=0.125, abs_error=1e-15, formula_tag="vol", rule_id="r")}
    storage.save_functionals(run_id, values)
    assert storage.load_functionals(run_id)["vol"].value == 0.125
    path = storage.save_functionals(run_id, values, OutputFormat.CSV)
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    assert float(rows[0]["value"]) == 0.125
    assert storage.get_manifest(run_id).records == 1


def test_report_csv_columns(storage):
    """Test the fixed report columns and the flag encoding."""
    run_id = storage.create_run(RunConfig(command=Command.VERIFY))
    path = storage.save_reports(run_id, [_report()], OutputFormat.CSV)
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        rows = list(reader)
    assert reader.fieldnames == REPORT_COLUMNS
    assert rows[0]["flags"] == "d >= 3=false"
    assert rows[0]["verdict"] == "holds"


def test_reports_json(storage):
    """Test reports.json reloads as reports."""
    run_id = storage.create_run(RunConfig(command=Command.VERIFY))
    storage.save_reports(run_id, [_report(Verdict.VIOLATED)])
    assert storage.load_reports(run_id)[0].verdict == Verdict.VIOLATED


def test_sweep_csv(storage):
    """Test sweep rows."""
    run_id = storage.create_run(RunConfig(command=Command.SWEEP))
    rows = [SweepRow(body="b", functional="Omega_1^lam", lam=0.1, value=2.0, abs_error=0.0, reference=1.9)]
    path = storage.save_sweep(run_id, rows)
    assert path.read_text().splitlines()[0] == "body,functional,lam,value,abs_error,reference"


def test_checkpoint_and_truncate(storage):
    """Test checkpoints and truncation of scan.jsonl."""
    from sphereconvex.models.schemas import ScanRecord

    run_id = storage.create_run(RunConfig(command=Command.SCAN))
    storage.append_scan_records(run_id, [ScanRecord(seed=0, index=i, body={}) for i in range(4)])
    storage.save_checkpoint(run_id, 2, 1)
    assert storage.load_checkpoint(run_id)["next_index"] == 2
    storage.truncate_scan(run_id, 2)
    assert [r.index for r in storage.load_scan_records(run_id)] == [0, 1]
    for line in (storage.data_dir / run_id / "scan.jsonl").read_text().splitlines():
        json.loads(line)


def test_list_and_delete(storage):
    """Test listing, finishing and deleting runs."""
    first = storage.create_run(RunConfig(command=Command.COMPUTE))
    second = storage.create_run(RunConfig(command=Command.VERIFY))
    storage.finish_run(second, violated=3)
    runs = {item.run_id: item for item in storage.list_runs()}
    assert set(runs) == {first, second}
    assert runs[second].violated == 3
    assert runs[second].status == "completed"
    assert storage.delete_run(first)
    assert not storage.delete_run(first)
    assert storage.get_manifest(first) is None
    assert storage.get_storage_stats()["total_runs"] == 1
