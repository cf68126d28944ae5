"""Report serialization: atomic writes, summary tables, detail records.

All writers are deterministic (sorted keys, no timestamps) so repeated runs
with the same config and backend produce byte-identical files. Files are
written to a temporary path and renamed into place, so interrupted runs never
leave truncated reports.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .evaluator import InstanceResult, MetricReport, MetricTriple


def atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as tmp:
            tmp.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def atomic_write_json(path: str | Path, payload) -> None:
    atomic_write_text(
        path, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=True) + "\n"
    )


def atomic_write_jsonl(path: str | Path, records) -> None:
    lines = [json.dumps(record, sort_keys=True, ensure_ascii=True) for record in records]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def _fmt(value: float | None, decimals: int) -> str:
    return "-" if value is None else f"{value:.{decimals}f}"


def _triple_cells(triple: MetricTriple | None, decimals: int) -> list[str]:
    if triple is None:
        return ["-", "-", "-"]
    return [
        _fmt(triple.overall, decimals),
        _fmt(triple.seen, decimals),
        _fmt(triple.unseen, decimals),
    ]


def summary_table(reports: list[MetricReport]) -> str:
    """Fixed-width table: SER, validated and unfiltered faithfulness, each
    split into all/seen/unseen columns."""
    headers = (
        ["system"]
        + [f"SER({b})" for b in ("all", "seen", "unseen")]
        + [f"SGSAcc-v({b})" for b in ("all", "seen", "unseen")]
        + [f"SGSAcc({b})" for b in ("all", "seen", "unseen")]
    )
    rows = [headers]
    for report in reports:
        rows.append(
            [report.system_id]
            + _triple_cells(report.ser, 2)
            + _triple_cells(report.sgsacc_validated, 1)
            + _triple_cells(report.sgsacc_all, 1)
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = []
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)


def robustness_table(rows: list[tuple[str, str, str, str]]) -> str:
    table = [("variant", "precision", "recall", "f1")] + rows
    widths = [max(len(row[i]) for row in table) for i in range(4)]
    lines = []
    for index, row in enumerate(table):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines)


def result_record(result: InstanceResult, slot_error_flag, slot_error_details) -> dict:
    """Per-instance detail record for the JSONL report."""
    return {
        "instance_id": result.instance_id,
        "system_id": result.system_id,
        "validated": result.validated,
        "instance_faithful": result.instance_faithful,
        "actions": [
            {
                "action_index": a.action_index,
                "reference": a.entailment_reference.text,
                "rule_id": a.entailment_reference.rule_id,
                "faithful": a.faithful,
                "augmented": a.used_augmented_premise,
                "p_entailment": a.verdict.p_entailment,
            }
            for a in result.assessments
        ],
        "slot_error": slot_error_flag,
        "slot_values": [
            {
                "action_index": d.action_index,
                "slot": d.slot,
                "value": d.value,
                "found": d.found,
            }
            for d in slot_error_details
        ],
    }
