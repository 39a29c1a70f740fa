"""
Report files.

<out>/<name>.csv        one row per trial, fixed columns
<out>/<name>.json       summary: config echo, blocks, label table, acceptance
<out>/<name>.trace.jsonl  per-trial learner traces, when the learner has one

verify_report recomputes every logged error from the label table.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, Union

import pandas as pd

from ..core.exceptions import BadParams
from ..models.distribution import Dist, tv_distance
from ..schemas.report import CSV_COLUMNS, ExperimentSummary, VerifyResult

logger = logging.getLogger(__name__)


def report_paths(out_dir: Union[str, Path], name: str) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    return {
        "csv": out_dir / f"{name}.csv",
        "json": out_dir / f"{name}.json",
        "trace": out_dir / f"{name}.trace.jsonl",
    }


def trials_frame(summary: ExperimentSummary) -> pd.DataFrame:
    rows = [report.csv_row() for block in summary.blocks for report in block.reports]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def write_reports(summary: ExperimentSummary, out_dir: Union[str, Path]) -> Dict[str, str]:
    """Write the CSV, JSON and trace files; returns their paths"""
    paths = report_paths(out_dir, summary.name)
    paths["csv"].parent.mkdir(parents=True, exist_ok=True)

    trials_frame(summary).to_csv(paths["csv"], index=False, lineterminator="\n")

    traces = [
        {"trial": report.trial, "trace": report.trace}
        for block in summary.blocks
        for report in block.reports
        if report.trace is not None
    ]
    files = {"csv": str(paths["csv"]), "json": str(paths["json"])}
    if traces:
        with paths["trace"].open("w", encoding="utf-8") as handle:
            for entry in traces:
                handle.write(json.dumps(entry, sort_keys=True) + "\n")
        files["trace"] = str(paths["trace"])

    summary.files = files
    paths["json"].write_text(
        json.dumps(summary.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    logger.info("wrote %s", ", ".join(files.values()))
    return files


def load_summary(csv_path: Union[str, Path]) -> ExperimentSummary:
    json_path = Path(csv_path).with_suffix(".json")
    if not json_path.exists():
        raise BadParams(f"no summary {json_path} next to {csv_path}")
    return ExperimentSummary.model_validate_json(json_path.read_text(encoding="utf-8"))


def verify_report(csv_path: Union[str, Path]) -> VerifyResult:
    """
    Recompute every trial error from the logged output label.

    Block failure counts in the JSON are also checked against the success
    column. Blocks marked non-recomputable (noisy histogram trials) are only
    counted.
    """
    csv_path = Path(csv_path)
    if not csv_path.exists():
        raise BadParams(f"no report at {csv_path}")
    summary = load_summary(csv_path)
    frame = pd.read_csv(csv_path, dtype=str, keep_default_na=False)
    if list(frame.columns) != CSV_COLUMNS:
        raise BadParams(f"unexpected CSV columns {list(frame.columns)}")

    dists: Dict[str, Dist] = {}

    def resolve(label: str) -> Dist:
        if label not in dists:
            if label not in summary.label_table:
                raise KeyError(label)
            dists[label] = Dist.from_text(summary.label_table[label])
        return dists[label]

    rows = frame.set_index(frame["trial"].astype(int))
    mismatches = []
    checked = skipped = 0
    for block in summary.blocks:
        window = rows.loc[block.trial_start:block.trial_end - 1]
        if len(window) != block.trials:
            mismatches.append(f"block {block.target_label}: expected {block.trials} rows, found {len(window)}")
            continue
        failures = int((window["success"] != "true").sum())
        if failures != block.failures:
            mismatches.append(f"block {block.target_label}: {failures} failing rows, summary says {block.failures}")
        if not block.recomputable:
            skipped += len(window)
            continue
        target = resolve(block.target_label)
        for trial, row in window.iterrows():
            logged = Fraction(int(row["error_num"]), int(row["error_den"]))
            try:
                recomputed = tv_distance(resolve(row["output_label"]), target)
            except KeyError:
                mismatches.append(f"trial {trial}: unknown output label {row['output_label']!r}")
                continue
            if recomputed != logged:
                mismatches.append(f"trial {trial}: logged error {logged}, recomputed {recomputed}")
            checked += 1

    result = VerifyResult(rows=len(frame), checked=checked, skipped=skipped, mismatches=mismatches)
    logger.info("verified %s: %d checked, %d skipped, %d mismatches", csv_path, checked, skipped, len(mismatches))
    return result
