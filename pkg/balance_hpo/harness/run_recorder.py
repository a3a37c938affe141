"""
Run Recorder - saves comparison results to structured directories.

Without an explicit output directory each run gets a dated folder:
hpo_runs/
├── 2026-02-17_run_001/
│   ├── summary.csv
│   ├── summary.md
│   ├── report.json
│   ├── metadata.json
│   └── curves/
│       └── <method>.csv

Every CSV uses '.' as decimal separator and LF line endings; summary.csv,
curves/*.csv and report.json depend only on the spec, so reruns are
byte-identical. metadata.json carries the wall-clock details.
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import pandas as pd

from balance_hpo import __version__
from balance_hpo.harness.comparison import ComparisonResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _write_text(text: str, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(text)


def summary_frame(result: ComparisonResult) -> pd.DataFrame:
    """Table layout: method, AUC@k per checkpoint, n95."""
    rows = []
    for report in result.reports:
        row: Dict[str, Any] = {"method": report.name}
        for k in result.spec.auc_checkpoints:
            row[f"auc@{k}"] = report.auc[k]
        row["n95"] = report.n95_label
        rows.append(row)
    return pd.DataFrame(rows)


def curve_frame(mean_curve) -> pd.DataFrame:
    return pd.DataFrame({"trial": range(1, len(mean_curve) + 1), "mean_best_so_far": mean_curve})


def build_summary_markdown(result: ComparisonResult, run_id: str = "") -> str:
    spec = result.spec
    checkpoints = spec.auc_checkpoints
    title = f"# Comparison Run: {run_id}" if run_id else "# Comparison"
    lines = [
        title,
        "",
        "## Setup",
        "",
        "| Setting | Value |",
        "|--------|-------|",
        f"| **Objective** | `{spec.objective}` |",
        f"| **Budget** | {spec.budget} trials |",
        f"| **Trajectories** | {spec.trajectories} |",
        f"| **Base Seed** | {spec.base_seed} |",
        f"| **Active Dimensions** | {', '.join(result.space.active_dims)} |",
        f"| **n-95 Threshold** | {result.n95_threshold:.6g} |",
        "",
        "## Results",
        "",
        "| Method | " + " | ".join(f"AUC@{k}" for k in checkpoints) + " | n-95 | Cache Hit Rate |",
        "|--------|" + "-------|" * (len(checkpoints) + 2),
    ]
    for report in result.reports:
        aucs = " | ".join(f"{report.auc[k]:.4f}" for k in checkpoints)
        lines.append(
            f"| **{report.name}** | {aucs} | {report.n95_label} | {report.cache.hit_rate:.1f}% |"
        )

    lines.extend(["", "## Methods", ""])
    for method in spec.methods:
        if method.kind == "random":
            lines.append(f"- **{method.name}**: random search (log-uniform)")
        else:
            budgets = ",".join(str(c) for c in method.budgets) if method.budgets else "default"
            order = " reversed" if method.reverse else ""
            lines.append(
                f"- **{method.name}**: coordinate descent, matrix `{method.matrix}`, budgets {budgets}{order}"
            )
    lines.append("")
    return "\n".join(lines)


def emit_report(result: ComparisonResult, out_dir: Path) -> Dict[str, Path]:
    """Write summary.csv, curves/<method>.csv, report.json and summary.md into out_dir."""
    out_dir = Path(out_dir)
    try:
        (out_dir / "curves").mkdir(parents=True, exist_ok=True)
        paths = {"summary_csv": out_dir / "summary.csv", "report_json": out_dir / "report.json"}
        _write_csv(summary_frame(result), paths["summary_csv"])

        for report in result.reports:
            path = out_dir / "curves" / f"{report.name}.csv"
            _write_csv(curve_frame(report.mean_curve), path)
            paths[f"curve:{report.name}"] = path

        _write_text(json.dumps(result.to_dict(), indent=2) + "\n", paths["report_json"])

        paths["summary_md"] = out_dir / "summary.md"
        _write_text(build_summary_markdown(result, out_dir.name), paths["summary_md"])
    except OSError as e:
        raise OSError(f"cannot write report to {out_dir}: {e}") from e

    logger.info(f"Report written to {out_dir}")
    return paths


class RunRecorder:
    """Records comparison runs to structured directories."""

    def __init__(self, base_dir: Optional[Path] = None):
        self.base_dir = Path(base_dir or "hpo_runs")

    def record_run(self, result: ComparisonResult, out_dir: Optional[Path] = None) -> Path:
        """
        Record a finished comparison.

        Args:
            result: ComparisonResult from run_comparison
            out_dir: Exact directory to write; a dated run directory when omitted

        Returns:
            Path to the run directory
        """
        run_dir = Path(out_dir) if out_dir else self._create_run_dir()
        emit_report(result, run_dir)

        metadata = {
            "run_id": run_dir.name,
            "created_at": datetime.now().isoformat(),
            "version": __version__,
            "methods": [r.name for r in result.reports],
        }
        _write_text(json.dumps(metadata, indent=2) + "\n", run_dir / "metadata.json")
        return run_dir

    def _create_run_dir(self) -> Path:
        """Create a new run directory with incrementing number."""
        self.base_dir.mkdir(parents=True, exist_ok=True)
        today = datetime.now().strftime("%Y-%m-%d")
        existing = list(self.base_dir.glob(f"{today}_run_*"))
        run_dir = self.base_dir / f"{today}_run_{len(existing) + 1:03d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        return run_dir
