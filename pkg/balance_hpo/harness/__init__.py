"""Comparison harness: specs, parallel trajectories, reports."""

from balance_hpo.harness.comparison import ComparisonResult, MethodReport, run_comparison, run_method
from balance_hpo.harness.parallel_executor import JobResult, TrajectoryExecutor, TrajectoryJob
from balance_hpo.harness.run_recorder import RunRecorder, build_summary_markdown, emit_report, summary_frame
from balance_hpo.harness.spec import ComparisonSpec, MethodSpec, load_comparison_spec

__all__ = [
    "ComparisonResult",
    "ComparisonSpec",
    "JobResult",
    "MethodReport",
    "MethodSpec",
    "RunRecorder",
    "TrajectoryExecutor",
    "TrajectoryJob",
    "build_summary_markdown",
    "emit_report",
    "load_comparison_spec",
    "run_comparison",
    "run_method",
    "summary_frame",
]
