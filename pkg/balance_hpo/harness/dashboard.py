"""
Rich console views for tuning and comparison results.

Usage:
    dashboard = ResultsDashboard()
    dashboard.show_comparison(result)
"""

from typing import Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from balance_hpo.engine.history import TrialHistory
from balance_hpo.harness.comparison import ComparisonResult


class ResultsDashboard:
    """Plain-text tables only; curves go to CSV for external plotting."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console(stderr=True)

    def show_comparison(self, result: ComparisonResult) -> None:
        spec = result.spec
        table = Table(
            title=f"[bold cyan]{spec.objective}[/bold cyan] ({spec.trajectories} trajectories, budget {spec.budget})",
            show_header=True,
            header_style="bold magenta",
        )
        table.add_column("Method", style="cyan")
        for k in spec.auc_checkpoints:
            table.add_column(f"AUC@{k}", justify="right", style="green")
        table.add_column("n-95", justify="right", style="yellow")
        table.add_column("Final best (mean)", justify="right")
        table.add_column("Cache hits", justify="right", style="blue")

        best_auc = max(r.auc[max(spec.auc_checkpoints)] for r in result.reports)
        for report in result.reports:
            last_auc = report.auc[max(spec.auc_checkpoints)]
            table.add_row(
                report.name,
                *[f"{report.auc[k]:.4f}" for k in spec.auc_checkpoints],
                report.n95_label,
                f"{report.mean_curve[-1]:.4f}",
                f"{report.cache.hit_rate:.1f}%",
                style="bold" if last_auc == best_auc else None,
            )

        self.console.print()
        self.console.print(table)
        self.console.print(f"[dim]n-95 threshold: {result.n95_threshold:.6g}[/dim]")

    def show_tune_result(self, history: TrialHistory) -> None:
        best = history.best_trial()
        lines = [
            f"[bold]Method:[/bold] {history.method}",
            f"[bold]Trials:[/bold] {history.fresh_count} evaluated, {history.cached_count} from cache",
            f"[bold]Line Searches:[/bold] {len(history.line_searches)}",
        ]
        if best is not None:
            lines.append(f"[bold]Best Score:[/bold] {best.score:.6g} (trial {best.index})")
            lines.append(f"[bold]Best Config:[/bold] {best.config}")
        if history.cache_stats is not None:
            lines.append(f"[bold]Cache Hit Rate:[/bold] {history.cache_stats.hit_rate:.1f}%")

        self.console.print()
        self.console.print(
            Panel("\n".join(lines), title="[bold]Tuning Result[/bold]", border_style="green")
        )
