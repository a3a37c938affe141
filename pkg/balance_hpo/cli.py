"""
CLI entry point for the balanced-HPO toolkit.

Usage:
    python -m balance_hpo tune --objective synthetic:ridge --total-budget 50
    python -m balance_hpo compare --spec data/specs/ridge_compare.json
    python -m balance_hpo loss eval data/batches/example.json --loss infonce --agg separate
    python -m balance_hpo metrics ap data/relevance/example.csv --metric AP@R
    python -m balance_hpo grid check data/grids/example_grid.csv
    python -m balance_hpo space reparam --lambda-p 0.008 --lambda-e 2 --batch-size 64
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from balance_hpo import __version__
from balance_hpo.config import HpoConfig
from balance_hpo.engine.coordinate_descent import BudgetPolicy, CdSettings, coordinate_descent
from balance_hpo.engine.history import TRIAL_CSV_COLUMNS, TrialHistory
from balance_hpo.engine.random_search import random_search, sample_log_uniform
from balance_hpo.exceptions import HpoError, InvalidConfig
from balance_hpo.harness.comparison import run_comparison
from balance_hpo.harness.dashboard import ResultsDashboard
from balance_hpo.harness.run_recorder import RunRecorder
from balance_hpo.harness.spec import load_comparison_spec
from balance_hpo.losses.contrastive import (
    BalanceCoeffs,
    InfoNceParams,
    MarginParams,
    balanced_loss,
    global_average_coeffs_from_counts,
    partition_pairs,
    separate_average_coeffs,
)
from balance_hpo.losses.io import load_batch
from balance_hpo.metrics.retrieval import Metric, load_relevance, mean_metric, per_query_metric
from balance_hpo.objectives.factory import default_space, make_objective
from balance_hpo.objectives.grid import grid_hull, grid_interpolate, grid_load
from balance_hpo.space.loader import load_search_space
from balance_hpo.space.reparam import HyperConfig, from_reparam, parse_matrix, reparam_table, to_reparam

logger = logging.getLogger(__name__)

# Human output on stderr; stdout stays clean for CSV and numbers.
console = Console(stderr=True)


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def handle_errors(fn):
    """Turn toolkit errors into a red diagnostic and exit status 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (HpoError, OSError) as e:
            console.print(f"[red]Error:[/red] {e}")
            sys.exit(1)

    return wrapper


def _parse_floats(text: str, count: Optional[int] = None, what: str = "value") -> list:
    try:
        values = [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise InvalidConfig(f"{what} must be comma-separated numbers, got {text!r}") from None
    if count is not None and len(values) != count:
        raise InvalidConfig(f"{what} needs {count} numbers, got {len(values)}")
    return values


@click.group()
@click.version_option(__version__, prog_name="balance-hpo")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging (every probe and cache hit)")
@click.pass_context
def cli(ctx: click.Context, verbose: bool):
    """Balanced contrastive losses and reparameterized coordinate-descent HPO."""
    try:
        config = HpoConfig.from_env()
        config.validate()
    except ValueError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        sys.exit(1)
    _setup_logging("DEBUG" if verbose else config.log_level)
    ctx.obj = config


# --- loss ---


@cli.group()
def loss():
    """Positive / entropy decomposition of contrastive losses."""


@loss.command("eval")
@click.argument("batch_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--loss", "loss_name", type=click.Choice(["margin", "infonce"]), default="margin", show_default=True)
@click.option("--m", "margin", type=float, default=0.5, show_default=True, help="Margin (margin loss)")
@click.option("--q", "exponent", type=click.IntRange(1, 2), default=1, show_default=True, help="Hinge exponent")
@click.option("--tau", type=float, default=0.1, show_default=True, help="Temperature (InfoNCE)")
@click.option("--lambda-p", type=float, help="Positive-term weight")
@click.option("--lambda-e", type=float, help="Entropy-term weight")
@click.option("--agg", type=click.Choice(["global", "separate"]), help="Aggregation preset instead of explicit weights")
@handle_errors
def loss_eval(batch_file, loss_name, margin, exponent, tau, lambda_p, lambda_e, agg):
    """Print ℓ̄p, ℓ̄e and the combined loss of a labelled batch."""
    batch = load_batch(batch_file)
    if agg == "global":
        partition = partition_pairs(batch.labels, batch.mask)
        coeffs = global_average_coeffs_from_counts(partition.num_positive, partition.num_negative)
    elif agg == "separate":
        coeffs = separate_average_coeffs()
    else:
        if lambda_p is None or lambda_e is None:
            raise InvalidConfig("give --lambda-p and --lambda-e, or --agg {global|separate}")
        coeffs = BalanceCoeffs(lambda_p, lambda_e)

    params = MarginParams(margin=margin, exponent=exponent) if loss_name == "margin" else InfoNceParams(tau)
    terms, value = balanced_loss(batch, params, coeffs)
    click.echo(f"pos_term {terms.pos_term!r}")
    click.echo(f"ent_term {terms.ent_term!r}")
    click.echo(f"loss {value!r}")


# --- metrics ---


@cli.group()
def metrics():
    """Ranking metrics over binary relevance lists."""


@metrics.command("ap")
@click.argument("relevance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--metric", "metric_name", default="AP-topR", show_default=True, help="AP, AP-topR or AP@R")
@handle_errors
def metrics_ap(relevance_file, metric_name):
    """Per-query and mean AP-family values."""
    metric = Metric.parse(metric_name)
    queries = load_relevance(relevance_file)
    for q, value in enumerate(per_query_metric(queries, metric), start=1):
        click.echo(f"{q},{'' if value is None else repr(value)}")
    mean, skipped = mean_metric(queries, metric)
    click.echo(f"mean,{mean!r}")
    if skipped:
        console.print(f"[yellow]{skipped} queries without relevant items were skipped[/yellow]")


# --- grid ---


@cli.group()
def grid():
    """Precomputed performance grids."""


@grid.command("check")
@click.argument("grid_file", type=click.Path(exists=True, dir_okay=False))
@handle_errors
def grid_check(grid_file):
    """Validate a grid file and describe it."""
    g = grid_load(grid_file)
    hull = grid_hull(g)
    best = np.unravel_index(int(np.argmax(g.scores)), g.shape)
    best_config = HyperConfig(*(float(axis[i]) for axis, i in zip(g.axes, best)))
    lines = [
        f"[bold]Shape:[/bold] {' x '.join(str(n) for n in g.shape)}",
        f"[bold]Metric:[/bold] {g.metric}",
        f"[bold]Active Dimensions:[/bold] {', '.join(hull.active_dims) or 'none'}",
        f"[bold]Best Node:[/bold] {best_config} -> {float(g.scores[best]):.6g}",
    ]
    lines.extend(f"[bold]{key}:[/bold] {value}" for key, value in sorted(g.metadata.items()) if key != "metric")
    console.print(Panel("\n".join(lines), title=f"[bold]{grid_file}[/bold]", border_style="green"))


@grid.command("eval")
@click.argument("grid_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--lambda-p", type=float, required=True)
@click.option("--lambda-e", type=float, required=True)
@click.option("--batch-size", type=float, required=True)
@handle_errors
def grid_eval(grid_file, lambda_p, lambda_e, batch_size):
    """Interpolated score at one configuration."""
    g = grid_load(grid_file)
    click.echo(repr(grid_interpolate(g, HyperConfig(lambda_p, lambda_e, batch_size))))


# --- space ---


@cli.group()
def space():
    """Search-space and reparameterization utilities."""


@space.command("reparam")
@click.option("--lambda-p", type=float, required=True)
@click.option("--lambda-e", type=float, required=True)
@click.option("--batch-size", type=float, required=True)
@click.option("--matrix", default="balance", show_default=True, help="Preset name or 9 numbers")
@handle_errors
def space_reparam(lambda_p, lambda_e, batch_size, matrix):
    """Show r = A·log h for a configuration."""
    h = HyperConfig(lambda_p, lambda_e, batch_size)
    a = parse_matrix(matrix)
    table = Table(title=f"[bold cyan]matrix {a.name}[/bold cyan] (det {a.determinant:g})", header_style="bold magenta")
    table.add_column("Direction", style="cyan")
    table.add_column("Row", style="dim")
    table.add_column("r", justify="right", style="green")
    for (label, value), row in zip(reparam_table(h, a).items(), a.rows):
        table.add_row(label, str(tuple(row)), f"{value:.6g}")
    console.print(table)
    back = from_reparam(to_reparam(h, a), a)
    console.print(f"[dim]round trip: {back}[/dim]")


# --- tune ---


def _resolve_start(start: str, search_space, seed: int) -> HyperConfig:
    if start == "random":
        return sample_log_uniform(search_space, np.random.default_rng(seed))
    if start == "center":
        return search_space.center()
    return HyperConfig.from_array(_parse_floats(start, 3, "--start"))


def _trial_csv(history: TrialHistory) -> str:
    frame = pd.DataFrame(history.to_rows(), columns=list(TRIAL_CSV_COLUMNS))
    frame["cached"] = frame["cached"].map({True: "true", False: "false"})
    return frame.to_csv(index=False, lineterminator="\n", float_format="%.10g")


@cli.command()
@click.option("--objective", "objective_ref", required=True, help="grid:<file> | synthetic:<preset-or-file> | cmd:\"<template>\"")
@click.option("--method", type=click.Choice(["cd", "random"]), default="cd", show_default=True)
@click.option("--matrix", default="balance", show_default=True, help="balance | identity | theory | 9 numbers")
@click.option("--budgets", help="Per-direction budgets c0,c1[,c2] (default 3 each)")
@click.option("--total-budget", type=click.IntRange(min=0), default=50, show_default=True)
@click.option("--space", "space_file", type=click.Path(exists=True, dir_okay=False), help="Search-space file")
@click.option("--dims", type=click.Choice(["2", "3"]), default="2", show_default=True, help="Default space when --space is omitted")
@click.option("--start", default="random", show_default=True, help="Λp,Λe,b | random | center")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reverse", is_flag=True, help="Search the direction rows in reverse order")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write the trial log here instead of stdout")
@click.pass_obj
@handle_errors
def tune(config: HpoConfig, objective_ref, method, matrix, budgets, total_budget, space_file, dims, start, seed, reverse, output):
    """Run one HPO trajectory and emit its trial log as CSV."""
    objective = make_objective(objective_ref, config)
    search_space = load_search_space(space_file) if space_file else default_space(objective, dims=int(dims))

    if method == "random":
        history = random_search(objective, search_space, total_budget, seed=seed)
    else:
        active = len(search_space.active_dims)
        initial = [int(c) for c in _parse_floats(budgets, what="--budgets")] if budgets else [3] * (3 if active == 3 else 2)
        settings = CdSettings(
            start=_resolve_start(start, search_space, seed),
            space=search_space,
            matrix=parse_matrix(matrix),
            policy=BudgetPolicy(
                initial=tuple(initial),
                total=total_budget,
                slope_threshold=config.slope_threshold,
                multiplier=config.budget_multiplier,
            ),
            reverse=reverse,
        )
        history = coordinate_descent(objective, settings)

    text = _trial_csv(history)
    if output:
        with open(output, "w", newline="", encoding="utf-8") as f:
            f.write(text)
        console.print(f"[dim]Trial log written to {output}[/dim]")
    else:
        click.echo(text, nl=False)
    ResultsDashboard(console).show_tune_result(history)


# --- compare ---


@cli.command()
@click.option("--spec", "spec_file", required=True, type=click.Path(exists=True, dir_okay=False), help="Comparison spec (or a previous report.json)")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Output directory (default: dated run dir)")
@click.option("--trajectories", type=click.IntRange(min=1), help="Override the spec's trajectory count")
@click.option("--workers", type=click.IntRange(min=1), help="Override the spec's worker count")
@click.pass_obj
@handle_errors
def compare(config: HpoConfig, spec_file, out_dir, trajectories, workers):
    """Race HPO methods over many trajectories and report AUC@k and n-95."""
    spec = load_comparison_spec(spec_file, config).with_overrides(trajectories=trajectories, max_workers=workers)
    result = run_comparison(spec, config)
    run_dir = RunRecorder(config.output_dir).record_run(result, Path(out_dir) if out_dir else None)
    ResultsDashboard(console).show_comparison(result)
    console.print(f"[green]✓[/green] Report saved to {run_dir}")


@cli.command()
@click.pass_obj
def config_show(config: HpoConfig):
    """Show current configuration."""
    console.print(
        Panel(
            f"[bold]Output Dir:[/bold] {config.output_dir}\n"
            f"[bold]Max Workers:[/bold] {config.max_workers}\n"
            f"[bold]Trajectories:[/bold] {config.trajectories}\n"
            f"[bold]AUC Checkpoints:[/bold] {', '.join(str(k) for k in config.auc_checkpoints)}\n"
            f"[bold]Slope Threshold:[/bold] {config.slope_threshold}\n"
            f"[bold]Budget Multiplier:[/bold] {config.budget_multiplier}\n"
            f"[bold]Command Timeout:[/bold] {config.command_timeout:g}s\n"
            f"[bold]Command Env Vars:[/bold] {config.env_lambda_p}, {config.env_lambda_e}, {config.env_batch_size}\n"
            f"[bold]Log Level:[/bold] {config.log_level}",
            title="[bold]Current Configuration[/bold]",
            border_style="blue",
        )
    )


if __name__ == "__main__":
    cli()
