"""MMWaveMC Command Line Interface.

Typer application with rich output formatting. Each study subcommand
loads and validates the configuration, runs the study and writes its CSV
table to ``--out`` (or stdout). Diagnostics and summary tables go to
stderr so stdout carries nothing but CSV.
"""

from importlib import resources
from pathlib import Path
from typing import Any, List, Optional

import typer
import yaml
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from MMWaveMC import studies
from MMWaveMC.config_models import ExperimentConfig
from MMWaveMC.constants import VERSION
from MMWaveMC.helpers import hconfigs, hlogging
from MMWaveMC.models.evaluation import SelectionSetting
from MMWaveMC.stores.csvstore import CsvStore, format_row, render

# Create the main app
app = typer.Typer(
    name="mmwavemc",
    help="MMWaveMC - matrix-completion channel estimation studies for switch-based mmWave MIMO",
    add_completion=False,
    rich_markup_mode="rich",
)

console = Console(stderr=True)

# Quiet mode flag (set via callback)
_quiet_mode = False

# Rows shown in a summary table before it is cut short
_MAX_SUMMARY_ROWS = 40


CONFIG_OPTION = typer.Option(
    None, "--config", "-c", help="Path to the experiment YAML file (base config when omitted)."
)
SEED_OPTION = typer.Option(None, "--seed", "-s", min=0, help="Override master_seed.")
OUT_OPTION = typer.Option(None, "--out", "-o", help="CSV output path (stdout when omitted).")
TRIALS_OPTION = typer.Option(None, "--trials", "-t", min=1, help="Override every trial count.")
RECORDS_OPTION = typer.Option(None, "--records", "-r", help="Also write per-trial records here.")


def version_callback(value: bool):
    """Show version and exit."""
    if value:
        console.print(f"[bold blue]MMWaveMC[/bold blue] version [green]{VERSION}[/green]")
        raise typer.Exit()


def quiet_callback(value: bool):
    """Enable quiet mode."""
    global _quiet_mode
    _quiet_mode = bool(value)


def config_template() -> str:
    """Return the commented configuration template shipped with the package."""
    return resources.files("MMWaveMC").joinpath("config.template.yaml").read_text(encoding="utf-8")


def _print(message: str, style: str = "") -> None:
    """Print message unless in quiet mode."""
    if not _quiet_mode:
        if style:
            console.print(f"[{style}]{message}[/{style}]")
        else:
            console.print(message)


@app.callback()
def main(
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        "-v",
        help="Show version and exit.",
        callback=version_callback,
        is_eager=True,
    ),
    quiet: Optional[bool] = typer.Option(
        None,
        "--quiet",
        "-q",
        help="Suppress summary tables and progress messages.",
        callback=quiet_callback,
        is_eager=True,
    ),
):
    """
    [bold blue]MMWaveMC[/bold blue] - channel estimation by matrix completion

    Reproduces the convergence, stopping-rule, NMSE, spectral-efficiency and
    miss-probability studies of the SVP estimator against OMP baselines.

    [dim]Use --help on any command for more information.[/dim]
    """
    pass


def _load(config: Optional[Path], seed: Optional[int], trials: Optional[int]) -> ExperimentConfig:
    """Load, validate and override the configuration; exit 1 with diagnostics on failure."""
    try:
        cfg = hconfigs.load_config(config)
        cfg = cfg.with_overrides(master_seed=seed, trials=trials)
    except FileNotFoundError as e:
        console.print(f"[red]Error:[/red] {e}")
        console.print("[dim]Run: mmwavemc init[/dim]")
        raise typer.Exit(1)
    except yaml.YAMLError as e:
        console.print(f"[red]Error:[/red] YAML syntax error: {e}")
        raise typer.Exit(1)
    except ValidationError as e:
        _print_validation_errors(e)
        raise typer.Exit(1)
    except ValueError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(1)

    if not hlogging.configure_from_env():
        hlogging.configure_logging(cfg.logger.model_dump())
    return cfg


def _print_validation_errors(error: ValidationError) -> None:
    console.print(f"[red]✗[/red] Configuration invalid ({error.error_count()} error(s))")
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        console.print(f"  [red]•[/red] [cyan]{location}[/cyan]: {item['msg']}")


def _emit(
    result: studies.StudyResult,
    cfg: ExperimentConfig,
    out: Optional[Path],
    records: Optional[Path] = None,
) -> None:
    """Write the study CSV (and optional records CSV) and show the summary table."""
    digest = cfg.digest()
    if out is None:
        typer.echo(render(result.header, result.rows, digest), nl=False)
    else:
        CsvStore(str(out)).write(result.header, result.rows, digest)
        _print(f"[green]✓[/green] Wrote {len(result.rows)} rows to {out}")

    if records is not None:
        header, rows = studies.records_table(result.records)
        CsvStore(str(records)).write(header, rows, digest)
        _print(f"[green]✓[/green] Wrote {len(rows)} records to {records}")

    if not _quiet_mode:
        header, rows = result.summary
        _display_table(f"{result.name} (config {digest})", header, rows)


def _display_table(title: str, header: List[str], rows: List[List[Any]]) -> None:
    table = Table(title=title)
    for k, name in enumerate(header):
        table.add_column(name, style="cyan" if k == 0 else "green", justify="right")
    for row in rows[:_MAX_SUMMARY_ROWS]:
        table.add_row(*format_row(row))
    console.print(table)
    if len(rows) > _MAX_SUMMARY_ROWS:
        console.print(f"[dim]... {len(rows) - _MAX_SUMMARY_ROWS} more rows in the CSV[/dim]")


def _run(study_name: str, func, cfg: ExperimentConfig, *args):
    """Run a study; module errors become diagnostics and exit code 1."""
    _print(f"[bold]Running {study_name}[/bold] (master_seed={cfg.master_seed})")
    try:
        return func(cfg, *args)
    except ValueError as e:
        console.print(f"[red]Error:[/red] {study_name} failed: {e}")
        raise typer.Exit(1)


@app.command()
def convergence(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
):
    """
    [bold]Convergence[/bold]: mean NMSE per SVP iteration for each step size and density.

    [dim]Examples:[/dim]

        mmwavemc convergence -c experiment.yaml -o convergence.csv
    """
    cfg = _load(config, seed, trials)
    result = _run("convergence", studies.run_convergence_study, cfg)
    _emit(result, cfg, out)


@app.command()
def stopping(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
):
    """
    [bold]Stopping[/bold]: histogram of SVP iterations-to-stop at each PNR.
    """
    cfg = _load(config, seed, trials)
    result = _run("stopping", studies.run_stopping_study, cfg)
    _emit(result, cfg, out)


@app.command()
def nmse(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    records: Optional[Path] = RECORDS_OPTION,
):
    """
    [bold]NMSE[/bold]: SVP against unitary and redundant OMP over PNR and phase mismatch.
    """
    cfg = _load(config, seed, trials)
    result = _run("nmse", studies.run_nmse_comparison, cfg)
    _emit(result, cfg, out, records)


@app.command()
def se(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
    records: Optional[Path] = RECORDS_OPTION,
    setting: SelectionSetting = typer.Option(
        SelectionSetting.A,
        "--setting",
        help="A: MS antenna selection with a fully digital BS; B: joint selection.",
    ),
):
    """
    [bold]SE[/bold]: spectral efficiency with antenna selection driven by each estimate.
    """
    cfg = _load(config, seed, trials)
    result = _run(f"se (setting {setting.value})", studies.run_se_study, cfg, setting.value)
    _emit(result, cfg, out, records)


@app.command()
def missprob(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
):
    """
    [bold]Miss probability[/bold]: analytic and empirical row-miss probability of USS.
    """
    cfg = _load(config, seed, trials)
    result = _run("missprob", studies.run_miss_prob, cfg)
    _emit(result, cfg, out)


@app.command()
def incoherence(
    config: Optional[Path] = CONFIG_OPTION,
    seed: Optional[int] = SEED_OPTION,
    out: Optional[Path] = OUT_OPTION,
    trials: Optional[int] = TRIALS_OPTION,
):
    """
    [bold]Incoherence[/bold]: mean and worst-case mu of random channels per phase-error bound.
    """
    cfg = _load(config, seed, trials)
    result = _run("incoherence", studies.run_incoherence_study, cfg)
    _emit(result, cfg, out)


@app.command("validate-config")
def validate_config(
    config: Optional[Path] = CONFIG_OPTION,
):
    """
    [bold]Validate[/bold] an experiment configuration without running anything.

    Reports every schema error and every sampling divisibility violation.
    """
    console.print(
        Panel.fit("[bold blue]MMWaveMC Configuration Check[/bold blue]", border_style="blue")
    )
    cfg = _load(config, None, None)

    table = Table(show_header=False)
    table.add_column("Property", style="cyan")
    table.add_column("Value", style="green")
    dims = cfg.dimensions
    table.add_row("Arrays", f"N_MS={dims.n_ms} N_BS={dims.n_bs}")
    table.add_row("RF chains", f"N_RF_MS={dims.n_rf_ms} N_RF_BS={dims.n_rf_bs}")
    table.add_row("Samples", f"M={cfg.num_samples} (p={cfg.density:g})")
    table.add_row("Paths", str(cfg.channel.num_paths))
    table.add_row("Master seed", str(cfg.master_seed))
    table.add_row("Digest", cfg.digest())
    console.print(table)
    console.print("[green]✓[/green] Configuration valid")


@app.command()
def init(
    output: Path = typer.Option(
        "config.yaml",
        "--output",
        "-o",
        help="Output path for configuration file.",
    ),
    force: bool = typer.Option(
        False,
        "--force",
        "-f",
        help="Overwrite existing file.",
    ),
):
    """
    [bold]Initialize[/bold] a new experiment configuration file.
    """
    if output.exists() and not force:
        console.print(f"[red]Error:[/red] File already exists: {output}")
        console.print("[dim]Use --force to overwrite.[/dim]")
        raise typer.Exit(1)

    with open(output, "w", encoding="utf-8") as f:
        f.write(config_template())

    console.print(f"[green]✓[/green] Configuration file created: {output}")
    console.print("\n[dim]Next steps:[/dim]")
    console.print("  1. Edit the dimensions, sweeps and trial counts")
    console.print(f"  2. Run: [cyan]mmwavemc validate-config -c {output}[/cyan]")
    console.print(f"  3. Run: [cyan]mmwavemc nmse -c {output} -o nmse.csv[/cyan]")


def cli_main():
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    cli_main()
