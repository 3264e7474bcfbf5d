#!/usr/bin/env python3
"""
SS-OTFS CLI - Command-line interface for the spatially-spread OTFS ISAC simulator.
"""
import argparse
import logging
import signal
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

try:
    import mlflow

    MLFLOW_AVAILABLE = True
except ImportError:
    MLFLOW_AVAILABLE = False

from ssotfs_cli.__version__ import __version__
from ssotfs_cli.harness.config import ExperimentConfig, parse_config
from ssotfs_cli.harness.results import ResultTable, emit_csv, emit_metadata
from ssotfs_cli.harness.runner import run_experiment
from ssotfs_cli.utils.logging_utils import configure_global_logger
from ssotfs_cli.utils.monitor import ResourceMonitor

# Initialize Rich console
console = Console()


def print_banner():
    """Display the SS-OTFS banner."""
    banner = """
[bold cyan]╔═══════════════════════════════════════════════════════════════════╗
║                                                                   ║
║      ███████╗███████╗       ██████╗ ████████╗███████╗███████╗     ║
║      ██╔════╝██╔════╝      ██╔═══██╗╚══██╔══╝██╔════╝██╔════╝     ║
║      ███████╗███████╗█████╗██║   ██║   ██║   █████╗  ███████╗     ║
║      ╚════██║╚════██║╚════╝██║   ██║   ██║   ██╔══╝  ╚════██║     ║
║      ███████║███████║      ╚██████╔╝   ██║   ██║     ███████║     ║
║      ╚══════╝╚══════╝       ╚═════╝    ╚═╝   ╚═╝     ╚══════╝     ║
║                                                                   ║
║     [bold yellow]Spatially-Spread OTFS for Sensing-Assisted Transmission[/]      ║
║                    [dim]Monte-Carlo ISAC simulator[/]                     ║
║                                                                   ║
╚═══════════════════════════════════════════════════════════════════╝[/]
    """
    console.print(banner)
    console.print()


@contextmanager
def mlflow_run_context(use_mlflow: bool, config: ExperimentConfig):
    """Context manager to handle MLflow runs."""
    if use_mlflow:
        mlflow.set_tracking_uri(config.mlflow.tracking_uri)
        mlflow.set_experiment(config.mlflow.experiment_name)
        mlflow.start_run()
        try:
            yield
        finally:
            mlflow.end_run()
    else:
        yield


def display_config_panel(config: ExperimentConfig, out_path: Optional[Path] = None):
    """Display the effective configuration in a panel."""
    config_table = Table(show_header=False, box=box.SIMPLE, padding=(0, 2))
    config_table.add_column("Setting", style="cyan")
    config_table.add_column("Value", style="yellow")

    frame = config.frame
    config_table.add_row("🧪 Experiment", config.kind)
    config_table.add_row("🎲 Seed", str(config.seed))
    config_table.add_row("📐 Frame", f"M={frame.M}, N={frame.N}, N_BS={frame.n_bs}")
    config_table.add_row("📡 Users / paths", f"K={config.K}, P={config.P}")
    config_table.add_row("🔁 Trials", str(config.trials))
    config_table.add_row("🧵 Workers", str(config.threads))
    if out_path is not None:
        config_table.add_row("📁 Output", str(out_path))
    config_table.add_row("💾 Memory Limit", f"{config.monitor.memory_threshold / 1024**3:.1f} GB")
    config_table.add_row("⏱️  Timeout", f"{config.monitor.timeout} seconds")
    mlflow_status = "✅ Enabled" if config.mlflow.use and MLFLOW_AVAILABLE else "❌ Disabled"
    config_table.add_row("📈 MLflow", mlflow_status)

    console.print(
        Panel(
            config_table,
            title="[bold blue]⚙️  Configuration[/]",
            border_style="blue",
            padding=(1, 2),
        )
    )
    console.print()


def display_results(table: ResultTable, limit: int = 20) -> None:
    """Show the leading result rows."""
    results = Table(show_header=True, header_style="bold magenta", box=box.ROUNDED)
    results.add_column("Series", style="cyan")
    results.add_column("x", justify="right")
    results.add_column("Metric", style="green", justify="right")
    results.add_column("Trials", justify="right")
    results.add_column("± CI", style="yellow", justify="right")
    for row in table.rows[:limit]:
        results.add_row(
            row.series,
            f"{row.x:g}",
            f"{row.metric:.4g}",
            str(row.n_trials),
            f"{row.ci_half_width:.2g}",
        )
    console.print(results)
    if len(table) > limit:
        console.print(f"[dim]... {len(table) - limit} more rows in the CSV[/]")
    console.print()


def load_experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    path = Path(args.config)
    if not path.exists():
        logging.getLogger(__name__).error(f"Configuration file not found: {path}")
        raise FileNotFoundError(f"Configuration file not found: {path}")
    config = parse_config(path.read_text(encoding="utf-8"))
    return config.with_overrides(
        seed=getattr(args, "seed", None),
        threads=getattr(args, "threads", None),
        trials=getattr(args, "trials", None),
    )


def setup_signal_handlers(monitor: ResourceMonitor, logger: logging.Logger) -> None:
    """Set up signal handlers for graceful shutdown."""

    def handle_signal(signum, frame):
        console.print("\n[yellow]⚠️  Shutting down gracefully...[/]")
        logger.info(f"Received signal {signum}. Shutting down gracefully...")
        monitor.stop()
        raise KeyboardInterrupt

    signal.signal(signal.SIGINT, handle_signal)
    signal.signal(signal.SIGTERM, handle_signal)


def error_panel(message: str) -> None:
    console.print(
        Panel(
            f"[bold red]✗ An error occurred:[/]\n\n{message}",
            title="[bold red]Error[/]",
            border_style="red",
            padding=(1, 2),
        )
    )


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(
        prog="ssotfs",
        description="📡 SS-OTFS - sensing-assisted OTFS transmission experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  ssotfs run --config configs/fer.json --out results/fer.csv
  ssotfs run -c configs/miss_detection.json -o md.csv --threads 8 --trials 2000
  ssotfs validate --config config.json
  ssotfs --version
        """,
    )
    parser.add_argument("--version", action="version", version=f"SS-OTFS CLI {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run an experiment and write its CSV")
    run.add_argument("-c", "--config", default="config.json", help="Experiment configuration (JSON)")
    run.add_argument("-o", "--out", required=True, help="Output CSV path")
    run.add_argument("--seed", type=int, help="Override the configured seed")
    run.add_argument("--threads", type=int, help="Number of worker processes")
    run.add_argument("--trials", type=int, help="Override the trial count per point")
    run.add_argument("--log-dir", default="logs", help="Directory for ssotfs.log (default: logs)")
    run.add_argument("--progress", action="store_true", help="Show per-point progress bars")

    validate = subparsers.add_parser("validate", help="Check a configuration without running it")
    validate.add_argument("-c", "--config", default="config.json", help="Experiment configuration (JSON)")
    return parser.parse_args(argv)


def validate_command(args: argparse.Namespace) -> int:
    try:
        with console.status("[bold cyan]Validating configuration...", spinner="dots"):
            config = load_experiment_config(args)
    except Exception as e:
        error_panel(str(e))
        return 1
    display_config_panel(config)
    console.print(
        Panel(
            f"[bold green]✓ Configuration is valid[/]\n\n[cyan]Config hash:[/] {config.config_hash()}",
            border_style="green",
            padding=(1, 2),
        )
    )
    return 0


def run_command(args: argparse.Namespace) -> int:
    print_banner()
    try:
        with console.status("[bold cyan]Loading configuration...", spinner="dots"):
            config = load_experiment_config(args)
    except Exception as e:
        error_panel(str(e))
        return 1

    out_path = Path(args.out)
    display_config_panel(config, out_path)

    with console.status("[bold cyan]Initializing directories...", spinner="dots"):
        out_path.parent.mkdir(parents=True, exist_ok=True)
        Path(args.log_dir).mkdir(parents=True, exist_ok=True)

    logger = configure_global_logger(args.log_dir)

    # Determine MLflow usage
    use_mlflow = False
    if config.mlflow.use:
        if MLFLOW_AVAILABLE:
            use_mlflow = True
            logger.info("MLflow is enabled.")
            console.print("[green]✓[/] MLflow is enabled\n")
        else:
            logger.warning("MLflow is not available. Proceeding without MLflow.")
            console.print("[yellow]⚠[/] MLflow requested but not available\n")

    monitor = ResourceMonitor(config.monitor.memory_threshold, config.monitor.timeout)
    setup_signal_handlers(monitor, logger)

    console.print(Panel(f"[bold cyan]Running {config.kind}[/]", border_style="cyan"))
    console.print()
    try:
        monitor.start()
        logger.debug("Resource monitor started.")
        with mlflow_run_context(use_mlflow, config):
            start = time.perf_counter()
            if args.progress:
                table = run_experiment(config, progress=True)
            else:
                with console.status(f"[bold yellow]Simulating {config.kind}...", spinner="dots"):
                    table = run_experiment(config)
            wall_time = time.perf_counter() - start

            emit_csv(table, out_path)
            meta_path = emit_metadata(
                out_path,
                {
                    **table.sidecar,
                    "config": config.to_dict(),
                    "config_hash": config.config_hash(),
                    "seed": config.seed,
                    "version": __version__,
                    "wall_time_s": round(wall_time, 3),
                    "workers": config.threads,
                },
            )
            display_results(table)

            if use_mlflow:
                mlflow.log_param("kind", config.kind)
                mlflow.log_param("seed", config.seed)
                mlflow.log_param("config_hash", config.config_hash())
                mlflow.log_metric("rows", len(table))
                mlflow.log_metric("wall_time_s", wall_time)
                mlflow.log_artifact(str(out_path))
                mlflow.log_artifact(str(meta_path))

            console.print(
                Panel(
                    f"[bold green]✓ Experiment completed in {wall_time:.1f} s[/]\n\n"
                    f"📊 Results saved to: [cyan]{out_path}[/]\n"
                    f"📄 Metadata saved to: [cyan]{meta_path}[/]",
                    title="[bold green]Success[/]",
                    border_style="green",
                    padding=(1, 2),
                )
            )
            logger.info("Process completed successfully.")
            return 0
    except KeyboardInterrupt:
        reason = monitor.breach or "interrupted"
        error_panel(f"Run stopped ({reason})")
        logger.error(f"Run stopped ({reason})")
        return 1
    except Exception as e:
        error_panel(str(e))
        logger.error("An error occurred during the experiment.", exc_info=True)
        return 1
    finally:
        monitor.stop()
        if use_mlflow and mlflow.active_run():
            mlflow.end_run()
            logger.info("MLflow run ended.")


def main(argv: Optional[List[str]] = None) -> None:
    """Main entry point of the script."""
    args = parse_arguments(argv)
    if args.command == "validate":
        sys.exit(validate_command(args))
    sys.exit(run_command(args))


if __name__ == "__main__":
    main()
