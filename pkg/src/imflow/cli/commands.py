"""Console commands for imflow."""
import logging
import sys
from typing import Any, Callable, Optional, Tuple

import click

from imflow import __version__
from imflow.adapters.csv_dataset import CsvDatasetAdapter
from imflow.adapters.file_report_writer import FORMATS, FileReportWriter
from imflow.adapters.jsonl_archivist import JsonLinesArchivist
from imflow.adapters.logging_archivist import LoggingArchivist
from imflow.cli.config import candidates_from_document, load_document, scenario_from_document
from imflow.core.errors import ImflowError, InvariantBreachError
from imflow.core.info_matrix import DEFAULT_TAU, IDENTITY_TOLERANCE, Mode
from imflow.core.layer_chain import ChainSettings
from imflow.core.mlp import Activation, MlpConfig
from imflow.core.probability import Discretizer, Strategy
from imflow.core.session import ToolkitSession
from imflow.logging_setup import configure_logging

_LOGGER = logging.getLogger(__name__)

MODES = [mode.value for mode in Mode]
ACTIVATIONS = [activation.value for activation in Activation]


def _numbers(kind: Callable[[str], Any]) -> Callable:
    def parse(ctx, param, value) -> Optional[Tuple]:
        if value is None:
            return None
        try:
            return tuple(kind(item) for item in value.split(",") if item.strip())
        except ValueError:
            raise click.BadParameter(f"expected comma-separated {kind.__name__} values, got {value!r}")
    return parse


def output_options(command):
    command = click.option("--events", type=click.Path(dir_okay=False),
                           help="Append run events to this JSON-lines file.")(command)
    command = click.option("--format", "output_format", type=click.Choice(FORMATS), default="json",
                           show_default=True, help="What goes to stdout when --out is not given.")(command)
    command = click.option("--out", type=click.Path(file_okay=False),
                           help="Directory for report.json and any CSV tables.")(command)
    return command


def _session(events: Optional[str]) -> ToolkitSession:
    archivists = [LoggingArchivist()]
    if events:
        archivists.append(JsonLinesArchivist(events))
    session = ToolkitSession(*archivists)
    session.set_dataset_loader(CsvDatasetAdapter())
    return session


def _run(events: Optional[str], out: Optional[str], output_format: str,
         work: Callable[[ToolkitSession], Any]) -> None:
    """Run one command and map its outcome to the process exit code."""
    ctx = click.get_current_context()
    session = _session(events)
    try:
        session.set_report_writer(FileReportWriter(out_dir=out, stream=sys.stdout, output_format=output_format))
        work(session)
    except ImflowError as e:
        _LOGGER.debug("%s failed", ctx.info_name, exc_info=True)
        click.echo(f"error: {e}", err=True)
        session.finish(e.exit_code)
        ctx.exit(e.exit_code)
    except Exception as e:
        _LOGGER.exception("%s failed unexpectedly", ctx.info_name)
        click.echo(f"internal error: {e}", err=True)
        session.finish(InvariantBreachError.exit_code)
        ctx.exit(InvariantBreachError.exit_code)
    session.finish(0)


@click.group()
@click.version_option(__version__, prog_name="imflow")
def main():
    """Information matrices of transformations, channels and MLP layers."""
    configure_logging()


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--x", "x_columns", multiple=True, required=True, help="Column assigned to X (repeatable).")
@click.option("--t", "t_columns", multiple=True, required=True, help="Column assigned to T (repeatable).")
@click.option("--y", "y_column", required=True, help="The target column.")
@click.option("--bins", type=int, default=16, show_default=True, help="Bins per dimension.")
@click.option("--strategy", type=click.Choice([s.value for s in Strategy]), default="uniform", show_default=True)
@click.option("--exact", is_flag=True, help="Take X and T values as symbols instead of binning them.")
@click.option("--mode", type=click.Choice(MODES), default="det", show_default=True)
@click.option("--tol", type=float, default=IDENTITY_TOLERANCE, show_default=True)
@click.option("--tau", type=float, default=DEFAULT_TAU, show_default=True)
@output_options
def analyze(dataset, x_columns, t_columns, y_column, bins, strategy, exact, mode, tol, tau,
            out, output_format, events):
    """Information matrix of the T columns of DATASET as a transformation of X, against Y."""
    _run(events, out, output_format, lambda session: session.analyze(
        dataset, x_columns, t_columns, y_column, Discretizer(Strategy(strategy), bins),
        exact, Mode(mode), tol, tau))


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--samples", type=int, default=None, help="Sampled rows to write (overrides the config).")
@click.option("--seed", type=int, default=None, help="Sampling seed (overrides the config).")
@click.option("--mode", type=click.Choice(MODES), default="det", show_default=True)
@click.option("--tol", type=float, default=IDENTITY_TOLERANCE, show_default=True)
@click.option("--tau", type=float, default=DEFAULT_TAU, show_default=True)
@output_options
def simulate(config, samples, seed, mode, tol, tau, out, output_format, events):
    """Exact analysis of the scenario described by CONFIG, with optional samples."""
    def work(session):
        request = scenario_from_document(load_document(config))
        session.simulate(
            request.scenario, Mode(mode), tol, tau,
            request.samples if samples is None else samples,
            request.seed if seed is None else seed,
            {"config": str(config)},
        )
    _run(events, out, output_format, work)


@main.command("train-chain")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--x", "x_columns", multiple=True, required=True, help="Input column (repeatable).")
@click.option("--y", "y_column", required=True, help="Binary target column.")
@click.option("--hidden", callback=_numbers(int), default="6,3", show_default=True, help="Hidden layer widths.")
@click.option("--activation", type=click.Choice(ACTIVATIONS), default="sigmoid", show_default=True)
@click.option("--learning-rate", type=float, default=2.0, show_default=True)
@click.option("--epochs", type=int, default=2000, show_default=True)
@click.option("--batch-size", type=int, default=32, show_default=True)
@click.option("--snapshots", callback=_numbers(int), default=None,
              help="Snapshot epochs [default: 0 and the last epoch].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--bins", type=int, default=16, show_default=True)
@click.option("--tau", type=float, default=0.1, show_default=True)
@click.option("--epsilon", type=float, default=0.05, show_default=True, help="Chain tolerance in bits.")
@click.option("--tol", type=float, default=IDENTITY_TOLERANCE, show_default=True)
@click.option("--max-units", type=int, default=8, show_default=True, help="Units measured per layer.")
@click.option("--holdout", type=float, default=0.0, show_default=True,
              help="Fraction of rows held out; chains are then measured on them.")
@output_options
def train_chain(dataset, x_columns, y_column, hidden, activation, learning_rate, epochs, batch_size,
                snapshots, seed, bins, tau, epsilon, tol, max_units, holdout, out, output_format, events):
    """Train an MLP on DATASET and measure its layer chain at each snapshot."""
    def work(session):
        config = MlpConfig(
            layer_widths=(len(x_columns),) + tuple(hidden) + (1,),
            activations=activation,
            seed=seed,
            learning_rate=learning_rate,
            epochs=epochs,
            batch_size=batch_size,
            snapshot_epochs=(0, epochs) if snapshots is None else snapshots,
        )
        settings = ChainSettings(bins, tau, epsilon, tol, max_units)
        session.train_chain(dataset, x_columns, y_column, config, settings, holdout)
    _run(events, out, output_format, work)


@main.command("objective-sweep")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--alphas", callback=_numbers(float), default=None, help="Alpha grid (overrides the config).")
@click.option("--betas", callback=_numbers(float), default=None, help="Beta grid (overrides the config).")
@output_options
def objective_sweep(config, alphas, betas, out, output_format, events):
    """Select among the candidates of CONFIG over alpha and beta grids."""
    def work(session):
        request = candidates_from_document(load_document(config))
        session.objective_sweep(
            request.candidates,
            request.alphas if alphas is None else alphas,
            request.betas if betas is None else betas,
            {"config": str(config)},
        )
    _run(events, out, output_format, work)


@main.command("grad-check")
@click.option("--widths", callback=_numbers(int), default="8,8,4,1", show_default=True)
@click.option("--activation", type=click.Choice(ACTIVATIONS), default="sigmoid", show_default=True)
@click.option("--models", type=int, default=20, show_default=True)
@click.option("--samples", type=int, default=16, show_default=True)
@click.option("--eps", type=float, default=1e-5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@output_options
def grad_check(widths, activation, models, samples, eps, seed, out, output_format, events):
    """Compare backpropagated gradients with finite differences on random models."""
    _run(events, out, output_format, lambda session: session.grad_check(
        widths, Activation(activation), models, samples, eps, seed))
