import logging
from contextlib import contextmanager
from dataclasses import replace
from typing import Any, Dict, Iterator, Mapping, Optional, Sequence

import numpy as np

from imflow.adapters.null_adapter import NullDatasetLoader, NullReportWriter
from imflow.core import reports
from imflow.core.channels import Scenario, exact_joint, noise_bound_check, sample_channel
from imflow.core.errors import DatasetError, InvalidParameterError
from imflow.core.info_matrix import DEFAULT_TAU, IDENTITY_TOLERANCE, ConstraintReport, Mode, analyze
from imflow.core.layer_chain import ChainSettings, pathway_trajectory, snapshot_chains
from imflow.core.mlp import Activation, MlpConfig, accuracy, grad_check, init, train
from imflow.core.objectives import Candidate, objective_sweep
from imflow.core.probability import Discretizer, discretize, encode_rows, joint_from_samples
from imflow.ports.archivist_port import ArchivistPort
from imflow.ports.dataset_port import DatasetPort
from imflow.ports.report_writer_port import ReportWriterPort

_LOGGER = logging.getLogger(__name__)

GRAD_CHECK_LIMIT = 1e-4


class ToolkitSession:
    """
    Runs toolkit commands: loads inputs through a DatasetPort, computes with
    the core, emits through a ReportWriterPort and records run events to
    every archivist. Errors are recorded and re-raised.
    """

    def __init__(self, *archivists: ArchivistPort):
        """
        Args:
            *archivists: Optional archivists to add during initialization
        """
        self._report_writer: ReportWriterPort = NullReportWriter()
        self._dataset_loader: DatasetPort = NullDatasetLoader()
        self._archivists = archivists

    def set_report_writer(self, report_writer: ReportWriterPort) -> None:
        self._report_writer = report_writer

    def set_dataset_loader(self, dataset_loader: DatasetPort) -> None:
        self._dataset_loader = dataset_loader

    @contextmanager
    def _recording(self, command: str, arguments: Mapping[str, Any]) -> Iterator[None]:
        for archivist in self._archivists:
            archivist.record_command(command, arguments)
        try:
            yield
        except Exception as e:
            for archivist in self._archivists:
                archivist.record_error(e)
            raise

    def finish(self, exit_code: int) -> None:
        for archivist in self._archivists:
            archivist.record_finished(exit_code)
            archivist.close()

    def _warn(self, message: str) -> None:
        _LOGGER.warning(message)
        for archivist in self._archivists:
            archivist.record_warning(message)

    def _record_failures(self, constraints: ConstraintReport) -> None:
        for check in constraints.failures():
            for archivist in self._archivists:
                archivist.record_constraint_failure(check)

    def _emit(self, command: str, arguments: Mapping[str, Any], body: Mapping[str, Any],
              artifacts: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
        artifacts = {name: location for name, location in (artifacts or {}).items() if location}
        report = reports.envelope(command, arguments, body, artifacts)
        reports.validate_report(report)
        location = self._report_writer.write_report("report", report)
        for written in [location, *artifacts.values()]:
            if written:
                for archivist in self._archivists:
                    archivist.record_report(written)
        return report

    def analyze(self, dataset_path: str, x_columns: Sequence[str], t_columns: Sequence[str], y_column: str,
                discretizer: Discretizer = Discretizer(), exact: bool = False, mode: Mode = Mode.DETERMINISTIC,
                tol: float = IDENTITY_TOLERANCE, tau: float = DEFAULT_TAU) -> Dict[str, Any]:
        """
        Measure the information matrix of the T columns of a dataset as a
        transformation of its X columns, against the Y column.

        X and T are binned with `discretizer`, or dictionary-encoded when
        `exact` is set; Y is always taken as labels.
        """
        mode = Mode(mode)
        arguments = {
            "dataset": str(dataset_path), "x": list(x_columns), "t": list(t_columns), "y": y_column,
            "strategy": discretizer.strategy.value, "bins": discretizer.bins_per_dimension,
            "exact": exact, "mode": mode.value, "tol": tol, "tau": tau,
        }
        with self._recording("analyze", arguments):
            if not x_columns or not t_columns or not y_column:
                raise InvalidParameterError("X, T and Y roles must each name at least one column")
            dataset = self._dataset_loader.load(dataset_path)

            def symbols(columns):
                if exact:
                    return encode_rows(dataset.labels(columns))
                return discretize(dataset.numeric(columns), discretizer)

            table = joint_from_samples({
                "X": symbols(x_columns),
                "T": symbols(t_columns),
                "Y": encode_rows(dataset.labels([y_column]).reshape(-1)),
            })
            analysis = analyze(table, mode, tol, tau)
            self._record_failures(analysis.constraints)
            body = {"kind": "analysis", "samples": len(dataset), **reports.analysis_dict(analysis)}
            return self._emit("analyze", arguments, body)

    def simulate(self, scenario: Scenario, mode: Mode = Mode.DETERMINISTIC, tol: float = IDENTITY_TOLERANCE,
                 tau: float = DEFAULT_TAU, samples: int = 0, seed: int = 0,
                 arguments: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        """
        Analyse a scenario from its exact joint and, when samples > 0, write
        that many seeded draws of (x, t, y) as a table.

        Deterministic channels are evaluated as stochastic ones with point
        noise, so both kinds share one evaluation path.
        """
        mode = Mode(mode)
        arguments = {"scenario": scenario.name, "mode": mode.value, "tol": tol, "tau": tau,
                     "samples": samples, "seed": seed, **(arguments or {})}
        with self._recording("simulate", arguments):
            channel = scenario.channel if scenario.is_stochastic else scenario.channel.as_stochastic()
            evaluated = Scenario(scenario.joint_xy, channel, scenario.expected, scenario.name)
            analysis = analyze(exact_joint(evaluated), mode, tol, tau)
            self._record_failures(analysis.constraints)
            body = {
                "kind": "simulation",
                **reports.analysis_dict(analysis),
                "noise_bounds": reports.noise_bounds_dict(noise_bound_check(evaluated)),
            }
            if scenario.expected is not None:
                measured, expected = analysis.quantities.as_dict(), scenario.expected.as_dict()
                body["expected_max_residual"] = max(abs(measured[name] - expected[name]) for name in expected)
            artifacts = {}
            if samples:
                draws = sample_channel(evaluated, samples, seed)
                rows = np.column_stack([draws["X"], draws["T"], draws["Y"]])
                artifacts["samples"] = self._report_writer.write_table("samples", ("x", "t", "y"), rows)
            return self._emit("simulate", arguments, body, artifacts)

    def train_chain(self, dataset_path: str, x_columns: Sequence[str], y_column: str, config: MlpConfig,
                    settings: ChainSettings = ChainSettings(), holdout: float = 0.0) -> Dict[str, Any]:
        """
        Train an MLP on a dataset with a binary target and measure its layer
        chain at every snapshot epoch.

        Chains are measured on the training rows, or on the held-out rows when
        `holdout` reserves a fraction of the dataset.
        """
        if not config.snapshot_epochs:
            config = replace(config, snapshot_epochs=(config.epochs,))
        arguments = {
            "dataset": str(dataset_path), "x": list(x_columns), "y": y_column,
            "layer_widths": list(config.layer_widths),
            "activations": [activation.value for activation in config.activations],
            "seed": config.seed, "learning_rate": config.learning_rate, "epochs": config.epochs,
            "batch_size": config.batch_size, "snapshot_epochs": list(config.snapshot_epochs),
            "bins": settings.bins, "tau": settings.tau, "epsilon": settings.epsilon,
            "tol": settings.tol, "max_units": settings.max_units, "holdout": holdout,
        }
        with self._recording("train-chain", arguments):
            dataset = self._dataset_loader.load(dataset_path)
            inputs = dataset.numeric(x_columns)
            targets = dataset.numeric([y_column]).reshape(-1)
            if not np.isin(targets, (0.0, 1.0)).all():
                raise DatasetError(f"target column {y_column!r} must hold only 0 and 1")
            if inputs.shape[1] != config.layer_widths[0]:
                raise InvalidParameterError(
                    f"{inputs.shape[1]} input columns but the input layer has width {config.layer_widths[0]}")
            train_x, train_y, measure_x, measure_y = _split(inputs, targets, holdout, config.seed)
            training = train(init(config), train_x, train_y)
            chains = snapshot_chains(training, measure_x, measure_y, settings)
            for epoch, chain in chains.items():
                for entry in chain.entries:
                    self._record_failures(entry.analysis.constraints)
                if not chain.monotone:
                    self._warn(f"epoch {epoch}: layer chain not monotone within {settings.epsilon} bits")
            body = {
                "kind": "layer_chain",
                "measured_on": "holdout" if holdout else "training",
                "training": {
                    "epochs": config.epochs,
                    "final_loss": training.loss_history[-1],
                    "loss_history": list(training.loss_history),
                    "train_accuracy": accuracy(training.model, train_x, train_y),
                    "holdout_accuracy": accuracy(training.model, measure_x, measure_y) if holdout else None,
                },
                "snapshots": [{"epoch": epoch, **reports.chain_dict(chain)} for epoch, chain in chains.items()],
                "pathways": reports.pathways_dict(pathway_trajectory(chains)),
            }
            diagram = self._report_writer.write_table(
                "diagram", reports.DIAGRAM_HEADER, reports.diagram_rows(chains), primary=True)
            return self._emit("train-chain", arguments, body, {"diagram": diagram})

    def objective_sweep(self, candidates: Sequence[Candidate], alphas: Sequence[float] = (),
                        betas: Sequence[float] = (), arguments: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        arguments = {"alphas": list(alphas), "betas": list(betas), **(arguments or {})}
        with self._recording("objective-sweep", arguments):
            table = objective_sweep(candidates, alphas, betas)
            body = {"kind": "sweep", **reports.sweep_dict(table)}
            written = self._report_writer.write_table(
                "sweep", reports.SWEEP_HEADER, reports.sweep_rows(table), primary=True)
            return self._emit("objective-sweep", arguments, body, {"sweep": written})

    def grad_check(self, layer_widths: Sequence[int], activation: Activation = Activation.SIGMOID,
                   models: int = 20, samples: int = 16, eps: float = 1e-5, seed: int = 0) -> Dict[str, Any]:
        """Gradient-check `models` freshly initialised MLPs on random inputs and binary targets."""
        arguments = {"layer_widths": list(layer_widths), "activation": Activation(activation).value,
                     "models": models, "samples": samples, "eps": eps, "seed": seed}
        with self._recording("grad-check", arguments):
            if models < 1 or samples < 1:
                raise InvalidParameterError("models and samples must be positive")
            seeds = [seed + offset for offset in range(models)]
            results = []
            for model_seed in seeds:
                config = MlpConfig(tuple(layer_widths), activation, seed=model_seed)
                rng = np.random.default_rng([model_seed, 3])
                inputs = rng.normal(size=(samples, config.layer_widths[0]))
                targets = rng.integers(0, 2, size=(samples, config.layer_widths[-1]))
                results.append(grad_check(init(config), inputs, targets, eps))
            body = {"kind": "grad_check", **reports.grad_check_dict(results, seeds, eps)}
            body["passed"] = body["max_relative_error"] < GRAD_CHECK_LIMIT
            if not body["passed"]:
                self._warn(f"gradient check max relative error {body['max_relative_error']:.3g}")
            return self._emit("grad-check", arguments, body)


def _split(inputs: np.ndarray, targets: np.ndarray, holdout: float, seed: int):
    if not 0.0 <= holdout < 1.0:
        raise InvalidParameterError(f"holdout must lie in [0, 1), got {holdout}")
    if holdout == 0.0:
        return inputs, targets, inputs, targets
    order = np.random.default_rng([seed, 2]).permutation(len(inputs))
    cut = int(round(len(inputs) * (1.0 - holdout)))
    if cut < 1 or cut >= len(inputs):
        raise InvalidParameterError(f"holdout {holdout} leaves an empty split of {len(inputs)} rows")
    train_rows, held_rows = order[:cut], order[cut:]
    return inputs[train_rows], targets[train_rows], inputs[held_rows], targets[held_rows]
