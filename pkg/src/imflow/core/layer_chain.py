"""
Information chains through the layers of a trained MLP.

Each layer's activations are binned into a symbol T_k and analysed against
the raw input X and the target Y. The input itself contributes the initial
matrix IM[X], with all information still on the filtered-in side. Adjacent
layers are then compared for the monotonic chains of I(X;T_k), I(T_k;Y),
noise and loss, and for the ordering of their matrices.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from imflow.core.errors import EmptyTableError, InvalidParameterError
from imflow.core.info_matrix import (
    IDENTITY_TOLERANCE,
    MatrixAnalysis,
    Mode,
    analyze,
    analyze_quantities,
    identity_quantities,
)
from imflow.core.mlp import Activation, MlpModel, TrainingResult, forward
from imflow.core.probability import (
    ESTIMATOR,
    Discretizer,
    Strategy,
    discretize,
    encode_rows,
    joint_from_samples,
)

_LOGGER = logging.getLogger(__name__)

INPUT_LAYER = "input"

NON_INCREASING = "non-increasing"
NON_DECREASING = "non-decreasing"

# quantity -> direction it must move along the chain
CHAIN_DIRECTIONS = {
    "i_xxf": NON_INCREASING,
    "i_xyf": NON_INCREASING,
    "n_xyf": NON_INCREASING,
    "l_xyf": NON_DECREASING,
}


@dataclass(frozen=True)
class ChainSettings:
    """
    How layer activations are measured.

    Args:
        bins: uniform bins per unit over the activation's native range
        tau: pattern classification threshold
        epsilon: tolerance, in bits, of the chain and ordering checks
        tol: tolerance of the per-layer constraint checks
        max_units: wider layers are measured on their first max_units units (None = all)
    """
    bins: int = 16
    tau: float = 0.1
    epsilon: float = 0.05
    tol: float = IDENTITY_TOLERANCE
    max_units: Optional[int] = 8

    def __post_init__(self):
        if int(self.bins) != self.bins or self.bins < 2:
            raise InvalidParameterError(f"bins must be an integer >= 2, got {self.bins}")
        if not 0 < self.tau < 0.5:
            raise InvalidParameterError(f"tau must lie in (0, 0.5), got {self.tau}")
        if self.epsilon < 0 or self.tol < 0:
            raise InvalidParameterError("epsilon and tol must be non-negative")
        if self.max_units is not None and self.max_units < 1:
            raise InvalidParameterError(f"max_units must be positive, got {self.max_units}")


@dataclass(frozen=True)
class LayerEntry:
    """
    One step of the chain. `index` 0 is the input (IM[X]); 1..m+1 are the layers.

    `dpi_slack` is i_xyf - i_xxf, which must not be positive beyond 1e-9.
    """
    layer: str
    index: int
    analysis: MatrixAnalysis
    units_measured: int
    dpi_slack: float

    @property
    def dpi_holds(self) -> bool:
        return self.dpi_slack <= IDENTITY_TOLERANCE


@dataclass(frozen=True)
class ChainVerdict:
    """
    Movement of one chain quantity between two adjacent entries.

    `slack` is the amount, in bits, by which the expected direction is
    violated; the verdict holds when it does not exceed epsilon.
    """
    quantity: str
    direction: str
    source: str
    target: str
    slack: float
    holds: bool


@dataclass(frozen=True)
class OrderVerdict:
    """IM[source] >= IM[target]: target has no more noise and no less loss than source."""
    source: str
    target: str
    noise_slack: float
    loss_slack: float
    holds: bool


@dataclass(frozen=True)
class LayerChainReport:
    entries: Tuple[LayerEntry, ...]
    chains: Tuple[ChainVerdict, ...]
    order: Tuple[OrderVerdict, ...]
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def monotone(self) -> bool:
        return all(verdict.holds for verdict in self.chains)

    @property
    def ordered(self) -> bool:
        return all(verdict.holds for verdict in self.order)

    def entry(self, layer: str) -> LayerEntry:
        for candidate in self.entries:
            if candidate.layer == layer:
                return candidate
        raise KeyError(layer)


def native_range(activation: Activation, values: np.ndarray) -> Tuple[float, float]:
    if activation is Activation.SIGMOID:
        return 0.0, 1.0
    if activation is Activation.TANH:
        return -1.0, 1.0
    return 0.0, max(float(values.max()) if values.size else 0.0, 0.0)


def _layer_symbols(activations: np.ndarray, activation: Activation, settings: ChainSettings,
                   layer: str) -> Tuple[np.ndarray, int]:
    units = activations.shape[1]
    if settings.max_units is not None and units > settings.max_units:
        _LOGGER.warning("layer %s has %d units; measuring the first %d", layer, units, settings.max_units)
        activations = activations[:, :settings.max_units]
    measured = activations.shape[1]
    ranges = tuple(native_range(activation, activations[:, unit]) for unit in range(measured))
    discretizer = Discretizer(Strategy.UNIFORM, settings.bins, ranges)
    return discretize(activations, discretizer), measured


def _chain_verdicts(entries, epsilon) -> Tuple[ChainVerdict, ...]:
    verdicts = []
    for quantity, direction in CHAIN_DIRECTIONS.items():
        for before, after in zip(entries[:-1], entries[1:]):
            old = getattr(before.analysis.quantities, quantity)
            new = getattr(after.analysis.quantities, quantity)
            slack = new - old if direction == NON_INCREASING else old - new
            holds = slack <= epsilon
            if not holds:
                _LOGGER.warning("%s is not %s from %s to %s by %.4f bits (estimator artifact)",
                                quantity, direction, before.layer, after.layer, slack)
            verdicts.append(ChainVerdict(quantity, direction, before.layer, after.layer, slack, holds))
    return tuple(verdicts)


def _order_verdicts(entries, epsilon) -> Tuple[OrderVerdict, ...]:
    verdicts = []
    for before, after in zip(entries[:-1], entries[1:]):
        old, new = before.analysis.quantities, after.analysis.quantities
        noise_slack = new.n_xyf - old.n_xyf
        loss_slack = old.l_xyf - new.l_xyf
        holds = noise_slack <= epsilon and loss_slack <= epsilon
        if not holds:
            _LOGGER.warning("IM[%s] >= IM[%s] fails beyond %.3g bits", before.layer, after.layer, epsilon)
        verdicts.append(OrderVerdict(before.layer, after.layer, noise_slack, loss_slack, holds))
    return tuple(verdicts)


def layer_chain(model: MlpModel, inputs, targets, settings: ChainSettings = ChainSettings()) -> LayerChainReport:
    """
    Measure IM[f_k] for every layer k = 1..m+1 of `model` on a dataset.

    X is the exact input row (dictionary-encoded, not binned), T_k the binned
    activations of layer k and Y the target. Constant layers are measured,
    not rejected: their entropies are zero.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or len(inputs) == 0:
        raise EmptyTableError("layer chains need a non-empty input matrix")
    targets = np.asarray(targets)
    if len(targets) != len(inputs):
        raise InvalidParameterError(f"{len(inputs)} inputs but {len(targets)} targets")
    _, trace = forward(model, inputs)
    x_symbols = encode_rows(inputs)
    y_symbols = encode_rows(targets)

    layers = []
    units = {}
    for k, activation in enumerate(model.config.layer_activations(), start=1):
        name = str(k)
        t_symbols, measured = _layer_symbols(trace.layers[k], activation, settings, name)
        table = joint_from_samples({"X": x_symbols, "T": t_symbols, "Y": y_symbols})
        analysis = analyze(table, Mode.DETERMINISTIC, settings.tol, settings.tau)
        q = analysis.quantities
        layers.append(LayerEntry(name, k, analysis, measured, q.i_xyf - q.i_xxf))
        units[name] = {"width": int(trace.layers[k].shape[1]), "measured": measured}

    start = identity_quantities(layers[0].analysis.quantities)
    initial = LayerEntry(INPUT_LAYER, 0,
                         analyze_quantities(start, Mode.DETERMINISTIC, settings.tol, settings.tau),
                         inputs.shape[1], start.i_xyf - start.i_xxf)
    entries = (initial,) + tuple(layers)
    for entry in entries:
        if not entry.dpi_holds:
            _LOGGER.error("layer %s reveals more about Y than about X by %.3g bits", entry.layer, entry.dpi_slack)
    metadata = {
        "estimator": ESTIMATOR,
        "binning": Strategy.UNIFORM.value,
        "bins": settings.bins,
        "samples": int(len(inputs)),
        "epsilon": settings.epsilon,
        "tau": settings.tau,
        "layer_units": units,
    }
    return LayerChainReport(entries, _chain_verdicts(entries, settings.epsilon),
                            _order_verdicts(entries, settings.epsilon), metadata)


def snapshot_chains(training: TrainingResult, inputs, targets,
                    settings: ChainSettings = ChainSettings()) -> Dict[int, LayerChainReport]:
    """A LayerChainReport per snapshot epoch, in epoch order."""
    return {epoch: layer_chain(training.snapshots[epoch], inputs, targets, settings)
            for epoch in sorted(training.snapshots)}


@dataclass(frozen=True)
class PathwayStep:
    """
    Change of a layer's matrix between two snapshots.

    Positive delta_a means irrelevant information moved from b to a (noise
    pathway); positive delta_c means relevant information moved from d to c
    (loss pathway).
    """
    layer: str
    from_epoch: int
    to_epoch: int
    delta_a: float
    delta_c: float


def pathway_trajectory(chains: Mapping[int, LayerChainReport]) -> Tuple[PathwayStep, ...]:
    epochs = sorted(chains)
    steps = []
    for before, after in zip(epochs[:-1], epochs[1:]):
        for old in chains[before].entries:
            if old.layer == INPUT_LAYER:
                continue
            new = chains[after].entry(old.layer)
            steps.append(PathwayStep(
                old.layer, before, after,
                new.analysis.matrix.a - old.analysis.matrix.a,
                new.analysis.matrix.c - old.analysis.matrix.c,
            ))
    return tuple(steps)
