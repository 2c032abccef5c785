"""
A small multilayer perceptron in numpy: seeded initialisation, forward pass
with per-layer activation capture, backpropagation, mini-batch SGD on binary
cross-entropy and a finite-difference gradient check.

Layer k (1-based) computes X_k = act_k(X_{k-1} W_k^T + b_k); hidden layers use
the configured activation and the output layer is always a sigmoid.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from imflow.core.errors import InvalidParameterError

_LOGGER = logging.getLogger(__name__)


class Activation(Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"


def _activate(activation: Activation, z: np.ndarray) -> np.ndarray:
    if activation is Activation.SIGMOID:
        return expit(z)
    if activation is Activation.TANH:
        return np.tanh(z)
    return np.maximum(z, 0.0)


def _derivative(activation: Activation, a: np.ndarray) -> np.ndarray:
    # in terms of the activation value a = act(z)
    if activation is Activation.SIGMOID:
        return a * (1.0 - a)
    if activation is Activation.TANH:
        return 1.0 - a * a
    return (a > 0.0).astype(float)


@dataclass(frozen=True)
class MlpConfig:
    """
    Architecture and training settings.

    Args:
        layer_widths: input width, hidden widths..., output width
        activations: one activation per hidden layer, or a single one for all
        seed: seeds initialisation and shuffling
        learning_rate: SGD step size
        epochs: passes over the training set
        batch_size: samples per SGD step
        snapshot_epochs: epochs after which the model is kept (0 = before training)
    """
    layer_widths: Tuple[int, ...]
    activations: Union[Activation, str, Tuple[Activation, ...]] = Activation.SIGMOID
    seed: int = 0
    learning_rate: float = 2.0
    epochs: int = 2000
    batch_size: int = 32
    snapshot_epochs: Tuple[int, ...] = ()

    def __post_init__(self):
        widths = tuple(int(width) for width in self.layer_widths)
        if len(widths) < 3:
            raise InvalidParameterError("an MLP needs an input, at least one hidden and an output layer")
        if min(widths) < 1:
            raise InvalidParameterError(f"layer widths must be positive, got {widths}")
        hidden = len(widths) - 2
        raw = self.activations
        if isinstance(raw, (str, Activation)):
            raw = (raw,) * hidden
        try:
            activations = tuple(Activation(item) for item in raw)
        except ValueError as e:
            raise InvalidParameterError(str(e))
        if len(activations) != hidden:
            raise InvalidParameterError(f"{hidden} hidden layers but {len(activations)} activations")
        if not self.learning_rate >= 0:
            raise InvalidParameterError(f"learning rate must be non-negative, got {self.learning_rate}")
        if self.epochs < 1 or self.batch_size < 1:
            raise InvalidParameterError("epochs and batch_size must be positive")
        snapshots = tuple(sorted(set(int(epoch) for epoch in self.snapshot_epochs)))
        if snapshots and (snapshots[0] < 0 or snapshots[-1] > self.epochs):
            raise InvalidParameterError(f"snapshot epochs must lie in [0, {self.epochs}], got {snapshots}")
        object.__setattr__(self, "layer_widths", widths)
        object.__setattr__(self, "activations", activations)
        object.__setattr__(self, "snapshot_epochs", snapshots)

    @property
    def hidden_count(self) -> int:
        return len(self.layer_widths) - 2

    def layer_activations(self) -> Tuple[Activation, ...]:
        return self.activations + (Activation.SIGMOID,)


@dataclass(frozen=True)
class MlpModel:
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    config: MlpConfig

    def __post_init__(self):
        for k, (weight, bias) in enumerate(zip(self.weights, self.biases), start=1):
            expected = (self.config.layer_widths[k], self.config.layer_widths[k - 1])
            if weight.shape != expected or bias.shape != (expected[0],):
                raise InvalidParameterError(f"layer {k} has shape {weight.shape}, expected {expected}")
            weight.setflags(write=False)
            bias.setflags(write=False)


def init(config: MlpConfig) -> MlpModel:
    """Weights uniform in +-fan_in^(-1/2), biases zero, drawn from the config seed."""
    rng = np.random.default_rng(config.seed)
    weights, biases = [], []
    widths = config.layer_widths
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = fan_in ** -0.5
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return MlpModel(tuple(weights), tuple(biases), config)


@dataclass(frozen=True)
class ActivationTrace:
    """X_0 (the inputs) through X_{m+1} (the outputs), plus the pre-activations Z_1..Z_{m+1}."""
    layers: Tuple[np.ndarray, ...]
    pre_activations: Tuple[np.ndarray, ...]


def _apply_layer(weight: np.ndarray, bias: np.ndarray, activation: Activation,
                 inputs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    z = inputs @ weight.T + bias
    return z, _activate(activation, z)


def _forward_arrays(weights, biases, activations, inputs) -> ActivationTrace:
    layers = [inputs]
    pre_activations = []
    for weight, bias, activation in zip(weights, biases, activations):
        z, a = _apply_layer(weight, bias, activation, layers[-1])
        pre_activations.append(z)
        layers.append(a)
    return ActivationTrace(tuple(layers), tuple(pre_activations))


def _check_inputs(config: MlpConfig, inputs) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != config.layer_widths[0]:
        raise InvalidParameterError(
            f"inputs must have shape (n, {config.layer_widths[0]}), got {inputs.shape}")
    return inputs


def forward(model: MlpModel, inputs) -> Tuple[np.ndarray, ActivationTrace]:
    inputs = _check_inputs(model.config, inputs)
    trace = _forward_arrays(model.weights, model.biases, model.config.layer_activations(), inputs)
    return trace.layers[-1], trace


def _check_targets(config: MlpConfig, targets, count: int) -> np.ndarray:
    targets = np.asarray(targets, dtype=float).reshape(count, -1)
    if targets.shape[1] != config.layer_widths[-1]:
        raise InvalidParameterError(
            f"targets must have {config.layer_widths[-1]} columns, got {targets.shape[1]}")
    if not np.isin(targets, (0.0, 1.0)).all():
        raise InvalidParameterError("targets must be 0 or 1")
    return targets


def _loss(trace: ActivationTrace, targets: np.ndarray) -> float:
    z = trace.pre_activations[-1]
    # binary cross-entropy written on the logits
    return float(np.mean(np.logaddexp(0.0, z) - targets * z))


def binary_cross_entropy(model: MlpModel, inputs, targets) -> float:
    inputs = _check_inputs(model.config, inputs)
    _, trace = forward(model, inputs)
    return _loss(trace, _check_targets(model.config, targets, len(inputs)))


def _gradients(weights, biases, activations, inputs, targets) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    trace = _forward_arrays(weights, biases, activations, inputs)
    delta = (trace.layers[-1] - targets) / targets.size
    grad_w: List[np.ndarray] = [None] * len(weights)
    grad_b: List[np.ndarray] = [None] * len(weights)
    for k in reversed(range(len(weights))):
        grad_w[k] = delta.T @ trace.layers[k]
        grad_b[k] = delta.sum(axis=0)
        if k > 0:
            delta = (delta @ weights[k]) * _derivative(activations[k - 1], trace.layers[k])
    return grad_w, grad_b


def gradients(model: MlpModel, inputs, targets) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Analytic gradients of the mean binary cross-entropy w.r.t. every weight and bias."""
    inputs = _check_inputs(model.config, inputs)
    targets = _check_targets(model.config, targets, len(inputs))
    return _gradients(model.weights, model.biases, model.config.layer_activations(), inputs, targets)


@dataclass(frozen=True)
class TrainingResult:
    model: MlpModel
    loss_history: Tuple[float, ...]
    snapshots: Dict[int, MlpModel] = field(default_factory=dict)


def _freeze(weights, biases, config) -> MlpModel:
    return MlpModel(tuple(w.copy() for w in weights), tuple(b.copy() for b in biases), config)


def train(model: MlpModel, inputs, targets, config: MlpConfig = None) -> TrainingResult:
    """
    Mini-batch SGD on binary cross-entropy.

    Shuffling is drawn from a generator seeded with the config seed, so the
    same model, data and config always give the same loss history. The loss
    history holds the full-dataset loss after every epoch.
    """
    config = config or model.config
    inputs = _check_inputs(config, inputs)
    targets = _check_targets(config, targets, len(inputs))
    if len(inputs) == 0:
        raise InvalidParameterError("cannot train on an empty dataset")
    activations = config.layer_activations()
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    rng = np.random.default_rng([config.seed, 1])
    snapshots = {}
    if 0 in config.snapshot_epochs:
        snapshots[0] = _freeze(weights, biases, config)
    history = []
    count = len(inputs)
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(count)
        for start in range(0, count, config.batch_size):
            batch = order[start:start + config.batch_size]
            grad_w, grad_b = _gradients(weights, biases, activations, inputs[batch], targets[batch])
            for k in range(len(weights)):
                weights[k] = weights[k] - config.learning_rate * grad_w[k]
                biases[k] = biases[k] - config.learning_rate * grad_b[k]
        history.append(_loss(_forward_arrays(weights, biases, activations, inputs), targets))
        if epoch in config.snapshot_epochs:
            snapshots[epoch] = _freeze(weights, biases, config)
        if epoch % 500 == 0:
            _LOGGER.debug("epoch %d loss %.6f", epoch, history[-1])
    return TrainingResult(_freeze(weights, biases, config), tuple(history), snapshots)


def accuracy(model: MlpModel, inputs, targets) -> float:
    outputs, _ = forward(model, inputs)
    targets = np.asarray(targets, dtype=float).reshape(outputs.shape)
    return float(np.mean((outputs > 0.5) == (targets > 0.5)))


GRAD_MAGNITUDE_GUARD = 1e-8
GRAD_DENOMINATOR_FLOOR = 1e-6
RELU_KINK_OFFSET = 1e-3


@dataclass(frozen=True)
class GradCheckResult:
    max_relative_error: float
    compared: int
    skipped: int


def grad_check(model: MlpModel, inputs, targets, eps: float = 1e-5) -> GradCheckResult:
    """
    Compare analytic gradients with central finite differences on every parameter.

    Parameters where both estimates are below GRAD_MAGNITUDE_GUARD are skipped.
    Relative errors are |analytic - numeric| / max(|analytic|, |numeric|,
    GRAD_DENOMINATOR_FLOOR). With ReLU layers, exact zeros in the inputs are
    moved to RELU_KINK_OFFSET first so no pre-activation sits on the kink.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise InvalidParameterError(f"eps must lie in [1e-7, 1e-3], got {eps}")
    config = model.config
    inputs = _check_inputs(config, inputs)
    targets = _check_targets(config, targets, len(inputs))
    activations = config.layer_activations()
    if Activation.RELU in activations:
        inputs = np.where(inputs == 0.0, RELU_KINK_OFFSET, inputs)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    analytic_w, analytic_b = _gradients(weights, biases, activations, inputs, targets)

    def loss() -> float:
        return _loss(_forward_arrays(weights, biases, activations, inputs), targets)

    worst, compared, skipped = 0.0, 0, 0
    for params, analytic in zip(weights + biases, analytic_w + analytic_b):
        for index in np.ndindex(params.shape):
            original = params[index]
            params[index] = original + eps
            upper = loss()
            params[index] = original - eps
            lower = loss()
            params[index] = original
            numeric = (upper - lower) / (2.0 * eps)
            exact = analytic[index]
            if abs(exact) < GRAD_MAGNITUDE_GUARD and abs(numeric) < GRAD_MAGNITUDE_GUARD:
                skipped += 1
                continue
            compared += 1
            scale = max(abs(exact), abs(numeric), GRAD_DENOMINATOR_FLOOR)
            worst = max(worst, abs(exact - numeric) / scale)
    return GradCheckResult(worst, compared, skipped)


@dataclass(frozen=True)
class MlpStage:
    """A contiguous run of layers, applied with the same arithmetic as forward()."""
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    activations: Tuple[Activation, ...]

    def __call__(self, inputs) -> np.ndarray:
        outputs = np.asarray(inputs, dtype=float)
        for weight, bias, activation in zip(self.weights, self.biases, self.activations):
            _, outputs = _apply_layer(weight, bias, activation, outputs)
        return outputs


@dataclass(frozen=True)
class EncoderDecoderSplit:
    cut: int
    encoder: MlpStage
    decoder: MlpStage

    def compose(self, inputs) -> np.ndarray:
        return self.decoder(self.encoder(inputs))


def split_encoder_decoder(model: MlpModel, k: int) -> EncoderDecoderSplit:
    """Encoder = layers 1..k, decoder = layers k+1..m+1, for 1 <= k <= m."""
    hidden = model.config.hidden_count
    if not 1 <= k <= hidden:
        raise InvalidParameterError(f"cut must lie in [1, {hidden}], got {k}")
    activations = model.config.layer_activations()
    return EncoderDecoderSplit(
        cut=k,
        encoder=MlpStage(model.weights[:k], model.biases[:k], activations[:k]),
        decoder=MlpStage(model.weights[k:], model.biases[k:], activations[k:]),
    )


def bit_task(bits: int = 4, designated: int = 0, partner: int = 1,
             repeats: int = 256) -> Tuple[np.ndarray, np.ndarray]:
    """
    Every bits-wide binary input, repeated `repeats` times, with target
    bit[designated] XOR bit[partner].
    """
    if not (0 <= designated < bits and 0 <= partner < bits) or designated == partner:
        raise InvalidParameterError("designated and partner must be two distinct bit positions")
    codes = np.arange(2 ** bits)
    patterns = (codes[:, None] >> np.arange(bits - 1, -1, -1)[None, :]) & 1
    inputs = np.tile(patterns, (repeats, 1)).astype(float)
    targets = (inputs[:, designated].astype(int) ^ inputs[:, partner].astype(int))
    return inputs, targets
