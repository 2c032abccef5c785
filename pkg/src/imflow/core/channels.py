"""
Synthetic transformations over finite alphabets with exactly computable joints.

A deterministic channel maps every X symbol to one output symbol g(x). A
stochastic channel adds noise drawn independently of X to g(x), modulo the
size of the output alphabet: f(x) = (g(x) + n) mod K.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from imflow.core.errors import InvalidParameterError, UnachievablePatternError
from imflow.core.info_matrix import IDENTITY_TOLERANCE, InfoQuantities, PatternKind, quantities_from_joint
from imflow.core.probability import JointTable, conditional_entropy, entropy, mutual_information

_LOGGER = logging.getLogger(__name__)

NOISE_SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DeterministicChannel:
    """g: X symbol x -> mapping[x]."""
    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(image) for image in self.mapping)
        if not mapping:
            raise InvalidParameterError("a channel needs at least one input symbol")
        if min(mapping) < 0:
            raise InvalidParameterError("channel images must be non-negative symbols")
        object.__setattr__(self, "mapping", mapping)

    @property
    def input_size(self) -> int:
        return len(self.mapping)

    @property
    def output_size(self) -> int:
        return max(self.mapping) + 1

    def apply(self, symbols) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=np.int64)
        if len(symbols) and symbols.max() >= self.input_size:
            raise InvalidParameterError(
                f"symbol {int(symbols.max())} outside the channel's input alphabet of size {self.input_size}")
        return np.asarray(self.mapping, dtype=np.int64)[symbols]

    def as_stochastic(self) -> "StochasticChannel":
        return StochasticChannel(self, point_noise(self.output_size))


@dataclass(frozen=True)
class StochasticChannel:
    """
    f(x) = (g(x) + N) mod K, with N distributed as `noise_mass` over offsets
    0..K-1 and independent of X.
    """
    base: DeterministicChannel
    noise_mass: Tuple[float, ...]

    def __post_init__(self):
        mass = tuple(float(value) for value in self.noise_mass)
        if not mass or min(mass) < 0 or not all(np.isfinite(mass)):
            raise InvalidParameterError("noise mass must be a non-empty list of non-negative numbers")
        if abs(sum(mass) - 1.0) > NOISE_SUM_TOLERANCE:
            raise InvalidParameterError(f"noise mass sums to {sum(mass)}, not 1")
        if self.base.output_size > len(mass):
            raise InvalidParameterError(
                f"base channel emits {self.base.output_size} symbols but noise covers {len(mass)} offsets")
        object.__setattr__(self, "noise_mass", mass)

    @property
    def output_size(self) -> int:
        return len(self.noise_mass)

    @property
    def noise_entropy(self) -> float:
        return entropy(JointTable(("N",), np.arange(self.output_size), self.noise_mass), "N")


Channel = Union[DeterministicChannel, StochasticChannel]


def point_noise(size: int) -> Tuple[float, ...]:
    return flip_noise(0.0, size)


def flip_noise(p: float, size: int) -> Tuple[float, ...]:
    """Offset 1 with probability p, otherwise 0 (a bit flip when size is 2)."""
    _check_noise_args(p, size)
    mass = [0.0] * size
    mass[0] = 1.0 - p
    if size > 1:
        mass[1] += p
    elif p > 0:
        raise InvalidParameterError("a single-symbol output alphabet cannot carry noise")
    return tuple(mass)


def symmetric_noise(p: float, size: int) -> Tuple[float, ...]:
    """Offset 0 with probability 1 - p, every other offset with p / (size - 1)."""
    _check_noise_args(p, size)
    if size == 1:
        if p > 0:
            raise InvalidParameterError("a single-symbol output alphabet cannot carry noise")
        return (1.0,)
    return (1.0 - p,) + (p / (size - 1),) * (size - 1)


def _check_noise_args(p: float, size: int) -> None:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"noise level must lie in [0, 1], got {p}")
    if size < 1:
        raise InvalidParameterError(f"output alphabet size must be positive, got {size}")


@dataclass(frozen=True)
class Scenario:
    """A joint X/Y distribution, a channel, and optionally the quantities it must produce."""
    joint_xy: JointTable
    channel: Channel
    expected: Optional[InfoQuantities] = None
    name: str = "scenario"

    def __post_init__(self):
        if set(self.joint_xy.axes) != {"X", "Y"}:
            raise InvalidParameterError(f"scenario joint must have axes X and Y, got {self.joint_xy.axes}")
        base = self.channel.base if isinstance(self.channel, StochasticChannel) else self.channel
        largest = int(self.joint_xy.column("X").max()) if len(self.joint_xy.mass) else -1
        if largest >= base.input_size:
            raise InvalidParameterError(
                f"channel covers {base.input_size} X symbols but the joint uses symbol {largest}")

    @property
    def is_stochastic(self) -> bool:
        return isinstance(self.channel, StochasticChannel)


def exact_joint(s: Scenario) -> JointTable:
    """
    Push the X/Y joint through the channel exactly.

    Returns a normalised JointTable over (X, T, Y); for a stochastic channel
    each (x, y) cell is spread over (x, (g(x) + n) mod K, y) with the noise mass.
    """
    xy = s.joint_xy.normalized()
    x = xy.column("X")
    y = xy.column("Y")
    if isinstance(s.channel, DeterministicChannel):
        return JointTable(("X", "T", "Y"), np.column_stack([x, s.channel.apply(x), y]), xy.mass)
    noise = np.asarray(s.channel.noise_mass)
    offsets = np.flatnonzero(noise > 0)
    images = s.channel.base.apply(x)
    size = s.channel.output_size
    t = (images[:, None] + offsets[None, :]) % size
    cells = np.column_stack([
        np.repeat(x, len(offsets)),
        t.reshape(-1),
        np.repeat(y, len(offsets)),
    ])
    mass = (xy.mass[:, None] * noise[offsets][None, :]).reshape(-1)
    return JointTable(("X", "T", "Y"), cells, mass)


def sample_channel(s: Scenario, n: int, seed: int) -> Dict[str, np.ndarray]:
    """Draw n i.i.d. (X, T, Y) triples from the exact joint with a seeded generator."""
    if n < 1:
        raise InvalidParameterError(f"sample count must be at least 1, got {n}")
    joint = exact_joint(s)
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(joint.mass), size=n, p=joint.probabilities())
    return {axis: joint.column(axis)[picks] for axis in ("X", "T", "Y")}


def toy_joint() -> JointTable:
    """X uniform over {0, 1, 2, 3}, Y the high bit of X."""
    return JointTable(("X", "Y"), [[0, 0], [1, 0], [2, 1], [3, 1]], [0.25] * 4)


TOY_CHANNELS = {
    "identity": DeterministicChannel((0, 1, 2, 3)),
    "high-bit": DeterministicChannel((0, 0, 1, 1)),
    "constant": DeterministicChannel((0, 0, 0, 0)),
    "low-bit": DeterministicChannel((0, 1, 0, 1)),
}


def _toy_quantities(h_f, l_xxf, n_xyf, l_xyf) -> InfoQuantities:
    # h_x = 2, h_y = 1, n_xy = 1, l_xy = 0, i_xy = 1 on the toy joint
    return InfoQuantities(
        h_x=2.0, h_y=1.0, h_f=h_f, n_xy=1.0, l_xy=0.0,
        n_xxf=0.0, l_xxf=l_xxf, n_xyf=n_xyf, l_xyf=l_xyf,
        i_xy=1.0, i_xxf=h_f, i_xyf=1.0 - l_xyf, dloss=l_xyf,
    )


TOY_EXPECTED = {
    "identity": _toy_quantities(h_f=2.0, l_xxf=0.0, n_xyf=1.0, l_xyf=0.0),
    "high-bit": _toy_quantities(h_f=1.0, l_xxf=1.0, n_xyf=0.0, l_xyf=0.0),
    "constant": _toy_quantities(h_f=0.0, l_xxf=2.0, n_xyf=0.0, l_xyf=1.0),
    "low-bit": _toy_quantities(h_f=1.0, l_xxf=1.0, n_xyf=1.0, l_xyf=1.0),
}


def make_toy_scenario() -> Tuple[Scenario, ...]:
    """The four canonical toy channels, in the order identity, high-bit, constant, low-bit."""
    joint = toy_joint()
    return tuple(Scenario(joint, channel, TOY_EXPECTED[name], name) for name, channel in TOY_CHANNELS.items())


def _class_map(joint_xy: JointTable) -> Dict[int, int]:
    """x -> y for joints where Y is a function of X."""
    l_xy = conditional_entropy(joint_xy, "Y", "X")
    if l_xy > IDENTITY_TOLERANCE:
        raise UnachievablePatternError(f"Y is not a function of X (H(Y|X) = {l_xy:.6g} bits)")
    return {int(x): int(y) for x, y in zip(joint_xy.column("X"), joint_xy.column("Y"))}


def make_pattern_channel(pattern: PatternKind, joint_xy: JointTable) -> DeterministicChannel:
    """
    Build the deterministic channel realising a corner pattern on joint_xy.

    Raises UnachievablePatternError when the corner cannot be reached by a
    deterministic mapping of this joint.
    """
    pattern = PatternKind(pattern)
    size = int(joint_xy.column("X").max()) + 1
    if pattern is PatternKind.LOSSLESS:
        return DeterministicChannel(tuple(range(size)))
    if pattern is PatternKind.DUMMY:
        return DeterministicChannel((0,) * size)
    if pattern is PatternKind.MAX_DISCRIMINATIVE:
        classes = _class_map(joint_xy)
        return DeterministicChannel(tuple(classes.get(x, 0) for x in range(size)))
    if pattern is PatternKind.RANDOM:
        classes = _class_map(joint_xy)
        within = {}
        counters: Dict[int, int] = {}
        for x in sorted(classes):
            y = classes[x]
            within[x] = counters.get(y, 0)
            counters[y] = within[x] + 1
        channel = DeterministicChannel(tuple(within.get(x, 0) for x in range(size)))
        joint = exact_joint(Scenario(joint_xy, channel))
        dependence = mutual_information(joint, "T", "Y")
        if dependence > IDENTITY_TOLERANCE:
            raise UnachievablePatternError(
                f"within-class indices still depend on Y (I(T;Y) = {dependence:.6g} bits); "
                "classes need equal sizes and equal within-class distributions")
        return channel
    raise UnachievablePatternError(f"{pattern.value} is not a corner pattern")


def make_uniform_additive_scenario(classes: int, inputs_per_class: int,
                                   noise_mass: Sequence[float], name: str = "uniform-additive") -> Scenario:
    """
    X uniform over classes * inputs_per_class symbols, Y = x // inputs_per_class,
    g the class map and noise added modulo the number of classes.

    Y is uniform and a function of X, so H(Y | f(X)) = H(Y | X) + H(N) exactly.
    """
    if classes < 1 or inputs_per_class < 1:
        raise InvalidParameterError("classes and inputs_per_class must be positive")
    if len(noise_mass) != classes:
        raise InvalidParameterError(f"noise mass must cover {classes} offsets, got {len(noise_mass)}")
    size = classes * inputs_per_class
    xs = np.arange(size)
    ys = xs // inputs_per_class
    joint = JointTable(("X", "Y"), np.column_stack([xs, ys]), np.full(size, 1.0 / size))
    base = DeterministicChannel(tuple(int(y) for y in ys))
    return Scenario(joint, StochasticChannel(base, tuple(noise_mass)), name=name)


@dataclass(frozen=True)
class NoiseBoundReport:
    """
    Lower bounds on noise and loss of a stochastic channel.

    Slacks are lhs - bound: non-negative means the bound holds.
    `noise_slack` = n_xyf - n_xxf, `loss_slack` = l_xyf - (l_xy + n_xxf).
    """
    n_xyf: float
    n_xxf: float
    l_xyf: float
    l_xy: float
    noise_entropy: float
    n_xyg: float
    l_xyg: float
    noise_slack: float
    loss_slack: float
    sandwich_lower_slack: float
    sandwich_upper_slack: float
    loss_slack_vs_g: float

    @property
    def noise_bound_holds(self) -> bool:
        return self.noise_slack >= -IDENTITY_TOLERANCE

    @property
    def loss_bound_holds(self) -> bool:
        return self.loss_slack >= -IDENTITY_TOLERANCE

    @property
    def sandwich_holds(self) -> bool:
        return min(self.sandwich_lower_slack, self.sandwich_upper_slack) >= -IDENTITY_TOLERANCE


def noise_bound_check(s: Scenario) -> NoiseBoundReport:
    """
    Evaluate the noise and loss lower bounds of a stochastic scenario from its exact joint.

    Also reports the additive-noise sandwich
    max(H(g(X)|Y), H(N)) <= n_xyf <= H(g(X)|Y) + H(N).
    """
    if not isinstance(s.channel, StochasticChannel):
        raise InvalidParameterError("noise bounds need a stochastic channel")
    q = quantities_from_joint(exact_joint(s))
    g = quantities_from_joint(exact_joint(Scenario(s.joint_xy, s.channel.base)))
    h_noise = s.channel.noise_entropy
    if q.l_xyf < q.l_xy + q.n_xxf - IDENTITY_TOLERANCE:
        _LOGGER.info("loss lower bound fails by %.3g bits on %s", q.l_xy + q.n_xxf - q.l_xyf, s.name)
    return NoiseBoundReport(
        n_xyf=q.n_xyf,
        n_xxf=q.n_xxf,
        l_xyf=q.l_xyf,
        l_xy=q.l_xy,
        noise_entropy=h_noise,
        n_xyg=g.n_xyf,
        l_xyg=g.l_xyf,
        noise_slack=q.n_xyf - q.n_xxf,
        loss_slack=q.l_xyf - (q.l_xy + q.n_xxf),
        sandwich_lower_slack=q.n_xyf - max(g.n_xyf, h_noise),
        sandwich_upper_slack=(g.n_xyf + h_noise) - q.n_xyf,
        loss_slack_vs_g=q.l_xyf - (g.l_xyf + h_noise),
    )
