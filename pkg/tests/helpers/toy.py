import json
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from imflow.core.channels import DeterministicChannel, Scenario, StochasticChannel
from imflow.core.mlp import bit_task
from imflow.core.probability import JointTable

# x, t = high bit of x, y = high bit of x
TOY_COLUMNS = {
    "x": [0, 1, 2, 3],
    "t": [0, 0, 1, 1],
    "y": [0, 0, 1, 1],
}


def write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
    lines = [",".join(header)] + [",".join(str(value) for value in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path: Path, document: Mapping[str, Any]) -> Path:
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def random_joint_xy(rng: np.random.Generator, max_alphabet: int = 8) -> JointTable:
    """A random X/Y joint with every X symbol present."""
    x_size = int(rng.integers(1, max_alphabet + 1))
    y_size = int(rng.integers(1, max_alphabet + 1))
    cells, mass = [], []
    for x in range(x_size):
        ys = rng.choice(y_size, size=int(rng.integers(1, y_size + 1)), replace=False)
        for y in ys:
            cells.append((x, int(y)))
            mass.append(float(rng.random()) + 0.01)
    return JointTable(("X", "Y"), cells, mass)


def random_deterministic_scenario(rng: np.random.Generator, max_alphabet: int = 8) -> Scenario:
    joint = random_joint_xy(rng, max_alphabet)
    x_size = int(joint.column("X").max()) + 1
    mapping = rng.integers(0, int(rng.integers(1, max_alphabet + 1)), size=x_size)
    return Scenario(joint, DeterministicChannel(tuple(int(image) for image in mapping)))


def random_stochastic_scenario(rng: np.random.Generator, max_alphabet: int = 8) -> Scenario:
    base = random_deterministic_scenario(rng, max_alphabet)
    size = base.channel.output_size + int(rng.integers(0, 3))
    weights = rng.integers(1, 10, size=size).astype(float)
    noise = weights / weights.sum()
    return Scenario(base.joint_xy, StochasticChannel(base.channel, tuple(float(value) for value in noise)))


def high_bit_task(repeats: int = 16):
    """Every 4-bit input, most significant bit first, with that bit as the target."""
    inputs, _ = bit_task(bits=4, repeats=repeats)
    return inputs, inputs[:, 0].astype(int)
