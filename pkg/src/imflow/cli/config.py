"""
JSON configuration documents for `simulate` and `objective-sweep`.

A scenario document:

    {
      "name": "toy-high-bit",
      "source": {"kind": "toy"},
      "channel": "high-bit",
      "noise": {"kind": "symmetric", "p": 0.1},
      "samples": 0,
      "seed": 0
    }

`source` is {"kind": "toy"}, {"kind": "uniform_classes", "classes": K,
"inputs_per_class": M} or {"kind": "joint", "cells": [[x, y, mass], ...]}.
The transformation is either "pattern" (lossless, max_discriminative, dummy,
random) or "channel" (a toy channel name or an explicit list of images).
`noise` is optional: symmetric or flip with level "p", or explicit "mass";
"output_size" defaults to the channel's output alphabet.

A candidates document has a "source", a "candidates" list of
{"name", "pattern" | "channel", "noise"} entries (or the string "toy" for the
four toy channels, which needs the toy source) and optional "alphas" and
"betas" lists.

Malformed values raise InvalidParameterError.
"""
import json
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from imflow.core.channels import (
    TOY_CHANNELS,
    TOY_EXPECTED,
    Channel,
    DeterministicChannel,
    Scenario,
    StochasticChannel,
    exact_joint,
    flip_noise,
    make_pattern_channel,
    make_toy_scenario,
    symmetric_noise,
    toy_joint,
)
from imflow.core.errors import InvalidParameterError
from imflow.core.info_matrix import InfoQuantities, PatternKind, quantities_from_joint
from imflow.core.objectives import Candidate
from imflow.core.probability import JointTable

PATTERN_NAMES = {
    "lossless": PatternKind.LOSSLESS,
    "max_discriminative": PatternKind.MAX_DISCRIMINATIVE,
    "dummy": PatternKind.DUMMY,
    "random": PatternKind.RANDOM,
}


@dataclass(frozen=True)
class SimulationRequest:
    scenario: Scenario
    samples: int = 0
    seed: int = 0


@dataclass(frozen=True)
class SweepRequest:
    candidates: Tuple[Candidate, ...]
    alphas: Tuple[float, ...] = ()
    betas: Tuple[float, ...] = ()


def load_document(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as document:
            content = json.load(document)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidParameterError(f"cannot read configuration {path}: {e}")
    if not isinstance(content, dict):
        raise InvalidParameterError(f"configuration {path} must be a JSON object")
    return content


def _mapping(value: Any, key: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise InvalidParameterError(f"{key!r} must be a JSON object, got {value!r}")
    return value


def _number(kind: Callable[[Any], Any], value: Any, key: str) -> Any:
    if isinstance(value, bool):
        raise InvalidParameterError(f"{key!r} must be a number, got {value!r}")
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{key!r} must be a number, got {value!r}")


def _number_list(value: Any, key: str) -> Tuple[float, ...]:
    if not isinstance(value, list):
        raise InvalidParameterError(f"{key!r} must be a list of numbers, got {value!r}")
    return tuple(_number(float, item, key) for item in value)


def _source(document: Mapping[str, Any]) -> Tuple[JointTable, bool]:
    """The X/Y joint, and whether it is the toy joint."""
    source = _mapping(document.get("source", {"kind": "toy"}), "source")
    kind = source.get("kind", "toy")
    if kind == "toy":
        return toy_joint(), True
    if kind == "uniform_classes":
        classes = _number(int, source.get("classes", 2), "classes")
        per_class = _number(int, source.get("inputs_per_class", 2), "inputs_per_class")
        if classes < 1 or per_class < 1:
            raise InvalidParameterError("classes and inputs_per_class must be positive")
        xs = np.arange(classes * per_class)
        return JointTable(("X", "Y"), np.column_stack([xs, xs // per_class]), np.ones(len(xs))), False
    if kind == "joint":
        cells = source.get("cells")
        if not isinstance(cells, list) or not cells or any(
                not isinstance(cell, list) or len(cell) != 3 for cell in cells):
            raise InvalidParameterError("a joint source needs cells of the form [x, y, mass]")
        symbols = [[_number(int, value, "cells") for value in cell[:2]] for cell in cells]
        mass = [_number(float, cell[2], "cells") for cell in cells]
        return JointTable(("X", "Y"), symbols, mass), False
    raise InvalidParameterError(f"unknown source kind {kind!r}")


def _noise(entry: Any, base: DeterministicChannel) -> Optional[Tuple[float, ...]]:
    if entry is None:
        return None
    entry = _mapping(entry, "noise")
    kind = entry.get("kind", "symmetric")
    size = _number(int, entry.get("output_size", base.output_size), "output_size")
    if kind == "symmetric":
        return symmetric_noise(_number(float, entry.get("p", 0.0), "p"), size)
    if kind == "flip":
        return flip_noise(_number(float, entry.get("p", 0.0), "p"), size)
    if kind == "explicit":
        return _number_list(entry.get("mass"), "mass")
    raise InvalidParameterError(f"unknown noise kind {kind!r}")


def _channel(entry: Mapping[str, Any], joint: JointTable,
             toy: bool) -> Tuple[Channel, Optional[InfoQuantities], str]:
    expected = None
    if "pattern" in entry:
        name = entry["pattern"]
        if not isinstance(name, str) or name not in PATTERN_NAMES:
            raise InvalidParameterError(f"unknown pattern {name!r}; use one of {sorted(PATTERN_NAMES)}")
        base = make_pattern_channel(PATTERN_NAMES[name], joint)
    elif "channel" in entry:
        mapping = entry["channel"]
        if isinstance(mapping, str):
            if mapping not in TOY_CHANNELS:
                raise InvalidParameterError(f"unknown channel {mapping!r}; use one of {sorted(TOY_CHANNELS)}")
            name = mapping
            base = TOY_CHANNELS[mapping]
            expected = TOY_EXPECTED[mapping] if toy else None
        elif isinstance(mapping, list):
            name = "channel"
            base = DeterministicChannel(tuple(_number(int, image, "channel") for image in mapping))
        else:
            raise InvalidParameterError(f"'channel' must be a toy channel name or a list of images, got {mapping!r}")
    else:
        raise InvalidParameterError("a transformation needs a 'pattern' or a 'channel'")
    noise = _noise(entry.get("noise"), base)
    if noise is None:
        return base, expected, name
    return StochasticChannel(base, noise), None, name


def scenario_from_document(document: Mapping[str, Any]) -> SimulationRequest:
    joint, toy = _source(document)
    channel, expected, name = _channel(document, joint, toy)
    scenario = Scenario(joint, channel, expected, str(document.get("name", name)))
    return SimulationRequest(scenario, _number(int, document.get("samples", 0), "samples"),
                             _number(int, document.get("seed", 0), "seed"))


def candidates_from_document(document: Mapping[str, Any]) -> SweepRequest:
    joint, toy = _source(document)
    entries = document.get("candidates", "toy")
    if entries == "toy":
        if not toy:
            raise InvalidParameterError("\"toy\" candidates are defined on the toy source only")
        scenarios = make_toy_scenario()
    elif isinstance(entries, list) and entries:
        scenarios = []
        for position, entry in enumerate(entries):
            entry = _mapping(entry, f"candidates[{position}]")
            channel, expected, name = _channel(entry, joint, toy)
            scenarios.append(Scenario(joint, channel, expected, str(entry.get("name", f"{name}-{position}"))))
    else:
        raise InvalidParameterError("'candidates' must be \"toy\" or a non-empty list")
    candidates: List[Candidate] = [Candidate(s.name, quantities_from_joint(exact_joint(s))) for s in scenarios]
    return SweepRequest(
        tuple(candidates),
        _number_list(document.get("alphas", []), "alphas"),
        _number_list(document.get("betas", []), "betas"),
    )
