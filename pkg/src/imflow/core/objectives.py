"""
Optimisation objectives over finite candidate families of transformations.

Every objective is minimised. The parametric objective
alpha * N_xy[f] + (1 - alpha) * L_xy[f] and the reformulated bottleneck
Lagrangian N_xy[f] + (beta - 1) * L_xy[f] differ by the positive factor
1 / alpha when beta = 1 / alpha, so they select the same candidates.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from imflow.core.errors import InvalidParameterError, StochasticCandidateError
from imflow.core.info_matrix import IDENTITY_TOLERANCE, InfoQuantities

_LOGGER = logging.getLogger(__name__)

ARGMIN_TOLERANCE = 1e-12


class ObjectiveKind(Enum):
    LOSS_ONLY = "loss_only"
    NOISE_ONLY = "noise_only"
    DIAGONAL = "diagonal"
    PARAMETRIC = "parametric"
    IB_REFORMULATED = "ib_reformulated"
    IB_RAW = "ib_raw"


_NEEDS_ALPHA = {ObjectiveKind.PARAMETRIC}
_NEEDS_BETA = {ObjectiveKind.IB_REFORMULATED, ObjectiveKind.IB_RAW}


@dataclass(frozen=True)
class ObjectiveSpec:
    """
    Which objective to evaluate, with its parameter: alpha in [0, 1] for the
    parametric objective, beta >= 0 for both bottleneck Lagrangians.
    """
    kind: ObjectiveKind
    parameter: Optional[float] = None

    def __post_init__(self):
        try:
            kind = ObjectiveKind(self.kind)
        except ValueError:
            raise InvalidParameterError(f"unknown objective: {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind in _NEEDS_ALPHA | _NEEDS_BETA:
            if self.parameter is None:
                raise InvalidParameterError(f"{kind.value} needs a parameter")
            object.__setattr__(self, "parameter", float(self.parameter))
        elif self.parameter is not None:
            raise InvalidParameterError(f"{kind.value} takes no parameter")
        if kind in _NEEDS_ALPHA and not 0.0 <= self.parameter <= 1.0:
            raise InvalidParameterError(f"alpha must lie in [0, 1], got {self.parameter}")
        if kind in _NEEDS_BETA:
            if not self.parameter >= 0.0:
                raise InvalidParameterError(f"beta must be >= 0, got {self.parameter}")
            if self.parameter < 1.0:
                _LOGGER.warning("beta = %g < 1: the Lagrangian favours discarding relevant information "
                                "and tends to select dummy predictors", self.parameter)

    @classmethod
    def loss_only(cls) -> "ObjectiveSpec":
        return cls(ObjectiveKind.LOSS_ONLY)

    @classmethod
    def noise_only(cls) -> "ObjectiveSpec":
        return cls(ObjectiveKind.NOISE_ONLY)

    @classmethod
    def diagonal(cls) -> "ObjectiveSpec":
        return cls(ObjectiveKind.DIAGONAL)

    @classmethod
    def parametric(cls, alpha: float) -> "ObjectiveSpec":
        return cls(ObjectiveKind.PARAMETRIC, alpha)

    @classmethod
    def ib_reformulated(cls, beta: float) -> "ObjectiveSpec":
        return cls(ObjectiveKind.IB_REFORMULATED, beta)

    @classmethod
    def ib_raw(cls, beta: float) -> "ObjectiveSpec":
        return cls(ObjectiveKind.IB_RAW, beta)

    @property
    def label(self) -> str:
        if self.kind in _NEEDS_ALPHA:
            return f"{self.kind.value}(alpha={self.parameter:g})"
        if self.kind in _NEEDS_BETA:
            return f"{self.kind.value}(beta={self.parameter:g})"
        return self.kind.value


@dataclass(frozen=True)
class Candidate:
    name: str
    quantities: InfoQuantities


@dataclass(frozen=True)
class SelectionResult:
    """
    Objective values of every candidate, the full set of minimisers (in
    candidate order) and the single selected candidate (the first minimiser).
    """
    spec: ObjectiveSpec
    values: Dict[str, float]
    argmin_set: Tuple[str, ...]
    selected: str


def objective_value(spec: ObjectiveSpec, q: InfoQuantities) -> float:
    kind = spec.kind
    if kind is ObjectiveKind.LOSS_ONLY:
        return q.l_xyf
    if kind is ObjectiveKind.NOISE_ONLY:
        return q.n_xyf
    if kind is ObjectiveKind.DIAGONAL:
        return q.n_xyf + q.l_xyf
    if kind is ObjectiveKind.PARAMETRIC:
        alpha = spec.parameter
        return alpha * q.n_xyf + (1.0 - alpha) * q.l_xyf
    if kind is ObjectiveKind.IB_REFORMULATED:
        return q.n_xyf + (spec.parameter - 1.0) * q.l_xyf
    return q.i_xxf - spec.parameter * q.i_xyf


def _checked(candidates: Sequence[Candidate]) -> List[Candidate]:
    candidates = list(candidates)
    if not candidates:
        raise InvalidParameterError("at least one candidate is required")
    names = [candidate.name for candidate in candidates]
    if len(set(names)) != len(names):
        raise InvalidParameterError(f"candidate names must be unique, got {names}")
    return candidates


def select(candidates: Sequence[Candidate], spec: ObjectiveSpec) -> SelectionResult:
    candidates = _checked(candidates)
    values = {candidate.name: objective_value(spec, candidate.quantities) for candidate in candidates}
    minimum = min(values.values())
    argmin = tuple(name for name, value in values.items() if value - minimum <= ARGMIN_TOLERANCE)
    return SelectionResult(spec, values, argmin, argmin[0])


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    parametric: SelectionResult
    reformulated: SelectionResult


def equivalence_check(candidates: Sequence[Candidate], alpha: float) -> EquivalenceResult:
    """Compare the minimisers of parametric(alpha) and ib_reformulated(1 / alpha)."""
    if alpha == 0:
        raise InvalidParameterError("alpha = 0 has no matching beta")
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1], got {alpha}")
    parametric = select(candidates, ObjectiveSpec.parametric(alpha))
    reformulated = select(candidates, ObjectiveSpec.ib_reformulated(1.0 / alpha))
    return EquivalenceResult(set(parametric.argmin_set) == set(reformulated.argmin_set),
                             parametric, reformulated)


def is_deterministic_family(candidates: Iterable[Candidate]) -> bool:
    return all(candidate.quantities.n_xxf <= IDENTITY_TOLERANCE for candidate in candidates)


def raw_vs_reformulated_check(candidates: Sequence[Candidate], beta: float) -> bool:
    """
    Whether the raw Lagrangian I(X;f(X)) - beta * I(f(X);Y) and the
    reformulated one pick the same minimisers.

    Only meaningful for deterministic candidates, where the two differ by the
    candidate-independent constant (1 - beta) * H(Y).
    """
    candidates = _checked(candidates)
    stochastic = [c.name for c in candidates if c.quantities.n_xxf > IDENTITY_TOLERANCE]
    if stochastic:
        raise StochasticCandidateError(f"candidates inject noise: {stochastic}")
    raw = select(candidates, ObjectiveSpec.ib_raw(beta))
    reformulated = select(candidates, ObjectiveSpec.ib_reformulated(beta))
    return set(raw.argmin_set) == set(reformulated.argmin_set)


VERDICT_TRUE = "true"
VERDICT_FALSE = "false"
VERDICT_UNDEFINED = "undefined"
VERDICT_NOT_APPLICABLE = "not applicable"


def _verdict(flag: bool) -> str:
    return VERDICT_TRUE if flag else VERDICT_FALSE


@dataclass(frozen=True)
class SweepRow:
    """
    One grid point of a sweep.

    For an alpha row, `selection` is parametric(alpha) and `companion` is
    ib_reformulated(1 / alpha). For a beta row, `selection` is
    ib_reformulated(beta) and `companion` is ib_raw(beta).
    """
    parameter: str
    value: float
    selection: SelectionResult
    companion: Optional[SelectionResult]
    verdict: str


@dataclass(frozen=True)
class SweepTable:
    candidates: Tuple[str, ...]
    deterministic_family: bool
    rows: Tuple[SweepRow, ...]


def objective_sweep(candidates: Sequence[Candidate], alphas: Sequence[float] = (),
                    betas: Sequence[float] = ()) -> SweepTable:
    candidates = _checked(candidates)
    deterministic = is_deterministic_family(candidates)
    rows = []
    for alpha in alphas:
        selection = select(candidates, ObjectiveSpec.parametric(alpha))
        if alpha == 0:
            rows.append(SweepRow("alpha", float(alpha), selection, None, VERDICT_UNDEFINED))
            continue
        result = equivalence_check(candidates, alpha)
        rows.append(SweepRow("alpha", float(alpha), selection, result.reformulated,
                             _verdict(result.equivalent)))
    for beta in betas:
        selection = select(candidates, ObjectiveSpec.ib_reformulated(beta))
        raw = select(candidates, ObjectiveSpec.ib_raw(beta))
        if deterministic:
            verdict = _verdict(set(raw.argmin_set) == set(selection.argmin_set))
        else:
            verdict = VERDICT_NOT_APPLICABLE
        rows.append(SweepRow("beta", float(beta), selection, raw, verdict))
    return SweepTable(tuple(c.name for c in candidates), deterministic, tuple(rows))
