"""
The information matrix of a transformation f between a source X and a target Y.

H(X) is split into four amounts, in bits:

                      filtered out by f    filtered in by f
    irrelevant for Y        a                    b
    relevant for Y          c                    d

with a = N_xy - N_xy[f], b = N_xy[f], c = L_xy[f] - L_xy and d = I_xy - c.
"""
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from imflow.core.errors import (
    InconsistentInputsError,
    InvalidParameterError,
    InvariantBreachError,
)
from imflow.core.probability import (
    JointTable,
    conditional_entropy,
    entropy,
    mutual_information,
)

_LOGGER = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9
DEFAULT_TAU = 0.05


@dataclass(frozen=True)
class InfoQuantities:
    """
    Every entropy and mutual information needed to describe X -> f(X) -> Y.

    The `_xxf` fields look at the relation X -> f(X), the `_xyf` fields at
    f(X) -> Y. All values are in bits.
    """
    h_x: float
    h_y: float
    h_f: float
    n_xy: float
    l_xy: float
    n_xxf: float
    l_xxf: float
    n_xyf: float
    l_xyf: float
    i_xy: float
    i_xxf: float
    i_xyf: float
    dloss: float

    def identity_residuals(self) -> Dict[str, float]:
        return {
            "i_xy = h_x - n_xy": self.i_xy - (self.h_x - self.n_xy),
            "i_xy = h_y - l_xy": self.i_xy - (self.h_y - self.l_xy),
            "i_xxf = h_f - n_xxf": self.i_xxf - (self.h_f - self.n_xxf),
            "i_xxf = h_x - l_xxf": self.i_xxf - (self.h_x - self.l_xxf),
            "i_xyf = h_f - n_xyf": self.i_xyf - (self.h_f - self.n_xyf),
            "i_xyf = h_y - l_xyf": self.i_xyf - (self.h_y - self.l_xyf),
            "i_xyf + n_xyf = i_xxf + n_xxf": (self.i_xyf + self.n_xyf) - (self.i_xxf + self.n_xxf),
            "dloss = l_xyf - l_xy": self.dloss - (self.l_xyf - self.l_xy),
        }

    def violations(self, tolerance: float = IDENTITY_TOLERANCE) -> List[str]:
        return [name for name, residual in self.identity_residuals().items() if abs(residual) > tolerance]

    def is_deterministic(self, tolerance: float = IDENTITY_TOLERANCE) -> bool:
        return self.n_xxf <= tolerance

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def quantities_from_joint(table: JointTable) -> InfoQuantities:
    """
    Compute every InfoQuantities field from a joint table over X, T and Y.

    T holds the output of the transformation. Raises AxisError when an axis is
    missing and InvariantBreachError if the results are not mutually consistent.
    """
    table.resolve(("X", "T", "Y"))
    l_xy = conditional_entropy(table, "Y", "X")
    l_xyf = conditional_entropy(table, "Y", "T")
    quantities = InfoQuantities(
        h_x=entropy(table, "X"),
        h_y=entropy(table, "Y"),
        h_f=entropy(table, "T"),
        n_xy=conditional_entropy(table, "X", "Y"),
        l_xy=l_xy,
        n_xxf=conditional_entropy(table, "T", "X"),
        l_xxf=conditional_entropy(table, "X", "T"),
        n_xyf=conditional_entropy(table, "T", "Y"),
        l_xyf=l_xyf,
        i_xy=mutual_information(table, "X", "Y"),
        i_xxf=mutual_information(table, "X", "T"),
        i_xyf=mutual_information(table, "T", "Y"),
        dloss=l_xyf - l_xy,
    )
    broken = quantities.violations()
    if broken:
        raise InvariantBreachError(f"entropy identities violated: {broken}")
    return quantities


def identity_quantities(q: InfoQuantities) -> InfoQuantities:
    """Quantities of the identity transformation on the same X and Y."""
    return InfoQuantities(
        h_x=q.h_x, h_y=q.h_y, h_f=q.h_x,
        n_xy=q.n_xy, l_xy=q.l_xy,
        n_xxf=0.0, l_xxf=0.0,
        n_xyf=q.n_xy, l_xyf=q.l_xy,
        i_xy=q.i_xy, i_xxf=q.h_x, i_xyf=q.i_xy,
        dloss=0.0,
    )


@dataclass(frozen=True)
class InformationMatrix:
    """
    The 2x2 split of H(X): a (removed irrelevant), b (unremoved irrelevant),
    c (lost relevant), d (retained relevant), plus the quantities it came from.
    """
    a: float
    b: float
    c: float
    d: float
    source: InfoQuantities

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def entries(self) -> Dict[str, float]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    def negative_entries(self, tolerance: float = IDENTITY_TOLERANCE) -> List[str]:
        return [name for name, value in self.entries().items() if value < -tolerance]

    @property
    def entropy_expansion(self) -> bool:
        # a + c = h_x - h_f
        return self.a + self.c < -IDENTITY_TOLERANCE


def information_matrix(q: InfoQuantities) -> InformationMatrix:
    matrix = InformationMatrix(
        a=q.n_xy - q.n_xyf,
        b=q.n_xyf,
        c=q.dloss,
        d=q.i_xy - q.dloss,
        source=q,
    )
    negative = matrix.negative_entries()
    if negative:
        _LOGGER.warning("information matrix has negative entries %s", negative)
    if matrix.entropy_expansion:
        _LOGGER.warning("entropy expansion: H(f(X)) = %.6f exceeds H(X) = %.6f", q.h_f, q.h_x)
    return matrix


def initial_matrix(q: InfoQuantities) -> InformationMatrix:
    """IM[X]: all information still on the filtered-in side, (0, n_xy, 0, i_xy)."""
    return information_matrix(identity_quantities(q))


class Mode(Enum):
    DETERMINISTIC = "det"
    STOCHASTIC = "stoch"


@dataclass(frozen=True)
class ConstraintCheck:
    """
    One checked relation.

    `slack` is the amount, in bits, by which the relation is exceeded: zero or
    negative when it holds, positive when it is violated (for equalities, the
    absolute difference).
    """
    name: str
    relation: str
    observed: Dict[str, float]
    passed: bool
    slack: float


@dataclass(frozen=True)
class ConstraintReport:
    mode: Mode
    checks: Tuple[ConstraintCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[ConstraintCheck]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str) -> ConstraintCheck:
        for candidate in self.checks:
            if candidate.name == name:
                return candidate
        raise KeyError(name)


def _equal(name, relation, lhs, rhs, observed, tolerance) -> ConstraintCheck:
    slack = abs(lhs - rhs)
    return ConstraintCheck(name, relation, observed, slack <= tolerance, slack)


def _at_most(name, relation, lhs, rhs, observed, tolerance) -> ConstraintCheck:
    slack = lhs - rhs
    return ConstraintCheck(name, relation, observed, slack <= tolerance, slack)


def _within(name, relation, value, lower, upper, observed, tolerance) -> ConstraintCheck:
    slack = max(lower - value, value - upper)
    return ConstraintCheck(name, relation, observed, slack <= tolerance, slack)


def verify_constraints(m: InformationMatrix, mode: Mode = Mode.DETERMINISTIC,
                       tol: float = IDENTITY_TOLERANCE) -> ConstraintReport:
    """
    Check the row/column sums, the fundamental equation and the admissible
    ranges of noise, loss and matrix entries for the given mode.

    Sum identities use IDENTITY_TOLERANCE; range checks use `tol`. Failed
    checks are entries of the report, never exceptions.
    """
    if tol < 0:
        raise InvalidParameterError(f"tolerance must be non-negative, got {tol}")
    mode = Mode(mode)
    q = m.source
    a, b, c, d = m.a, m.b, m.c, m.d
    exact = IDENTITY_TOLERANCE
    checks = [
        _equal("irrelevant row sum", "a + b = n_xy", a + b, q.n_xy,
               {"a": a, "b": b, "n_xy": q.n_xy}, exact),
        _equal("relevant row sum", "c + d = i_xy", c + d, q.i_xy,
               {"c": c, "d": d, "i_xy": q.i_xy}, exact),
        _equal("filtered-in column sum", "b + d = h_f", b + d, q.h_f,
               {"b": b, "d": d, "h_f": q.h_f}, exact),
        _equal("filtered-out column sum", "a + c = h_x - h_f", a + c, q.h_x - q.h_f,
               {"a": a, "c": c, "h_x": q.h_x, "h_f": q.h_f}, exact),
        _equal("total sum", "a + b + c + d = h_x", a + b + c + d, q.h_x,
               {"a": a, "b": b, "c": c, "d": d, "h_x": q.h_x}, exact),
        _equal("fundamental equation", "i_xyf + n_xyf = i_xxf + n_xxf",
               q.i_xyf + q.n_xyf, q.i_xxf + q.n_xxf,
               {"i_xyf": q.i_xyf, "n_xyf": q.n_xyf, "i_xxf": q.i_xxf, "n_xxf": q.n_xxf}, exact),
        _at_most("overall information", "h_f <= h_x", q.h_f, q.h_x,
                 {"h_f": q.h_f, "h_x": q.h_x}, tol),
    ]
    if mode is Mode.DETERMINISTIC:
        z = 0.0
        checks.append(_at_most("determinism", "n_xxf <= tol", q.n_xxf, 0.0, {"n_xxf": q.n_xxf}, tol))
        checks.append(_at_most("noise lower bound", "0 <= n_xyf", 0.0, q.n_xyf, {"n_xyf": q.n_xyf}, tol))
        checks.append(_at_most("loss lower bound", "l_xy <= l_xyf", q.l_xy, q.l_xyf,
                               {"l_xy": q.l_xy, "l_xyf": q.l_xyf}, tol))
    else:
        z = q.n_xxf
        checks.append(_at_most("noise lower bound", "n_xxf <= n_xyf", q.n_xxf, q.n_xyf,
                               {"n_xxf": q.n_xxf, "n_xyf": q.n_xyf}, tol))
        checks.append(_at_most("loss lower bound", "l_xy + n_xxf <= l_xyf", q.l_xy + q.n_xxf, q.l_xyf,
                               {"l_xy": q.l_xy, "n_xxf": q.n_xxf, "l_xyf": q.l_xyf}, tol))
    checks += [
        _at_most("noise upper bound", "n_xyf <= n_xy", q.n_xyf, q.n_xy,
                 {"n_xyf": q.n_xyf, "n_xy": q.n_xy}, tol),
        _at_most("loss upper bound", "l_xyf <= h_y", q.l_xyf, q.h_y,
                 {"l_xyf": q.l_xyf, "h_y": q.h_y}, tol),
        _within("a range", "0 <= a <= n_xy - n_xxf", a, 0.0, q.n_xy - z, {"a": a}, tol),
        _within("b range", "n_xxf <= b <= n_xy", b, z, q.n_xy, {"b": b}, tol),
        _within("c range", "n_xxf <= c <= i_xy", c, z, q.i_xy, {"c": c}, tol),
        _within("d range", "0 <= d <= i_xy - n_xxf", d, 0.0, q.i_xy - z, {"d": d}, tol),
    ]
    report = ConstraintReport(mode, tuple(checks))
    overall = report.check("overall information")
    if not overall.passed:
        _LOGGER.warning("H(f(X)) exceeds H(X) by %.3g bits", overall.slack)
    return report


@dataclass(frozen=True)
class NoiseLossPoint:
    """Position in the noise-loss diagram: x = removed noise a, y = retained relevance d."""
    x_coord: float
    y_coord: float

    def within_bounds(self, n_xy: float, i_xy: float, tolerance: float = IDENTITY_TOLERANCE) -> bool:
        return (-tolerance <= self.x_coord <= n_xy + tolerance
                and -tolerance <= self.y_coord <= i_xy + tolerance)


def noise_loss_point(m: InformationMatrix) -> NoiseLossPoint:
    return NoiseLossPoint(x_coord=m.a, y_coord=m.d)


def ixx_from_point(p: NoiseLossPoint, n_xy: float, n_xxf: float = 0.0) -> float:
    """
    I(X; f(X)) on the 45 degree isometric through a noise-loss point.

    i_xxf = y - x + n_xy - n_xxf; the deterministic case is n_xxf = 0.
    """
    if n_xy < -IDENTITY_TOLERANCE or n_xxf < -IDENTITY_TOLERANCE:
        raise InconsistentInputsError(f"n_xy and n_xxf must be non-negative, got {n_xy}, {n_xxf}")
    value = p.y_coord - p.x_coord + n_xy - n_xxf
    if value < -IDENTITY_TOLERANCE:
        raise InconsistentInputsError(
            f"point ({p.x_coord}, {p.y_coord}) with n_xy={n_xy}, n_xxf={n_xxf} gives I(X;f(X)) = {value}")
    return max(value, 0.0)


class PatternKind(Enum):
    LOSSLESS = "Lossless"
    MAX_DISCRIMINATIVE = "MaxDiscriminative"
    DUMMY = "Dummy"
    RANDOM = "Random"
    INTERMEDIATE = "Intermediate"


# normalised (a / n_xy, d / i_xy); listed in tie-breaking order
CORNERS = {
    PatternKind.MAX_DISCRIMINATIVE: (1.0, 1.0),
    PatternKind.LOSSLESS: (0.0, 1.0),
    PatternKind.DUMMY: (1.0, 0.0),
    PatternKind.RANDOM: (0.0, 0.0),
}


@dataclass(frozen=True)
class PatternLabel:
    kind: PatternKind
    oracle: bool = False
    distance: Optional[float] = field(default=None, compare=False)


def _normalised(value: float, scale: float) -> Optional[float]:
    return value / scale if scale > IDENTITY_TOLERANCE else None


def classify_pattern(m: InformationMatrix, tau: float = DEFAULT_TAU) -> PatternLabel:
    """
    Label the corner of the noise-loss diagram nearest to the matrix.

    Coordinates are normalised by n_xy and i_xy; an axis whose scale is zero
    has a single admissible value and contributes no distance. The nearest
    corner wins when its Chebyshev distance is within tau, otherwise the
    matrix is Intermediate.
    """
    if not 0 < tau < 0.5:
        raise InvalidParameterError(f"tau must lie in (0, 0.5), got {tau}")
    q = m.source
    x = _normalised(m.a, q.n_xy)
    y = _normalised(m.d, q.i_xy)
    best_kind, best_distance = None, None
    for kind, (corner_x, corner_y) in CORNERS.items():
        distance = max(0.0 if x is None else abs(x - corner_x),
                       0.0 if y is None else abs(y - corner_y))
        if best_distance is None or distance < best_distance:
            best_kind, best_distance = kind, distance
    if best_distance > tau:
        return PatternLabel(PatternKind.INTERMEDIATE, False, best_distance)
    oracle = best_kind is PatternKind.MAX_DISCRIMINATIVE and q.l_xy <= tau * q.h_y
    return PatternLabel(best_kind, oracle, best_distance)


def pattern_matrix(kind: PatternKind, q: InfoQuantities, n_xxf: float = 0.0) -> Tuple[float, float, float, float]:
    """
    Expected (a, b, c, d) of a corner pattern for the X/Y problem described by q.

    n_xxf = 0 gives the deterministic patterns; a positive n_xxf gives their
    counterparts under noise injected by the transformation.
    """
    z = n_xxf
    if kind is PatternKind.LOSSLESS:
        return 0.0, q.n_xy, z, q.i_xy - z
    if kind is PatternKind.MAX_DISCRIMINATIVE:
        return q.n_xy - z, z, z, q.i_xy - z
    if kind is PatternKind.DUMMY:
        return q.n_xy - z, z, q.i_xy, 0.0
    if kind is PatternKind.RANDOM:
        return 0.0, q.n_xy, q.i_xy, 0.0
    raise InvalidParameterError(f"{kind.value} has no corner matrix")


@dataclass(frozen=True)
class IsometricEntry:
    point: NoiseLossPoint
    i_xxf: float


def isometric_table(q: InfoQuantities, n_xxf: float = 0.0) -> Dict[PatternKind, IsometricEntry]:
    """Noise-loss coordinates and I(X; f(X)) of every corner pattern."""
    table = {}
    for kind in (PatternKind.LOSSLESS, PatternKind.MAX_DISCRIMINATIVE, PatternKind.DUMMY, PatternKind.RANDOM):
        a, _, _, d = pattern_matrix(kind, q, n_xxf)
        point = NoiseLossPoint(a, d)
        table[kind] = IsometricEntry(point, ixx_from_point(point, q.n_xy, n_xxf))
    return table


@dataclass(frozen=True)
class MatrixAnalysis:
    """Everything measured about one transformation."""
    quantities: InfoQuantities
    matrix: InformationMatrix
    constraints: ConstraintReport
    point: NoiseLossPoint
    pattern: PatternLabel
    i_xxf_from_point: float


def analyze(table: JointTable, mode: Mode = Mode.DETERMINISTIC, tol: float = IDENTITY_TOLERANCE,
            tau: float = DEFAULT_TAU) -> MatrixAnalysis:
    return analyze_quantities(quantities_from_joint(table), mode, tol, tau)


def analyze_quantities(quantities: InfoQuantities, mode: Mode = Mode.DETERMINISTIC,
                       tol: float = IDENTITY_TOLERANCE, tau: float = DEFAULT_TAU) -> MatrixAnalysis:
    mode = Mode(mode)
    matrix = information_matrix(quantities)
    point = noise_loss_point(matrix)
    n_xxf = quantities.n_xxf if mode is Mode.STOCHASTIC else 0.0
    try:
        i_xxf = ixx_from_point(point, quantities.n_xy, n_xxf)
    except InconsistentInputsError:
        # only reachable in det mode on non-deterministic data; the constraint report flags it
        i_xxf = point.y_coord - point.x_coord + quantities.n_xy - n_xxf
    return MatrixAnalysis(
        quantities=quantities,
        matrix=matrix,
        constraints=verify_constraints(matrix, mode, tol),
        point=point,
        pattern=classify_pattern(matrix, tau),
        i_xxf_from_point=i_xxf,
    )
