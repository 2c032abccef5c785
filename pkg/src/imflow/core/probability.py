"""
Discrete probability tables and plug-in information measures.

All quantities are in bits (log base 2) and are computed with the plug-in
(maximum-likelihood) estimator: empirical frequencies are used directly,
without bias correction, so that the algebraic identities between entropies
hold exactly up to floating point error.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import entropy as _pmf_entropy

from imflow.core.errors import (
    AxisError,
    DiscretizationError,
    EmptyTableError,
    InvalidParameterError,
    LengthMismatchError,
    NegativeInformationError,
)

_LOGGER = logging.getLogger(__name__)

AXIS_NAMES = ("X", "T", "Y")
ESTIMATOR = "plug-in"
CLAMP_TOLERANCE = 1e-9

AxisSpec = Union[str, Sequence[str]]


class Strategy(Enum):
    """How a Discretizer places its bin edges."""
    UNIFORM = "uniform"
    QUANTILE = "quantile"


@dataclass(frozen=True)
class Discretizer:
    """
    Maps real-valued row vectors to bin indices, one index per dimension.

    Args:
        strategy: uniform-width bins or equal-frequency (quantile) bins
        bins_per_dimension: number of bins along each dimension, at least 2
        ranges: optional (lower, upper) per dimension; taken from the data when None
    """
    strategy: Strategy = Strategy.UNIFORM
    bins_per_dimension: int = 16
    ranges: Optional[Tuple[Tuple[float, float], ...]] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "strategy", Strategy(self.strategy))
        except ValueError:
            raise InvalidParameterError(f"unknown binning strategy: {self.strategy!r}")
        if int(self.bins_per_dimension) != self.bins_per_dimension or self.bins_per_dimension < 2:
            raise InvalidParameterError(
                f"bins_per_dimension must be an integer >= 2, got {self.bins_per_dimension}")
        object.__setattr__(self, "bins_per_dimension", int(self.bins_per_dimension))
        if self.ranges is not None:
            ranges = tuple((float(lower), float(upper)) for lower, upper in self.ranges)
            for dimension, (lower, upper) in enumerate(ranges):
                if not (np.isfinite(lower) and np.isfinite(upper)) or lower > upper:
                    raise InvalidParameterError(
                        f"invalid range ({lower}, {upper}) for dimension {dimension}")
            object.__setattr__(self, "ranges", ranges)

    def bin_indices(self, raw) -> np.ndarray:
        """
        Bin every value of a matrix of row vectors.

        Args:
            raw: matrix (samples x dimensions) or a single column of reals

        Returns:
            np.ndarray: integer bin indices with the same shape as the matrix
        """
        values = _as_finite_matrix(raw)
        lower, upper = self._bounds(values)
        clipped = np.clip(values, lower, upper)
        indices = np.zeros(values.shape, dtype=np.int64)
        live = upper > lower
        if not live.any():
            return indices
        if self.strategy is Strategy.UNIFORM:
            scaled = (clipped[:, live] - lower[live]) / (upper[live] - lower[live])
            indices[:, live] = np.clip(
                np.floor(scaled * self.bins_per_dimension), 0, self.bins_per_dimension - 1)
        else:
            levels = np.linspace(0.0, 1.0, self.bins_per_dimension + 1)
            for dimension in np.flatnonzero(live):
                column = clipped[:, dimension]
                edges = np.quantile(column, levels)
                indices[:, dimension] = np.searchsorted(edges[1:-1], column, side="right")
        return indices

    def _bounds(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.ranges is None:
            if len(values) == 0:
                empty = np.zeros(values.shape[1])
                return empty, empty
            return values.min(axis=0), values.max(axis=0)
        if len(self.ranges) != values.shape[1]:
            raise DiscretizationError(
                f"discretizer has {len(self.ranges)} ranges but data has {values.shape[1]} dimensions")
        bounds = np.array(self.ranges, dtype=float)
        return bounds[:, 0], bounds[:, 1]


def _as_finite_matrix(raw) -> np.ndarray:
    try:
        values = np.asarray(raw, dtype=float)
    except ValueError as e:
        raise DiscretizationError(f"rows must all have the same dimension: {e}")
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    if values.ndim != 2:
        raise DiscretizationError(f"expected a matrix of row vectors, got {values.ndim} dimensions")
    bad = np.argwhere(~np.isfinite(values))
    if len(bad):
        row, dimension = bad[0]
        raise DiscretizationError(
            f"non-finite value {values[row, dimension]} at row {row}, dimension {dimension}")
    return values


def encode_rows(rows) -> np.ndarray:
    """
    Dictionary-encode rows (or scalar labels) as dense non-negative symbols.

    Equal rows get equal symbols and distinct rows distinct symbols; the full
    tuple is compared, nothing is hashed.
    """
    matrix = np.asarray(rows)
    if len(matrix) == 0:
        return np.zeros(0, dtype=np.int64)
    if matrix.ndim == 1:
        _, inverse = np.unique(matrix, return_inverse=True)
    else:
        _, inverse = np.unique(matrix.reshape(len(matrix), -1), axis=0, return_inverse=True)
    return inverse.reshape(-1).astype(np.int64)


def discretize(raw, discretizer: Discretizer = Discretizer()) -> np.ndarray:
    """
    Turn real-valued row vectors into one Symbol per row.

    Each row is binned per dimension and the resulting tuple of bin indices is
    dictionary-encoded, so identical rows always share a symbol.
    """
    return encode_rows(discretizer.bin_indices(raw))


@dataclass(frozen=True)
class JointTable:
    """
    Sparse joint table over named discrete axes.

    Only cells with positive mass are stored: `cells` holds one row of symbol
    ids per cell (one column per axis) and `mass` the matching non-negative
    mass. Duplicate cells given at construction are merged.
    """
    axes: Tuple[str, ...]
    cells: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        axes = (self.axes,) if isinstance(self.axes, str) else tuple(self.axes)
        if not axes or len(set(axes)) != len(axes):
            raise AxisError(f"axes must be non-empty and distinct, got {axes}")
        cells = np.asarray(self.cells, dtype=np.int64).reshape(-1, len(axes))
        mass = np.asarray(self.mass, dtype=float).reshape(-1)
        if len(cells) != len(mass):
            raise LengthMismatchError(f"{len(cells)} cells but {len(mass)} mass entries")
        if (cells < 0).any():
            raise InvalidParameterError("symbol ids must be non-negative")
        if not np.isfinite(mass).all() or (mass < 0).any():
            raise InvalidParameterError("mass must be finite and non-negative")
        cells, mass = _merge_cells(cells, mass)
        cells.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "mass", mass)

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())

    def probabilities(self) -> np.ndarray:
        total = self.total_mass
        if total <= 0:
            raise EmptyTableError("joint table has no mass")
        return self.mass / total

    def normalized(self) -> "JointTable":
        return JointTable(self.axes, self.cells, self.probabilities())

    def column(self, axis: str) -> np.ndarray:
        return self.cells[:, self._index(axis)]

    def marginal(self, axes: AxisSpec) -> "JointTable":
        names = self.resolve(axes)
        return JointTable(names, self.cells[:, [self._index(name) for name in names]], self.mass)

    def marginal_mass(self, axes: AxisSpec) -> np.ndarray:
        """Masses of the distinct symbol tuples on the given axes."""
        return self.marginal(axes).mass

    def alphabet_size(self, axes: AxisSpec) -> int:
        return len(self.marginal(axes).mass)

    def as_dict(self) -> Dict[Tuple[int, ...], float]:
        return {tuple(int(s) for s in cell): float(m) for cell, m in zip(self.cells, self.mass)}

    def resolve(self, axes: AxisSpec) -> Tuple[str, ...]:
        names = (axes,) if isinstance(axes, str) else tuple(axes)
        if not names:
            raise AxisError("at least one axis is required")
        if len(set(names)) != len(names):
            raise AxisError(f"duplicated axes in {names}")
        for name in names:
            self._index(name)
        return names

    def _index(self, axis: str) -> int:
        try:
            return self.axes.index(axis)
        except ValueError:
            raise AxisError(f"axis {axis!r} not in table axes {self.axes}")


def _merge_cells(cells: np.ndarray, mass: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if len(cells) == 0:
        return cells.copy(), mass.copy()
    unique, inverse = np.unique(cells, axis=0, return_inverse=True)
    merged = np.bincount(inverse.reshape(-1), weights=mass, minlength=len(unique))
    keep = merged > 0
    return np.ascontiguousarray(unique[keep]), merged[keep]


def joint_from_samples(columns: Mapping[str, Sequence[int]]) -> JointTable:
    """
    Count occurrences of symbol tuples across aligned sample columns.

    Args:
        columns: one Symbol column per axis, keyed by axis name (order kept)

    Returns:
        JointTable: mass of each tuple equals its count, total mass the sample count
    """
    if not columns:
        raise AxisError("at least one column is required")
    arrays = []
    for name, column in columns.items():
        array = np.asarray(column)
        if array.ndim != 1:
            raise InvalidParameterError(f"column {name!r} must be one-dimensional")
        if len(array) and array.dtype.kind not in "iub":
            raise InvalidParameterError(f"column {name!r} must hold integer symbols")
        arrays.append(array.astype(np.int64))
    lengths = {len(array) for array in arrays}
    if len(lengths) != 1:
        raise LengthMismatchError(f"columns have different lengths: {sorted(lengths)}")
    if lengths == {0}:
        raise EmptyTableError("no samples")
    cells = np.column_stack(arrays)
    return JointTable(tuple(columns.keys()), cells, np.ones(len(cells)))


def _clamp(value: float, what: str) -> float:
    if value >= 0:
        return value
    if value >= -CLAMP_TOLERANCE:
        return 0.0
    raise NegativeInformationError(f"{what} evaluated to {value} bits")


def entropy(table: JointTable, axes: AxisSpec) -> float:
    """Plug-in Shannon entropy, in bits, of the marginal on the given axes."""
    names = table.resolve(axes)
    if table.total_mass <= 0:
        raise EmptyTableError("entropy of an empty table")
    return _clamp(float(_pmf_entropy(table.marginal_mass(names), base=2)), f"H({','.join(names)})")


def _disjoint(table: JointTable, first: AxisSpec, second: AxisSpec) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    a = table.resolve(first)
    b = () if not second else table.resolve(second)
    overlap = set(a) & set(b)
    if overlap:
        raise AxisError(f"axis sets overlap on {sorted(overlap)}")
    return a, b


def conditional_entropy(table: JointTable, target: AxisSpec, given: AxisSpec) -> float:
    """H(target | given) = H(target, given) - H(given), in bits."""
    target_axes, given_axes = _disjoint(table, target, given)
    if not given_axes:
        return entropy(table, target_axes)
    value = entropy(table, target_axes + given_axes) - entropy(table, given_axes)
    return _clamp(value, f"H({','.join(target_axes)}|{','.join(given_axes)})")


def mutual_information(table: JointTable, a: AxisSpec, b: AxisSpec) -> float:
    """I(a; b) = H(a) + H(b) - H(a, b), in bits; symmetric in its arguments."""
    first, second = _disjoint(table, a, b)
    if not second:
        raise AxisError("mutual information needs two non-empty axis sets")
    value = entropy(table, first) + entropy(table, second) - entropy(table, first + second)
    return _clamp(value, f"I({','.join(first)};{','.join(second)})")
