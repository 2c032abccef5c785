from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from imflow.core.errors import DatasetError


@dataclass(frozen=True)
class Dataset:
    """
    A loaded table: every column kept as strings, in header order.

    Conversion to numbers happens on request, so label columns stay exact.
    """
    source: str
    header: Tuple[str, ...]
    columns: Dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.columns[self.header[0]]) if self.header else 0

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise DatasetError(f"{self.source} has no column {name!r}; columns are {list(self.header)}")
        return self.columns[name]

    def labels(self, names: Sequence[str]) -> np.ndarray:
        """The named columns as a (rows x columns) matrix of strings."""
        return np.column_stack([self.column(name) for name in names])

    def numeric(self, names: Sequence[str]) -> np.ndarray:
        """The named columns as a (rows x columns) float matrix."""
        values = []
        for name in names:
            try:
                values.append(self.column(name).astype(float))
            except ValueError:
                raise DatasetError(f"column {name!r} of {self.source} is not numeric")
        return np.column_stack(values)


class DatasetPort(ABC):
    """
    Port interface for loading tabular datasets.
    """

    @abstractmethod
    def load(self, path: str) -> Dataset:
        """
        Load a dataset.

        Args:
            path: Where the dataset lives

        Returns:
            Dataset: the parsed table; raises DatasetError when it cannot be parsed
        """
        pass
