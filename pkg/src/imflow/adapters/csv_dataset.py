import logging

import pandas as pd

from imflow.core.errors import DatasetError
from imflow.ports.dataset_port import Dataset, DatasetPort

_LOGGER = logging.getLogger(__name__)


class CsvDatasetAdapter(DatasetPort):
    """
    Loads comma-separated UTF-8 files with a mandatory header row.

    Cells are read as strings; short rows and empty files are rejected.
    """

    def __init__(self, separator: str = ",", encoding: str = "utf-8"):
        self._separator = separator
        self._encoding = encoding

    def load(self, path: str) -> Dataset:
        try:
            frame = pd.read_csv(path, sep=self._separator, encoding=self._encoding,
                                dtype=str, keep_default_na=False, skipinitialspace=True)
        except pd.errors.EmptyDataError:
            raise DatasetError(f"{path} is empty")
        except (pd.errors.ParserError, UnicodeDecodeError, OSError) as e:
            raise DatasetError(f"cannot parse {path}: {e}")
        if frame.empty:
            raise DatasetError(f"{path} has a header but no rows")
        missing = frame.isna().any(axis=1)
        if missing.any():
            raise DatasetError(f"{path} row {int(missing.to_numpy().argmax()) + 1} has missing fields")
        _LOGGER.debug("loaded %d rows x %d columns from %s", len(frame), len(frame.columns), path)
        header = tuple(str(name) for name in frame.columns)
        return Dataset(
            source=str(path),
            header=header,
            columns={name: frame[name].to_numpy(dtype=str) for name in header},
        )
