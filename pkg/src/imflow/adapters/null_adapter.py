from typing import Any, Mapping, Sequence

from imflow.ports.dataset_port import Dataset, DatasetPort
from imflow.ports.report_writer_port import ReportWriterPort


class NullReportWriter(ReportWriterPort):
    """
    A null implementation of the ReportWriterPort interface.
    It serves as a placeholder until a real writer is set.
    """

    def write_report(self, name: str, report: Mapping[str, Any]) -> str:
        raise NotImplementedError("No report writer has been set")

    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]],
                    primary: bool = False) -> str:
        raise NotImplementedError("No report writer has been set")


class NullDatasetLoader(DatasetPort):
    """
    A null implementation of the DatasetPort interface.
    It serves as a placeholder until a real loader is set.
    """

    def load(self, path: str) -> Dataset:
        raise NotImplementedError("No dataset loader has been set")
