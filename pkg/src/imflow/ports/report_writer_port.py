from abc import ABC, abstractmethod
from typing import Any, Mapping, Sequence


class ReportWriterPort(ABC):
    """
    Port interface for emitting reports and tables.
    This defines the boundary between the toolkit core and wherever its results go.
    """

    @abstractmethod
    def write_report(self, name: str, report: Mapping[str, Any]) -> str:
        """
        Emit a JSON-compatible report.

        Args:
            name: Short name of the artifact, e.g. "report"
            report: The report document

        Returns:
            str: where the report went (a path, or a stream name)
        """
        pass

    @abstractmethod
    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]],
                    primary: bool = False) -> str:
        """
        Emit a table as CSV.

        Args:
            name: Short name of the artifact, e.g. "diagram" or "samples"
            header: Column names
            rows: One sequence per row, aligned with header
            primary: Whether this is the command's main tabular output

        Returns:
            str: where the table went, or an empty string if it was not emitted
        """
        pass
