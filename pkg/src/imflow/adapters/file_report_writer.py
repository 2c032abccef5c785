import json
import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, TextIO

import pandas as pd

from imflow.core.errors import InvalidParameterError
from imflow.ports.report_writer_port import ReportWriterPort

_LOGGER = logging.getLogger(__name__)

FORMATS = ("json", "csv")


class FileReportWriter(ReportWriterPort):
    """
    Writes reports as JSON and tables as CSV.

    With an output directory every artifact becomes <out_dir>/<name>.json or
    <name>.csv. Without one, a single artifact goes to the stream: the report
    in json format, the primary table in csv format. Commands without a
    primary table write their report in either format; tables are written
    before the report.
    """

    def __init__(self, out_dir: Optional[str] = None, stream: Optional[TextIO] = None,
                 output_format: str = "json"):
        if output_format not in FORMATS:
            raise InvalidParameterError(f"format must be one of {FORMATS}, got {output_format!r}")
        if out_dir is None and stream is None:
            raise InvalidParameterError("either an output directory or a stream is required")
        self._out_dir = Path(out_dir) if out_dir is not None else None
        self._stream = stream
        self._format = output_format
        self._primary_written = False
        if self._out_dir is not None:
            try:
                self._out_dir.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                raise InvalidParameterError(f"cannot create output directory {out_dir}: {e}")

    def write_report(self, name: str, report: Mapping[str, Any]) -> str:
        text = json.dumps(report, indent=2) + "\n"
        if self._out_dir is not None:
            return self._write_file(f"{name}.json", text)
        if self._format != "json" and self._primary_written:
            _LOGGER.info("report %s not emitted in %s format", name, self._format)
            return ""
        self._stream.write(text)
        return "<stdout>"

    def write_table(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]],
                    primary: bool = False) -> str:
        text = pd.DataFrame.from_records(rows, columns=list(header)).to_csv(index=False, lineterminator="\n")
        if self._out_dir is not None:
            return self._write_file(f"{name}.csv", text)
        if self._format != "csv" or not primary:
            _LOGGER.info("table %s not emitted; pass an output directory to keep it", name)
            return ""
        self._stream.write(text)
        self._primary_written = True
        return "<stdout>"

    def _write_file(self, file_name: str, text: str) -> str:
        path = self._out_dir / file_name
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise InvalidParameterError(f"cannot write {path}: {e}")
        return str(path)
