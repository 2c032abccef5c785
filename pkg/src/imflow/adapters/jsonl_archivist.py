import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from imflow.ports.archivist_port import ArchivistPort, EventType


class JsonLinesArchivist(ArchivistPort):
    """
    JSON-lines implementation of the ArchivistPort interface.
    Appends one JSON object per event to a file.
    """

    def __init__(self, path: str):
        self._path = Path(path)
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._file = self._path.open("a", encoding="utf-8")
        self._next_id = len(self._read_lines()) + 1

    def record_event(self, event_type: EventType, data: Dict[str, Any], timestamp: datetime) -> None:
        event = {
            "id": self._next_id,
            "event_type": event_type.name,
            "timestamp": timestamp.isoformat(),
            "data": data,
        }
        self._file.write(json.dumps(event) + "\n")
        self._file.flush()
        self._next_id += 1

    def get_events(self, event_type: Optional[EventType] = None) -> List[dict]:
        events = [json.loads(line) for line in self._read_lines()]
        if event_type:
            events = [event for event in events if event["event_type"] == event_type.name]
        return events

    def clear(self) -> None:
        self._file.truncate(0)
        self._file.seek(0)
        self._next_id = 1

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    def _read_lines(self) -> List[str]:
        if not self._path.exists():
            return []
        with self._path.open(encoding="utf-8") as events:
            return [line for line in events.read().splitlines() if line.strip()]
