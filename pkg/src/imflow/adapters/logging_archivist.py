import logging
from datetime import datetime
from typing import Any, Dict

from imflow.ports.archivist_port import ArchivistPort, EventType

_LEVELS = {
    EventType.CONSTRAINT_FAILED: logging.INFO,
    EventType.RUN_WARNING: logging.WARNING,
    EventType.RUN_ERROR: logging.ERROR,
}


class LoggingArchivist(ArchivistPort):
    """
    Mirrors run events into the log. Errors and warnings keep their level,
    everything else is logged at DEBUG.
    """

    def __init__(self, logger_name: str = "imflow.events"):
        self._logger = logging.getLogger(logger_name)

    def record_event(self, event_type: EventType, data: Dict[str, Any], timestamp: datetime) -> None:
        self._logger.log(_LEVELS.get(event_type, logging.DEBUG), "%s %s", event_type.name, data)

    def close(self) -> None:
        pass
