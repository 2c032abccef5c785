from abc import ABC, abstractmethod
from datetime import datetime
from enum import Enum, auto
from typing import Any, Dict, Mapping


class EventType(Enum):
    """Types of run events that can be archived."""
    COMMAND_STARTED = auto()
    REPORT_WRITTEN = auto()
    CONSTRAINT_FAILED = auto()
    RUN_WARNING = auto()
    RUN_ERROR = auto()
    RUN_FINISHED = auto()


class ArchivistPort(ABC):
    """
    Port interface for archiving the events of a toolkit run.
    Implementations of this interface can store events in different backends.
    """

    @abstractmethod
    def record_event(self, event_type: EventType, data: Dict[str, Any], timestamp: datetime) -> None:
        """
        Record an event with the specified type and data.

        Args:
            event_type: The type of event
            data: JSON-compatible data associated with the event
            timestamp: Timestamp for the event
        """
        pass

    def _record_event(self, event_type: EventType, data: Dict[str, Any]) -> None:
        self.record_event(event_type, data, datetime.now())

    def record_command(self, command: str, parameters: Mapping[str, Any]) -> None:
        """
        Record the start of a command.

        Args:
            command: The command name, e.g. "analyze"
            parameters: The parameters it was started with
        """
        self._record_event(
            EventType.COMMAND_STARTED,
            {
                "command": command,
                "parameters": dict(parameters),
            }
        )

    def record_report(self, location: str) -> None:
        self._record_event(
            EventType.REPORT_WRITTEN,
            {
                "location": location
            }
        )

    def record_constraint_failure(self, check) -> None:
        """
        Record a failed constraint check.

        Args:
            check: a ConstraintCheck (name, relation and slack are archived)
        """
        self._record_event(
            EventType.CONSTRAINT_FAILED,
            {
                "name": check.name,
                "relation": check.relation,
                "slack": float(check.slack),
            }
        )

    def record_warning(self, message: str) -> None:
        self._record_event(
            EventType.RUN_WARNING,
            {
                "message": message
            }
        )

    def record_error(self, error: Exception) -> None:
        self._record_event(
            EventType.RUN_ERROR,
            {
                "error": str(error),
                "kind": type(error).__name__,
            }
        )

    def record_finished(self, exit_code: int) -> None:
        self._record_event(
            EventType.RUN_FINISHED,
            {
                "exit_code": exit_code
            }
        )

    @abstractmethod
    def close(self) -> None:
        pass
