from datetime import datetime

from helpers.doubles import MockArchivist
from imflow.core.info_matrix import ConstraintCheck
from imflow.ports.archivist_port import EventType


class TestArchivistPort:
    """Tests for the ArchivistPort interface."""

    def test_record_command(self):
        """Test that record_command calls record_event with the right parameters."""
        # Arrange
        archivist = MockArchivist()

        # Act
        archivist.record_command("analyze", {"bins": 16, "mode": "det"})

        # Assert
        assert len(archivist.events) == 1
        event_type, data, timestamp = archivist.events[0]
        assert event_type == EventType.COMMAND_STARTED
        assert data == {"command": "analyze", "parameters": {"bins": 16, "mode": "det"}}
        assert isinstance(timestamp, datetime)

    def test_record_report(self):
        """Test that record_report archives where the report went."""
        # Arrange
        archivist = MockArchivist()

        # Act
        archivist.record_report("out/report.json")

        # Assert
        event_type, data, _ = archivist.events[0]
        assert event_type == EventType.REPORT_WRITTEN
        assert data["location"] == "out/report.json"

    def test_record_constraint_failure(self):
        """Test that a failed check is archived with its name, relation and slack."""
        # Arrange
        archivist = MockArchivist()
        check = ConstraintCheck("determinism", "n_xxf <= tol", {"n_xxf": 0.5}, False, 0.5)

        # Act
        archivist.record_constraint_failure(check)

        # Assert
        event_type, data, _ = archivist.events[0]
        assert event_type == EventType.CONSTRAINT_FAILED
        assert data == {"name": "determinism", "relation": "n_xxf <= tol", "slack": 0.5}

    def test_record_warning(self):
        """Test that record_warning calls record_event with the right parameters."""
        # Arrange
        archivist = MockArchivist()

        # Act
        archivist.record_warning("layer 1 has 10 units")

        # Assert
        event_type, data, _ = archivist.events[0]
        assert event_type == EventType.RUN_WARNING
        assert data["message"] == "layer 1 has 10 units"

    def test_record_error(self):
        """Test that record_error archives the message and the error class."""
        # Arrange
        archivist = MockArchivist()

        # Act
        archivist.record_error(ValueError("ouch!"))

        # Assert
        event_type, data, _ = archivist.events[0]
        assert event_type == EventType.RUN_ERROR
        assert data == {"error": "ouch!", "kind": "ValueError"}

    def test_record_finished(self):
        """Test that record_finished archives the exit code."""
        # Arrange
        archivist = MockArchivist()

        # Act
        archivist.record_finished(3)

        # Assert
        event_type, data, _ = archivist.events[0]
        assert event_type == EventType.RUN_FINISHED
        assert data == {"exit_code": 3}
