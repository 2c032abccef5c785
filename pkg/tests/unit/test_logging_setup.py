import logging

import pytest
from hamcrest import assert_that, equal_to

from imflow.logging_setup import ENV_VAR, configure_logging


@pytest.fixture(autouse=True)
def restore_level():
    logger = logging.getLogger("imflow")
    level = logger.level
    yield
    logger.setLevel(level)


class TestConfigureLogging:
    """Tests for log level configuration from the environment."""

    def test_default_is_warning(self):
        """Test that without IMFLOW_LOG the imflow loggers log warnings and above."""
        level = configure_logging({})

        assert_that(level, equal_to(logging.WARNING))
        assert_that(logging.getLogger("imflow").level, equal_to(logging.WARNING))

    def test_level_name_is_case_insensitive(self):
        """Test that IMFLOW_LOG=debug enables debug logging."""
        level = configure_logging({ENV_VAR: "debug"})

        assert_that(level, equal_to(logging.DEBUG))
        assert_that(logging.getLogger("imflow.core.mlp").getEffectiveLevel(), equal_to(logging.DEBUG))

    def test_unknown_level_falls_back(self, caplog):
        """Test that an unknown level name falls back to WARNING with a warning."""
        with caplog.at_level(logging.WARNING):
            level = configure_logging({ENV_VAR: "chatty"})

        assert_that(level, equal_to(logging.WARNING))
        assert "CHATTY" in caplog.text
