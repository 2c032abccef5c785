import logging
import os
import sys
from typing import Mapping, Optional

ENV_VAR = "IMFLOW_LOG"
DEFAULT_LEVEL = logging.WARNING
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(environ: Optional[Mapping[str, str]] = None) -> int:
    """
    Configure logging from the IMFLOW_LOG level name (DEBUG, INFO, WARNING...).

    Logs go to stderr so reports on stdout stay parseable. Unknown level names
    fall back to WARNING.

    Returns:
        int: the level applied to the imflow loggers
    """
    environ = os.environ if environ is None else environ
    name = environ.get(ENV_VAR, "").strip().upper()
    level = logging.getLevelName(name) if name else DEFAULT_LEVEL
    unknown = not isinstance(level, int)
    if unknown:
        level = DEFAULT_LEVEL
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger("imflow").setLevel(level)
    if unknown:
        logging.getLogger(__name__).warning("unknown %s level %r, using WARNING", ENV_VAR, name)
    return level
