import sys

from loguru import logger


LOG_FORMAT = "> <level>{level:<7} {message}</level>"

logger.configure(handlers=[dict(sink=sys.stderr, format=LOG_FORMAT, level="INFO")])

__version__ = "0.1.0"
