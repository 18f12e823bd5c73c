"""
Logging for slopeforge.

Everything goes to stderr, so stdout carries only command results. Long
batch runs can also keep a rotating log file (LOG_FILE).
"""
import copy
import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ColoredFormatter(logging.Formatter):
    """Level names in ANSI color, for terminals only."""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
        'RESET': '\033[0m'
    }

    def format(self, record: logging.LogRecord) -> str:
        # the file handler sees the same record
        record = copy.copy(record)
        color = self.COLORS.get(record.levelname)
        if color:
            record.levelname = f"{color}{record.levelname}{self.COLORS['RESET']}"
        return super().format(record)


def effective_level(level: str, verbosity: int = 0) -> str:
    """Lower `level` by one step per -v, never below DEBUG."""
    index = LEVELS.index(level.upper())
    return LEVELS[max(index - verbosity, 0)]


def setup_logging(
    level: str = "WARNING",
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    max_file_size_mb: int = 10,
    backup_count: int = 5
) -> None:
    """Replace the root handlers with a stderr handler and an optional rotating file."""
    numeric_level = getattr(logging, level.upper())
    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)
    root_logger.handlers = []
    format_string = format_string or '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    formatter = ColoredFormatter if sys.stderr.isatty() else logging.Formatter
    console_handler.setFormatter(formatter(format_string))
    root_logger.addHandler(console_handler)

    if log_file:
        try:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = RotatingFileHandler(
                log_file,
                maxBytes=max_file_size_mb * 1024 * 1024,
                backupCount=backup_count,
                encoding='utf-8'
            )
            file_handler.setLevel(numeric_level)
            file_handler.setFormatter(logging.Formatter(format_string))
            root_logger.addHandler(file_handler)
        except OSError as e:
            root_logger.error(f"cannot open log file {log_file}: {e}")

    root_logger.debug(f"log level {level.upper()}")


_initialized = False


def init_logging_from_config(verbosity: int = 0, force: bool = False) -> None:
    """Set up logging once from LOG_LEVEL / LOG_FILE, lowered by `verbosity`."""
    global _initialized

    if _initialized and not force:
        return

    try:
        from src.utils.config import get_config

        config = get_config()
        setup_logging(
            level=effective_level(config.log.level, verbosity),
            log_file=config.log.file,
            format_string=config.log.format
        )
    except Exception as e:
        setup_logging(level=effective_level("WARNING", verbosity))
        logging.getLogger(__name__).warning(f"logging configuration ignored: {e}")
    _initialized = True
