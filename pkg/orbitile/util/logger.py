import copy
import logging
import os
import re
import sys
import traceback
from datetime import datetime
from typing import Any, Literal, Mapping

from termcolor import colored


def _env_flag(name: str) -> bool:
    return os.getenv(name, 'False').lower() in ['true', '1', 'yes']


LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()
DEBUG = _env_flag('DEBUG')
if DEBUG:
    LOG_LEVEL = 'DEBUG'

LOG_TO_FILE = _env_flag('LOG_TO_FILE')
DISABLE_COLOR_PRINTING = _env_flag('DISABLE_COLOR_PRINTING')

ColorType = Literal['red', 'green', 'yellow', 'cyan', 'light_red', 'light_green', 'light_blue', 'light_magenta', 'light_cyan']

# msg_type extra -> colour; records without one use the plain handler format
LOG_COLORS: Mapping[str, ColorType] = {
    'SYSTEM': 'light_blue',
    'ALPHABET': 'light_magenta',
    'ORBIT': 'green',
    'GRAPH': 'cyan',
    'FAMILY': 'light_cyan',
    'RENDER': 'yellow',
    'VERDICT': 'light_green',
    'WARNING': 'light_red',
    'ERROR': 'red',
}
TYPE_WIDTH = max(len(t) for t in LOG_COLORS)

ANSI_PATTERN = re.compile(r'\x1B\[\d+(;\d+){0,2}m')


def strip_ansi(s: str) -> str:
    """Removes ANSI colour escape sequences from a string."""
    return ANSI_PATTERN.sub('', s)


class NoColorFormatter(logging.Formatter):
    """Formatter for the log file: same records, no escape codes."""

    def format(self, record: logging.LogRecord) -> str:
        # the console handler formats the same record afterwards
        new_record: logging.LogRecord = copy.deepcopy(record)
        new_record.msg = strip_ansi(str(new_record.msg))
        return super().format(new_record)


class ColoredFormatter(logging.Formatter):
    """One line per record, tagged and coloured by its ``msg_type``.

    Errors, and every record in DEBUG mode, also carry the source location.
    """

    def format(self, record):
        msg_type = record.__dict__.get('msg_type')
        if msg_type not in LOG_COLORS or DISABLE_COLOR_PRINTING:
            return super().format(record)
        color = LOG_COLORS[msg_type]
        head = f'{self.formatTime(record, self.datefmt)} {msg_type:<{TYPE_WIDTH}}'
        if msg_type == 'ERROR' or DEBUG:
            head += f' {record.filename}:{record.lineno}'
        text = f'{colored(head, color)} {record.getMessage()}'
        if record.exc_info:
            text += '\n' + self.formatException(record.exc_info)
        return text


file_formatter = NoColorFormatter(
    '%(asctime)s %(levelname)s %(name)s %(filename)s:%(lineno)s - %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S',
)


def get_console_handler(log_level: int = logging.INFO, extra_info: str | None = None):
    """Returns a console handler for logging.

    The handler writes to standard error; standard output is reserved for the
    JSON documents the command line emits.
    """
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    formatter_str = '%(asctime)s %(levelname)s %(name)s - %(message)s'
    if extra_info:
        formatter_str = f'{extra_info} - ' + formatter_str
    console_handler.setFormatter(ColoredFormatter(formatter_str, datefmt='%H:%M:%S'))
    return console_handler


def get_file_handler(log_dir: str, log_level: int = logging.INFO):
    """Returns a handler appending to ``<log_dir>/orbitile_<date>.log``."""
    os.makedirs(log_dir, exist_ok=True)
    file_name = f'orbitile_{datetime.now():%Y-%m-%d}.log'
    file_handler = logging.FileHandler(os.path.join(log_dir, file_name))
    file_handler.setLevel(log_level)
    file_handler.setFormatter(file_formatter)
    return file_handler


def format_settings(settings: Mapping[str, Any]) -> str:
    """``key=value`` pairs in key order, skipping unset values."""
    return ' '.join(f'{k}={settings[k]}' for k in sorted(settings) if settings[k] is not None)


def log_settings(command: str, settings: Mapping[str, Any]) -> None:
    """Record what a run needs to be repeated: offsets, seed, bit budget."""
    orbitile_logger.info('orbitile %s: %s', command, format_settings(settings), extra={'msg_type': 'SYSTEM'})


def log_uncaught_exceptions(ex_cls, ex, tb):
    """Logs uncaught exceptions along with the traceback.

    Args:
        ex_cls (type): The type of the exception.
        ex (Exception): The exception instance.
        tb (traceback): The traceback object.
    """
    orbitile_logger.error(''.join(traceback.format_tb(tb)), extra={'msg_type': 'ERROR'})
    orbitile_logger.error(f'{ex_cls.__name__}: {ex}', extra={'msg_type': 'ERROR'})


sys.excepthook = log_uncaught_exceptions
orbitile_logger = logging.getLogger('orbitile')
current_log_level = logging.getLevelNamesMapping().get(LOG_LEVEL, logging.INFO)
orbitile_logger.setLevel(current_log_level)

if current_log_level == logging.DEBUG:
    LOG_TO_FILE = True

orbitile_logger.addHandler(get_console_handler(current_log_level))
orbitile_logger.propagate = False

# <repo>/logs, next to the orbitile package
LOG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))), 'logs')

if LOG_TO_FILE:
    orbitile_logger.addHandler(get_file_handler(LOG_DIR, current_log_level))
    orbitile_logger.debug('Logging to file in: %s', LOG_DIR)
