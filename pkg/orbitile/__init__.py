from orbitile.util import logger  # noqa: F401  configures the package logger
