"""Logging configuration and utilities for Radiocov.

Radiocov uses Python's standard logging module. The library is silent by
default (a NullHandler sits on the root ``radiocov`` logger); applications,
including the bundled command line, decide what gets printed.

Quick Start:
    >>> import logging
    >>> import radiocov
    >>>
    >>> logging.basicConfig(
    ...     level=logging.INFO,
    ...     format='%(asctime)s [%(name)s] %(levelname)s: %(message)s'
    ... )
    >>> coverage = radiocov.predict_serial(dem, clutter, transmitters, diagrams, params)

Logger Hierarchy:
    radiocov                           # Root logger
    ├── radiocov.terrain               # Raster I/O and sub-region extraction
    ├── radiocov.propagation           # LOS walks, path loss, clutter tables
    ├── radiocov.antenna               # Diagram loading and antenna influence
    ├── radiocov.engine                # Serial pipeline and aggregation
    ├── radiocov.runtime               # Master/worker protocol
    │   ├── radiocov.runtime.master    # Work-pool loop, Result incorporation
    │   ├── radiocov.runtime.worker    # Compute loop, result-dump thread
    │   └── radiocov.runtime.transport # Channel and TCP links
    ├── radiocov.store                 # Per-transmitter result tables
    ├── radiocov.bench                 # Timing harness
    └── radiocov.cli                   # Command-line surface

Targeted Debugging Example:
    >>> import logging
    >>> logging.basicConfig(level=logging.WARNING)
    >>> logging.getLogger('radiocov.runtime').setLevel(logging.DEBUG)
"""

from __future__ import annotations

import logging

__all__ = [
    "get_logger",
    "configure_null_handler",
]

ROOT_LOGGER_NAME = "radiocov"


def get_logger(name: str) -> logging.Logger:
    """Get a logger under the ``radiocov`` hierarchy.

    The ``radiocov.`` prefix is added when missing, so both ``get_logger(__name__)``
    and ``get_logger('runtime.master')`` land in the same tree.

    Args:
        name: Logger name, typically ``__name__``.

    Returns:
        The hierarchical logger.
    """
    if name.startswith(f"{ROOT_LOGGER_NAME}.") or name == ROOT_LOGGER_NAME:
        full_name = name
    else:
        full_name = f"{ROOT_LOGGER_NAME}.{name}"

    return logging.getLogger(full_name)


def configure_null_handler() -> None:
    """Attach a NullHandler to the root Radiocov logger.

    Called on import. Safe to call repeatedly: the handler is only added when the
    root logger has none.
    """
    root_logger = logging.getLogger(ROOT_LOGGER_NAME)

    if not root_logger.handlers:
        root_logger.addHandler(logging.NullHandler())

    root_logger.propagate = True


configure_null_handler()
