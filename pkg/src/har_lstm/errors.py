"""Shared exception base so the CLI can map failures to exit codes."""


class HarLstmError(Exception):
    """Base class for data, model and training errors raised by this package."""
