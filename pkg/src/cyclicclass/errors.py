"""Exception root shared by every module."""


class CyclicClassError(Exception):
    """Base class for all errors raised by this package."""
