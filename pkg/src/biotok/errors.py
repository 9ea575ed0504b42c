"""Exception types shared across the toolkit.

The CLI maps these onto its exit-code contract: ``ConfigError`` exits 1,
``DataError`` exits 2.
"""


class BiotokError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(BiotokError):
    """Invalid configuration or unusable parameter combination."""


class DataError(BiotokError):
    """Malformed or inconsistent input data."""


class VocabFormatError(DataError):
    """A vocabulary file violates the one-token-per-line contract."""
