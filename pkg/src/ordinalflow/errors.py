"""Exception types shared across the package.

The CLI maps these onto its exit codes: ParseError -> 2,
AlignmentError -> 3, ConfigError -> 4.
"""


class OrdinalFlowError(Exception):
    """Base class for all package-specific errors."""


class ParseError(OrdinalFlowError):
    """A file (sidecar, frame container, report) is malformed."""


class AlignmentError(OrdinalFlowError):
    """Streams that must be index-aligned are not (gaps, duplicates,
    length mismatches)."""


class ConfigError(OrdinalFlowError):
    """A configuration value is unknown or out of range."""


class NotReadyError(OrdinalFlowError):
    """An operation was requested before the required state existed."""
