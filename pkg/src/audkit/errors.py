"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, data/format errors
-> 3, anything else escaping a stage -> 4.
"""


class AudkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(AudkitError):
    """Invalid configuration (bad flag value, inconsistent config file)."""


class DataError(AudkitError):
    """Data violates a value constraint (non-finite entries, bad counts)."""


class FormatError(DataError):
    """A file does not conform to its on-disk format."""


class DimensionError(DataError):
    """Shape or dimensionality mismatch between related objects."""


class ContiguityError(DataError):
    """Alignment entries leave a gap or overlap."""


class CoverageError(DataError):
    """Alignment does not cover the expected number of frames."""


class IoError(AudkitError):
    """Filesystem-level failure while reading or writing an artifact."""


class EmptySegmentError(DataError):
    """A zero-length segment was passed where frames are required."""


class InsufficientSamplesError(DataError):
    """Fewer samples than clusters requested."""


class EmptyInputError(DataError):
    """An operation requiring a non-empty collection received an empty one."""


class DuplicateKeyError(ConfigError):
    """A key that must be unique occurred more than once."""
