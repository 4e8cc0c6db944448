"""Exception types shared across the package.

Every domain error raised on purpose derives from :class:`ScwError` so the
command line layer can map it to a machine-readable report and exit code 1,
leaving genuine bugs (plain exceptions) to surface as tracebacks.
"""


class ScwError(Exception):
    """Base class for domain errors raised by scwlink."""

    #: short machine-readable tag, overridden by subclasses
    code = "domain_error"


class DimensionError(ScwError):
    """Lengths or shapes of related arguments disagree."""

    code = "dimension_mismatch"


class ParameterError(ScwError):
    """A parameter value is outside its documented domain."""

    code = "invalid_parameter"


class EnumerationCapError(ScwError):
    """Requested enumeration would exceed the configured size cap.

    Carries the exact codebook size so callers can report it without
    re-deriving the count.
    """

    code = "enumeration_cap_exceeded"

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(
            f"full codebook has {size} codewords, above the cap of {cap}"
        )


class CsiError(ScwError):
    """Channel-state information is missing or degenerate for the operation."""

    code = "invalid_csi"


class CodebookError(ScwError):
    """A codebook does not satisfy the preconditions of the operation."""

    code = "invalid_codebook"


class ConfigError(ScwError):
    """A configuration document is malformed or contains unknown keys."""

    code = "invalid_config"
