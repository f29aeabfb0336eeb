"""Shared exception types mapped onto CLI exit codes."""


class ValidationError(ValueError):
    """Domain or file-content validation failure (CLI exit code 1)."""


class FormatError(ValidationError):
    """Malformed structured input (bad schema, bad rows, unknown keys)."""


class InfeasibleConfigError(Exception):
    """Configuration that cannot produce a run (CLI exit code 3)."""
