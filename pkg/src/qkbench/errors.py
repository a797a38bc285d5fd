class ConfigurationError(ValueError):
    """Invalid sizes, parameters or combinations supplied by the caller."""


class DataFormatError(ValueError):
    """Malformed or inconsistent dataset files."""
