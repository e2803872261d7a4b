class HyperlabError(Exception):
    """Base class for all errors raised by this package."""


class InputError(HyperlabError):
    """Invalid argument, configuration value or presentation."""


class ResourceLimitError(HyperlabError):
    """A computation would exceed the configured element or quadruple cap."""


class NumericError(HyperlabError):
    """A floating-point solve failed to converge or left its valid range."""


class InvariantViolation(HyperlabError):
    """An internal consistency check that should never fail did fail."""


class UnsupportedElementError(HyperlabError):
    """The operation is undefined for this element or group kind."""
