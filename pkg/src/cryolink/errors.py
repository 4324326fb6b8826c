"""Exception hierarchy shared by every cryolink module."""


class CryoLinkError(Exception):
    """Base class for all errors raised by cryolink."""


class DomainError(CryoLinkError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class TemperatureRangeError(DomainError):
    """A temperature falls outside the tabulated range of a material model."""


class ValidationError(CryoLinkError, ValueError):
    """A model or scenario file is structurally invalid.

    ``path`` is the dotted key path of the offending entry, when known.
    """

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class UnsupportedConfigurationError(CryoLinkError):
    """The request is valid but outside what the models support."""


class InfeasibleError(CryoLinkError):
    """An optimization has no solution meeting the requested target.

    ``limiting`` names what blocks feasibility (a stage name or a noise term).
    """

    def __init__(self, message: str, limiting: str | None = None):
        self.limiting = limiting
        super().__init__(message)
