"""Exception hierarchy shared across the package."""


class MetrolabError(Exception):
    """Base class for all metrolab errors."""


class ContractViolationError(MetrolabError):
    """An input failed a structural contract (hermiticity, normalization, ...)."""


class ConfigError(MetrolabError):
    """A config file or experiment configuration is invalid."""


class DegenerateEncodingError(MetrolabError):
    """The rotation generator of the dephased family is undefined (single eigenspace)."""


class FlatSignalError(MetrolabError):
    """Error propagation hit a vanishing signal derivative."""


class IntegrationAccuracyError(MetrolabError):
    """A time integrator failed its internal accuracy check."""
