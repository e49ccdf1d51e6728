"""Exception hierarchy shared by all modules.

CLI exit codes: ConfigError -> 2, DomainError -> 3, ResourceError -> 4,
check-mode threshold failures -> 5.
"""


class DomainError(ValueError):
    """Inputs outside the mathematical domain of an operation."""


class ExcludedCaseError(DomainError):
    """Parameter combination the theory explicitly excludes (beta = (alpha-1)/2, gamma < gamma0)."""


class ResourceError(RuntimeError):
    """Operation refused because it would exceed a configured cost ceiling."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its accuracy target."""


class ConfigError(ValueError):
    """Bad CLI / config file input."""
