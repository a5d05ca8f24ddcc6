"""Exception types shared across the package."""


class CliffAdaptError(Exception):
    """Base class for all package errors."""


class DimensionError(CliffAdaptError):
    """Operands act on different qubit counts."""


class ResourceError(CliffAdaptError):
    """Requested size exceeds a configured cap (dense matrices, statevectors)."""


class ContractError(CliffAdaptError):
    """A precondition of an operation was violated (e.g. non-Hermitian observable)."""


class NonFactorizableMixerError(CliffAdaptError):
    """Mixer whose exponential is not a product of its term exponentials."""


class DegenerateApproximationError(CliffAdaptError):
    """Branch pruning removed every branch of a low-rank sum."""


class ConfigError(CliffAdaptError):
    """Invalid experiment configuration."""
