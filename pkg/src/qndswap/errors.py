"""Exception types shared across the package."""


class QndSwapError(Exception):
    """Base class for all package errors."""


class NumericFailure(QndSwapError):
    """A quadrature or eigensolve did not reach the required accuracy."""


class ConsistencyError(QndSwapError):
    """A structural property (parity, tetrads, symplecticity) was violated."""


class ConfigError(QndSwapError, ValueError):
    """Invalid configuration or mismatched inputs."""


class SingularParameterError(QndSwapError, ValueError):
    """Parameters at which a closed-form expression is undefined."""
