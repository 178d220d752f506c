"""Exception hierarchy shared by all modules."""


class FerminegError(Exception):
    """Base class for library errors."""


class GeometryError(FerminegError, ValueError):
    """Invalid lattice size, region layout or partition."""


class ContractError(FerminegError, ValueError):
    """A numerical contract (hermiticity, eigenvalue range, ...) was violated."""


class IllConditionedError(ContractError):
    """A matrix that must be inverted is numerically singular."""


class CapacityError(FerminegError, ValueError):
    """The exact many-body oracle was asked for more sites than it supports."""


class AccuracyError(FerminegError, RuntimeError):
    """Quadrature failed to reach the requested accuracy."""


class DomainError(FerminegError, ValueError):
    """Argument outside the domain of a special function."""


class ConfigError(FerminegError, ValueError):
    """Malformed, unknown or contradictory experiment configuration."""
