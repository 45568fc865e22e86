"""Exception hierarchy for the amoeba toolkit."""


class AmoebaError(Exception):
    """Base class for all errors raised by this package."""


class NonPositiveVolume(AmoebaError):
    """Shape coefficients imply a non-positive body area."""


class OutOfDomain(AmoebaError):
    """Evaluation point outside the map's domain of definition."""


class SingularJacobian(AmoebaError):
    """Deformation Jacobian determinant vanished (shape self-overlaps)."""


class ZeroShape(AmoebaError):
    """Operation undefined for the zero coefficient vector."""


class SingularMr(AmoebaError):
    """Rigid mass matrix numerically singular (corrupted input)."""


class SingularK(AmoebaError):
    """Reduced mass matrix numerically singular (corrupted input)."""


class NonFiniteState(AmoebaError):
    """Integration produced a non-finite state entry."""


class StepTooLarge(AmoebaError):
    """Halving the time step moved the endpoint beyond the guard threshold."""


class UnknownPreset(AmoebaError):
    """Requested stroke preset name does not exist."""


class ConfigError(AmoebaError):
    """Invalid run configuration (CLI exit code 2)."""
