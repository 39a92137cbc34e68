"""Exception types raised by the simulation and analysis layers."""


class RetrievalError(Exception):
    """Base class for all domain errors."""


class PulseNotNegligibleAtStart(RetrievalError):
    """The read pulse is not vanishingly small at the integration start."""


class ToleranceNotMet(RetrievalError):
    """Adaptive step size underflowed before reaching the requested accuracy."""


class InsufficientSampling(RetrievalError):
    """Too few samples for the requested finite-difference diagnostic."""


class EmissionIncomplete(RetrievalError):
    """Trajectory was truncated while field or polarization flux remained."""


class NonUniformGrid(RetrievalError):
    """Operation requires uniformly spaced samples."""


class ZeroField(RetrievalError):
    """No emitted field: the matched filter and overlap are undefined."""


class AmplitudeTooSmall(RetrievalError):
    """Field amplitude below threshold everywhere; phase is undefined."""


class DegenerateBranches(RetrievalError):
    """The two elimination branches coincide; dual-branch form is singular."""


class WindowTooShort(RetrievalError):
    """Trajectory spans too little time for a delay fit."""


class ConfigError(RetrievalError):
    """Invalid sweep or point configuration."""
