"""Exception types raised by state constructors, channels, and optimizers."""


class NotAState(ValueError):
    """Matrix fails a density-matrix invariant (hermiticity, trace, or positivity)."""


class BadDistribution(ValueError):
    """Probability vector is negative or does not sum to one."""


class EpsilonMismatch(ValueError):
    """Two deviation states with different epsilon were combined."""


class BadIndex(ValueError):
    """Protocol step index outside 1..3."""


class UnknownKind(ValueError):
    """Unrecognized or unsupported state-preparation kind."""


class SequenceMismatch(RuntimeError):
    """Composite pulse sequence does not reproduce its ideal gate."""


class OptimizerFailure(RuntimeError):
    """Measurement-basis refinement did not converge within its budget."""
