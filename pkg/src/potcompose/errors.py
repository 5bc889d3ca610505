"""Exception hierarchy shared by all modules."""


class PotComposeError(Exception):
    """Base class for every error raised by the package."""


class DegenerateRecurrence(PotComposeError, ArithmeticError):
    """A three-term recurrence coefficient vanished."""


class ParamOutOfRange(PotComposeError, ValueError):
    """Potential parameters violate the family's admissible range."""


class IndexOutOfRange(PotComposeError, IndexError):
    """Eigenstate or seed degree outside the admissible bracket."""


class EmptyRange(IndexOutOfRange):
    """No integer degree satisfies the admissibility window."""


class ConstructionCheckFailed(PotComposeError, RuntimeError):
    """A seed failed one of its construction-time self checks."""


class NodeDetected(ConstructionCheckFailed):
    """A supposedly nodeless function changes sign."""


class BoundaryCheckFailed(ConstructionCheckFailed):
    """Tail-integral boundary condition (A) or (B) does not hold."""


class QuadratureFailure(PotComposeError, RuntimeError):
    """Adaptive quadrature could not meet the requested tolerance."""


class NoSignChange(PotComposeError, ValueError):
    """Bisection bracket does not straddle a sign change."""


class MixedOwners(PotComposeError, ValueError):
    """Solutions passed together belong to different potentials."""


class TargetLowerInfinite(PotComposeError, ValueError):
    """Mapping target interval has an infinite lower endpoint."""


class MappingCheckFailed(PotComposeError, RuntimeError):
    """The mapping function failed its monotonicity or limit probes."""


class SeedOwnerMismatch(PotComposeError, ValueError):
    """A second-stage seed does not belong to the first stage's System 1."""
