"""Exception hierarchy shared by all modules."""


class ScatterWalkError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameterError(ScatterWalkError, ValueError):
    pass


class InvalidArgumentError(ScatterWalkError, ValueError):
    pass


class InvalidGraphError(ScatterWalkError, ValueError):
    pass


class InvalidFamilyError(ScatterWalkError, ValueError):
    pass


class UnsupportedError(ScatterWalkError, NotImplementedError):
    pass


class DimensionError(ScatterWalkError, ValueError):
    pass


class TooLargeError(ScatterWalkError, MemoryError):
    pass


class DomainViolationError(ScatterWalkError, ValueError):
    """A circuit gate received a state outside the domain it is defined on."""


class TranscriptionError(ScatterWalkError, AssertionError):
    """A collapsed matrix disagrees with the full-space step operator."""


class ResidualError(ScatterWalkError, ValueError):
    """The initial state is not (close enough to) inside the collapsed span."""

    def __init__(self, residual: float, threshold: float):
        super().__init__(f"residual {residual:.3e} exceeds threshold {threshold:.1e}")
        self.residual = residual
        self.threshold = threshold


class NoSolutionError(ScatterWalkError, ValueError):
    pass
