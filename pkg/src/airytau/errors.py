"""Exception and warning types shared by all modules."""


class AirytauError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AirytauError, ValueError):
    """Input violates a documented precondition."""


class NumericalFailure(AirytauError, ArithmeticError):
    """A numerical method could not reach the requested accuracy."""


class SingularMatrix(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    def __init__(self, message: str, worst_residual=None):
        super().__init__(message)
        self.worst_residual = worst_residual


class DivergentTail(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class IllConditioned(NumericalFailure):
    pass


class StepTooSmall(NumericalFailure):
    pass


class BoundViolation(NumericalFailure):
    pass


class PoleProximity(NumericalFailure):
    pass


class OnRay(ValidationError):
    pass


class InvalidPartition(ValidationError):
    pass


class InfeasibleBinning(ValidationError):
    pass


class SectorViolation(ValidationError):
    pass


class NotExact(AirytauError):
    """A differential polynomial is not a total x-derivative."""


class MissingDerivative(ValidationError):
    pass


class SchemaError(ValidationError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer


class PrecisionLossWarning(RuntimeWarning):
    """Cancellation ate into the requested digits."""


class GrowthWarning(RuntimeWarning):
    """Derivative jet grew past half the working digits."""


class NearSingularWarning(RuntimeWarning):
    pass
