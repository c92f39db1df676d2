"""Exception hierarchy shared by all modules."""


class TorsorError(Exception):
    """Base class for every error raised by the package."""


class InputError(TorsorError):
    """Malformed or inconsistent user input."""


class NegativeValuation(InputError):
    pass


class DivisionByZero(TorsorError, ZeroDivisionError):
    pass


class PolySyntaxError(InputError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
            if text is not None:
                message += f"\n  {text}\n  {' ' * position}^"
        super().__init__(message)


class UndeclaredVariable(InputError):
    pass


class ZeroPolynomial(InputError):
    pass


class ResourceLimit(TorsorError):
    pass


class ModelRingError(InputError):
    """A coefficient cannot be written in the polynomial model ring k[pi, ...]."""


class SectionInvalid(InputError):
    pass


class NotFlat(TorsorError):
    pass


class NotFlatWarning(UserWarning):
    pass


class DoesNotFactor(TorsorError):
    pass


class IllFormedMap(TorsorError):
    pass


class UnsupportedParameters(InputError):
    pass


class StructureMapNotTransportable(TorsorError):
    pass


class NotABasis(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NoEmbedding(InputError):
    pass


class EmbeddingMissing(NoEmbedding):
    pass


class PointMissing(InputError):
    pass


class GuardFailure(TorsorError):
    """Mathematical guard failure; the CLI maps these to exit code 2."""


class FinitenessGuardFailed(GuardFailure):
    def __init__(self, message, fiber=None):
        super().__init__(message)
        self.fiber = fiber


class MaxBlowupsExceeded(GuardFailure):
    pass
