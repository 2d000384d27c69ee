from typing import Optional


class OttoError(Exception):
    """Базовая ошибка библиотеки."""


class InvalidDimensionError(OttoError, ValueError):
    pass


class NotHermitianError(OttoError, ValueError):
    pass


class DimensionMismatchError(OttoError, ValueError):
    pass


class NormalizationError(OttoError, ValueError):
    pass


class BasisMismatchError(OttoError, ValueError):
    pass


class InvalidStateError(OttoError, ValueError):
    pass


class ConvergenceError(OttoError, RuntimeError):
    def __init__(self, message: str, achieved: float, iterations: Optional[int] = None) -> None:
        super().__init__(f"{message} (достигнутая ошибка {achieved:.3e})")
        self.achieved = achieved
        self.iterations = iterations
