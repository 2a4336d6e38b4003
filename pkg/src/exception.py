class DimensionError(ValueError):
    pass


class ParameterError(ValueError):
    pass


class DegenerateInputError(ValueError):
    pass


class ConfigError(ValueError):
    pass


class NumericError(ArithmeticError):
    pass


class ConvergenceError(NumericError):
    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class StagnationError(ConvergenceError):
    def __init__(self, message: str, x=None, residuals=None):
        super().__init__(message, residuals=residuals)
        self.x = x


class SingularJacobianError(NumericError):
    def __init__(self, message: str, x=None, residuals=None):
        super().__init__(message)
        self.x = x
        self.residuals = residuals


class DomainError(NumericError):
    pass


class ImpossibleRegimeError(DomainError):
    """Singular value inside the bulk: recovery is impossible in this regime."""


class PoleError(NumericError):
    pass


class EstimationError(NumericError):
    def __init__(self, message: str, residual_norm: float | None = None):
        super().__init__(message)
        self.residual_norm = residual_norm


class OutOfModelWarning(UserWarning):
    pass


class BoundaryWarning(UserWarning):
    pass
