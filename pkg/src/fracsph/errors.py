"""Exception hierarchy shared by every fracsph module."""


class FracSPHError(Exception):
    """Base class for all errors raised by fracsph."""


class KernelDomainError(FracSPHError, ValueError):
    """A kernel was evaluated at a non-finite distance."""


class ConstructionError(FracSPHError, ValueError):
    """Invalid parameters when building a particle domain."""

    def __init__(self, parameter: str, message: str):
        self.parameter = parameter
        super().__init__(f"{parameter}: {message}")


class EvaluationError(FracSPHError, ArithmeticError):
    """An SPH sum or an expression could not be evaluated."""


class SingularMomentError(EvaluationError):
    """The kernel-gradient moment of a particle vanished."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"zero gradient moment at real particle {index}")


class OrderRangeError(FracSPHError, ValueError):
    """A fractional order left the open interval (0, 1)."""


class PoleError(FracSPHError, ArithmeticError):
    """A special function was evaluated at one of its poles."""


class ConvergenceError(FracSPHError, ArithmeticError):
    """An iterative method did not reach its tolerance."""

    def __init__(self, message: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{message} (after {iterations} iterations)")


class UnsupportedError(FracSPHError, NotImplementedError):
    """No closed form (or algorithm) covers the requested case."""


class ConfigError(FracSPHError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
