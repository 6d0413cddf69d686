"""Exception hierarchy shared by all modules."""


class MagspecError(Exception):
    """Base class for library errors."""


class ConfigError(MagspecError):
    """Invalid experiment configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class InvalidFieldSpec(MagspecError, ValueError):
    pass


class InvalidPotentialSpec(MagspecError, ValueError):
    pass


class DomainError(MagspecError, ValueError):
    """Argument outside the domain where a quantity is finite."""


class NonConvergence(MagspecError, ArithmeticError):
    """Adaptive routine exhausted its budget before meeting the tolerance."""

    def __init__(self, message: str, estimate: float = float("nan"), error: float = float("nan")):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class NonPositive(MagspecError, ArithmeticError):
    """A constant that must be strictly positive came out non-positive."""


class MeshUnsuitable(MagspecError, ValueError):
    """The mesh cannot resolve the boundary layer of the requested field."""


class HypothesisNotMet(MagspecError):
    """A classical inequality was requested outside its hypotheses."""


class LedgerDegenerate(MagspecError):
    """The flux never exceeds 1/2, so only the ``gamma1`` regime occurs."""
