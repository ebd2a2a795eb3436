"""Exception hierarchy. Every error raised by the library derives from QuantumError."""


class QuantumError(Exception):
    pass


class DimensionError(QuantumError, ValueError):
    pass


class ShapeError(QuantumError, ValueError):
    pass


class QTypeError(QuantumError, TypeError):
    """Operation undefined for the given combination of object types."""


class ArgumentError(QuantumError, ValueError):
    pass


class NormalizationError(QuantumError, ValueError):
    pass


class DomainError(QuantumError, ValueError):
    """Input outside the mathematical domain of the operation."""


class CapacityError(QuantumError):
    """Requested dense materialization exceeds the configured size cap."""


class ConditioningError(QuantumError):
    pass


class UnsupportedError(QuantumError, NotImplementedError):
    pass


class ConvergenceError(QuantumError, RuntimeError):
    def __init__(self, message, t=None):
        super().__init__(message if t is None else f"{message} (t={t!r})")
        self.t = t


class TrajectoryError(ConvergenceError):
    """A Monte-Carlo trajectory failed; carries its index and seed for replay."""

    def __init__(self, message, index, seed, t=None):
        super().__init__(f"trajectory {index} (seed {seed}): {message}", t)
        self.index = index
        self.seed = seed


class JumpError(QuantumError, RuntimeError):
    """Internal inconsistency at a quantum jump (no channel can fire)."""


class ExpressionSyntaxError(QuantumError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifierError(QuantumError, NameError):
    def __init__(self, name):
        super().__init__(f"unknown identifier {name!r}")
        self.name = name


class ScenarioError(QuantumError, ValueError):
    pass
