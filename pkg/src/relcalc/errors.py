"""Exception types raised across the package."""


class RelcalcError(Exception):
    """Base class for all errors raised by relcalc."""


class DimensionError(RelcalcError, ValueError):
    """Array shape does not match the declared lattice."""


class OrderError(RelcalcError, ValueError):
    """Multi-order arity does not match the Lagrangian class."""


class SymbolEvaluationError(RelcalcError, FloatingPointError):
    """A symbol evaluator returned non-finite values."""


class CompositionError(RelcalcError, ValueError):
    """Two symbols or relations cannot be composed."""


class ResolutionError(RelcalcError, ValueError):
    """Symbol growth is too large to be represented on the grid."""


class ShapeError(RelcalcError, ValueError):
    """Block or matrix dimensions are inconsistent."""


class PreconditionError(RelcalcError, ValueError):
    """Order constraints for a verification run are violated."""


class ConstructionError(RelcalcError, ArithmeticError):
    """A matrix factorization needed by a construction failed."""


class FitError(RelcalcError, ArithmeticError):
    """A least-squares exponent fit is degenerate."""


class ConfigError(RelcalcError, ValueError):
    """Invalid CLI configuration."""
