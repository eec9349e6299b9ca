"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class PoleError(ArithmeticError):
    """Evaluation requested at (or too close to) a pole."""


class AccuracyError(ArithmeticError):
    """A numerical procedure failed its internal convergence check."""


class DegenerateFitError(ArithmeticError):
    """Envelope fit impossible, e.g. every residual is zero."""


class OutsideValidatedBoxWarning(UserWarning):
    """Result computed outside the region where accuracy targets were validated."""
