"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration value is missing, malformed, or out of range."""


class DomainError(ValueError):
    """A physical parameter violates the range an operation is defined on."""


class ShapeError(ValueError):
    """An array argument has the wrong dimensions."""


class GuardError(ArithmeticError):
    """A numerical guard tripped (ill-conditioned or oversized problem)."""
