"""Exception types shared across the package."""


class DomainError(ValueError):
    """A point lies outside the closed reference domain."""


class InsufficientQuadratureError(ValueError):
    """The volume quadrature does not render the mass matrix positive definite."""


class InvertedElementError(RuntimeError):
    """The geometric mapping has a nonpositive Jacobian at a quadrature point."""


class NonphysicalStateError(RuntimeError):
    """Density or internal energy is nonpositive.

    ``element`` identifies the offending element when known.
    """

    def __init__(self, message: str, element: int | None = None):
        super().__init__(message if element is None else f"{message} (element {element})")
        self.element = element


class ConfigError(ValueError):
    """A configuration file or option is malformed; carries a line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
