"""Exception types shared across the package.

Each class maps to one failure family so callers (and the CLI exit-code
mapping) can react without parsing messages.
"""


class AnsatzLabError(Exception):
    """Base class for every error raised by this package."""


class InputError(AnsatzLabError, ValueError):
    """Malformed arguments: wrong dimension, bad ranges, too-coarse grids."""


class DomainError(AnsatzLabError, ValueError):
    """A point lies outside the set where a function is defined."""


class PositivityError(AnsatzLabError, ValueError):
    """A quantity required to be strictly positive was not."""


class DifferentiabilityError(AnsatzLabError):
    """A gradient was requested where the base function has none."""


class CapabilityError(AnsatzLabError):
    """The object lacks an operation (for example Hessian access)."""


class StencilError(AnsatzLabError, ValueError):
    """A finite-difference stencil would leave the domain."""


class SingularPointError(AnsatzLabError, ValueError):
    """Evaluation requested at a singular point such as the origin."""


class ScopeError(AnsatzLabError):
    """The request is outside the dimensions this package supports."""


class ConstructionError(AnsatzLabError):
    """A derived object (extension, mollifier, v) cannot be built."""


class ModelError(AnsatzLabError):
    """The combinatorial cell model is inconsistent."""


class DecompositionError(AnsatzLabError):
    """A cellular-decomposition rule fails for a named pair of cells."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ConvergenceError(AnsatzLabError):
    """An iterative solver stopped before meeting its tolerance.

    ``residual`` is the last residual norm; ``solution`` optionally carries
    the best iterate so callers can still inspect or serialize it.
    """

    def __init__(self, message, residual=float("nan"), solution=None):
        super().__init__(message)
        self.residual = residual
        self.solution = solution
