"""Exception taxonomy shared by all flatstab modules."""


class InputError(ValueError):
    """Malformed or out-of-contract input: dimension mismatch, duplicates, bad ranges."""


class DegenerateInputError(InputError):
    """Input whose degeneracy makes the requested answer ill-defined."""


class ConstructionError(RuntimeError):
    """A point-set construction could not certify its required properties."""


class ResourceLimitError(RuntimeError):
    """Work or memory estimate exceeds the configured budget for an exact computation."""


class SolverError(RuntimeError):
    """Numerical search failed to reach the required residual within budget."""
