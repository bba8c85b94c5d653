"""Exception types shared across the package."""


class InputError(ValueError):
    """Rejected input: non-finite value, unknown JSON field, malformed file."""


class ConfigurationError(ValueError):
    """An assembly configuration invariant is violated; carries the field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class JointLimitError(ValueError):
    """A joint angle outside the admissible range was requested."""


class SolveError(RuntimeError):
    """Equilibrium iteration did not converge; carries the worst residual."""

    def __init__(self, message: str, worst_residual: float = float("nan")):
        self.worst_residual = worst_residual
        super().__init__(message)


class InfeasibleError(SolveError):
    """No admissible configuration satisfies the contact constraints."""


class SchemaError(ValueError):
    """A trace file does not match the expected CSV schema."""
