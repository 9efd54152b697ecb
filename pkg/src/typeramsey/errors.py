class InputError(ValueError):
    """Malformed input or a violated precondition (CLI exit code 64)."""


class Unsupported(InputError):
    """The operation is not defined for this kind of input."""


class BudgetExceeded(RuntimeError):
    """A search would exceed the configured budget; nothing is guessed."""
