"""Exception types shared across the package."""


class NonIntegerResult(ArithmeticError):
    """A closed-form evaluation that must be integral produced a fraction.

    This always means the parity profile does not belong to the trajectory
    it was paired with.
    """


class NotPowerOfTwo(ArithmeticError):
    """The stopping-time rational is not a non-negative power of two."""


class FormulaDivisionByZero(ZeroDivisionError):
    """``1 - eps*S`` vanished; carries the offending profile."""

    def __init__(self, profile):
        super().__init__(f"1 - eps*S is zero for profile {profile!r}")
        self.profile = profile


class InternalInvariantBroken(AssertionError):
    """The term two steps before 3^k matched neither entry pattern."""


class CheckpointError(OSError):
    """A checkpoint file could not be read, written, or does not match the sweep."""
