"""Exception hierarchy shared by all modules."""


class BohrFactError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(BohrFactError):
    """A mathematical precondition of an operation does not hold."""


class ZeroOnCircle(PreconditionError):
    """|t| could not be certified bounded away from zero on the circle."""


class NonzeroWinding(PreconditionError):
    def __init__(self, index: int):
        self.index = int(index)
        super().__init__(f"nonzero winding {self.index}")


class RootNearCircle(PreconditionError):
    def __init__(self, root: complex, guard_band: float):
        self.root = complex(root)
        self.guard_band = guard_band
        super().__init__(
            f"root {root:.6g} has modulus {abs(root):.15g} inside the guard band "
            f"[1-{guard_band:g}, 1+{guard_band:g}]"
        )


class NotPositiveReal(PreconditionError):
    """min Re t <= 0 where a strictly positive real part is required."""


class MinNotPositive(PreconditionError):
    """min t <= 0 for a 2D polynomial that must be strictly positive."""


class NotNonnegative(PreconditionError):
    """A lifted polynomial is not strictly positive on the torus."""


class FreqViolation(PreconditionError):
    def __init__(self, message: str, offending=None):
        self.offending = offending
        super().__init__(message)


class DegenerateDirection(PreconditionError):
    """a + b*alpha == 0 in a strip transform."""


class NoSolution(PreconditionError):
    """rational_reduce called with |c| > |d| or non-coprime input."""


class NonConvergent(BohrFactError):
    """An adaptive grid or quadrature hit its size cap."""


class TailMassExceeded(BohrFactError):
    def __init__(self, tail: float, limit: float):
        self.tail = tail
        self.limit = limit
        super().__init__(f"truncated tail mass {tail:.3e} exceeds {limit:.3e}")


class DepthExhausted(BohrFactError):
    """Continued fraction expansion ran out of requested depth."""
