"""Exception types shared across the package."""


class SepContError(Exception):
    """Base class for all errors raised by sepcont."""


class DomainError(SepContError, ValueError):
    """Argument outside the domain an operation accepts."""


class ContractError(SepContError, ValueError):
    """A caller-side contract (bound, continuity, convergence) was broken."""


class ConstructionError(SepContError, RuntimeError):
    """An internal construction produced an impossible state."""


class NearZero(SepContError, ArithmeticError):
    """h0(p) could not be certified nonzero at the maximum precision."""

    def __init__(self, point, lower_bound):
        self.point = point
        self.lower_bound = lower_bound
        super().__init__(
            f"cannot certify h0 != 0 at {point} (verified lower bound {lower_bound!r})"
        )


class NonConvergence(SepContError, ArithmeticError):
    """The Cauchy stopping rule did not stabilise within the stage budget."""

    def __init__(self, point, stages, last_increment):
        self.point = point
        self.stages = stages
        self.last_increment = last_increment
        super().__init__(
            f"sequence did not stabilise at {point} after {stages} stages "
            f"(last increment {last_increment:.3g})"
        )


class CoverError(SepContError, ValueError):
    """A probe point is not covered by any rectangle of a gluing cover."""


class PreconditionViolation(SepContError, ValueError):
    """A set failed the one-pointedness precondition; carries the witness."""

    def __init__(self, violation):
        self.violation = violation
        super().__init__(str(violation))


class IndexBudgetExceeded(NearZero):
    """h0(p) is certified positive but the active indices lie beyond the index budget."""

    def __init__(self, point, lower_bound, max_index):
        self.max_index = max_index
        SepContError.__init__(
            self,
            f"active indices at {point} lie beyond the budget {max_index} "
            f"(h0 lower bound {lower_bound!r})",
        )
        self.point = point
        self.lower_bound = lower_bound
