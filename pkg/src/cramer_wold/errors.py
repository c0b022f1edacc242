"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An input violates a documented precondition."""


class MomentViolation(ValueError):
    """A signed measure has a non-vanishing moment below the requested order.

    The Zolotarev supremum is infinite in that case, so no number is returned.
    """

    def __init__(self, order: int, value: float, tol: float):
        self.order = order
        self.value = value
        self.tol = tol
        super().__init__(
            f"moment of order {order} is {value:.3e}, exceeds tolerance {tol:.1e}; "
            "the zeta_p supremum is infinite"
        )


class ResourceLimit(RuntimeError):
    """Problem size exceeds the configured cap."""


class InfeasibleError(RuntimeError):
    """A randomized construction failed in every allowed attempt."""
