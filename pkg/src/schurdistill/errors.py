"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(RuntimeError):
    """A configured size cap would be exceeded.

    Attributes:
        cap: the cap value that was hit.
        requested: the size that was asked for, when known.
    """

    def __init__(self, message: str, cap: int, requested: int | None = None):
        super().__init__(f"{message} (cap={cap}, requested={requested})")
        self.cap = cap
        self.requested = requested
