"""Exception types shared across modules."""


class MvcError(Exception):
    pass


class UnsupportedParams(MvcError, ValueError):
    """A scheme or bound is not defined at the requested (n, c, v)."""


class BudgetExceeded(MvcError):
    """An exhaustive enumeration would exceed its size guard."""


class IndexCollision(MvcError, ValueError):
    pass


class IndexOutOfRange(MvcError, ValueError):
    pass


class InsufficientShares(MvcError):
    """Fewer than L distinct shares: the version is not recoverable."""


class UnknownServerId(MvcError, KeyError):
    pass


class OutOfOrderArrival(MvcError, ValueError):
    pass


class UnderflowDeletion(MvcError):
    """A scheme tried to delete more symbols than it holds."""
