"""Exception hierarchy shared by all modules."""


class TmpkError(Exception):
    """Base class for every error raised by this package."""


class GraphError(TmpkError, ValueError):
    """Malformed graph, tree, partition or file contents."""


class CapExceeded(TmpkError):
    """An exact solver was asked to handle an instance above its size cap."""


class BudgetExceeded(TmpkError):
    """An exhaustive search ran out of its step budget before finishing."""


class CertificateError(TmpkError):
    """A produced certificate failed validation (an internal bug)."""
