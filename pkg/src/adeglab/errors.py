"""Exception hierarchy shared by every module.

The CLI maps :class:`PreconditionError` (and its subclasses) to exit code 2 and
:class:`CertificateError` to exit code 1.
"""


class AdegLabError(Exception):
    """Base class for all library errors."""


class PreconditionError(AdegLabError):
    """A mathematical precondition of an operation does not hold."""


class CapExceededError(PreconditionError):
    """A configured size cap (arity, group order, matrix side) was exceeded."""


class CertificateError(AdegLabError):
    """An exact certificate failed to verify; indicates an internal bug."""


class DimensionMismatchError(AdegLabError, ValueError):
    """Malformed linear program or mismatched arities."""


class NodeBudgetExceeded(AdegLabError):
    """Branch and bound ran out of nodes.

    ``incumbent`` is the best integer solution found (or ``None``) and
    ``lower_bound`` the smallest relaxation value among open nodes.
    """

    def __init__(self, message, incumbent=None, lower_bound=None):
        super().__init__(message)
        self.incumbent = incumbent
        self.lower_bound = lower_bound
