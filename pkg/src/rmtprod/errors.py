"""Exception types shared across the package."""


class RmtError(Exception):
    """Base class for all package errors."""


class ValidationError(RmtError, ValueError):
    """Invalid parameters or configuration."""


class PoleError(RmtError, ValueError):
    """A gamma-type function was requested at one of its poles."""


class DomainError(RmtError, ValueError):
    """Argument outside the supported domain of a function."""


class DivergenceError(RmtError, ValueError):
    """A series or integral does not converge for the requested argument."""


class ConvergenceError(RmtError, ArithmeticError):
    """Requested accuracy was not reached within the truncation limits."""


class BranchError(ConvergenceError):
    """Root tracking lost the requested branch."""
