"""Exception types shared across the toolkit."""


class ZerofreeError(Exception):
    """Base class for all toolkit errors."""


class InvalidArgument(ZerofreeError, ValueError):
    pass


class RangeExceedsTable(ZerofreeError, ValueError):
    pass


class BudgetExceeded(ZerofreeError):
    """Raised when a grid or enumeration would exceed its configured budget.

    ``result`` carries the best partial answer that fits in the budget, if any.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegeneratePhases(ZerofreeError, ValueError):
    pass


class ConstraintViolation(ZerofreeError, ValueError):
    def __init__(self, message, inequality=None):
        super().__init__(message)
        self.inequality = inequality


class InfeasibleScale(ZerofreeError):
    pass


class AccuracyUnreachable(ZerofreeError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class PoleError(ZerofreeError, ValueError):
    pass


class ResolutionWarning(UserWarning):
    pass
