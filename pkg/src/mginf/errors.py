"""Exception types shared by the numeric modules."""

from __future__ import annotations


class AccuracyError(RuntimeError):
    """A quadrature could not meet the requested tolerance.

    ``achieved`` carries the error bound that was actually reached, so a
    caller can decide whether the result is still usable.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved error bound {achieved:.3e})")
        self.achieved = achieved


class CancellationError(ArithmeticError):
    """An alternating sum lost too many significant digits.

    Raised by the moment recurrence instead of returning noise; ``digits_lost``
    estimates how many leading digits cancelled.
    """

    def __init__(self, message: str, digits_lost: float):
        super().__init__(f"{message} (~{digits_lost:.1f} digits cancelled)")
        self.digits_lost = digits_lost
