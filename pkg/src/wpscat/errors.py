"""Exception types shared across the package."""


class WpscatError(Exception):
    """Base class for all package errors."""


class GridMismatchError(WpscatError):
    """Two fields live on different grids (or different spaces)."""


class ParameterError(WpscatError, ValueError):
    """A constructor or operation parameter is out of its valid range."""


class BoundaryMassError(WpscatError):
    """A state carries too much mass near the box edge for the periodic
    model to stand in for the whole line/plane."""


class BudgetError(WpscatError):
    """The requested horizons and mask geometry do not fit inside the box."""


class StepAlignmentError(WpscatError):
    """A requested evolution interval is not a whole number of steps."""


class UnsupportedOperationError(WpscatError):
    """The operation is not defined for this input (e.g. a coarsened
    phase-space field cannot be inverted)."""
