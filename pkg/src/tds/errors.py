"""Exception hierarchy shared by all modules."""


class TdsError(Exception):
    """Base class for library errors."""


class ModelError(TdsError, ValueError):
    """Invalid model data (bad polynomials, negative delays, schema problems)."""


class DimensionError(ModelError):
    """Inconsistent block or signal dimensions."""


class ConnectError(ModelError):
    """Bad netlist: unknown, undriven or multiply-driven signal names."""


class NumericalError(TdsError, ArithmeticError):
    """A computation failed for numerical reasons."""


class IllPosedError(NumericalError):
    """Singular algebraic loop, e.g. ``I - M22*Theta`` not invertible."""

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class NoCrossingError(NumericalError):
    """A searched-for crossing does not exist inside the search band."""


class NeutralSystemError(NumericalError):
    """Spectral methods only support retarded systems (``D22 == 0``)."""
