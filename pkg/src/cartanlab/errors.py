"""Exception types shared across the library."""


class CartanLabError(Exception):
    """Base class for all library errors."""


class UnsupportedFieldError(CartanLabError):
    """Raised for operations not defined over the given field."""


class PreconditionError(CartanLabError):
    """An operation's stated hypothesis is violated by the input.

    Carries an optional ``index`` identifying the offending entry of a
    list-valued argument.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NumericalError(CartanLabError):
    """A floating-point solver failed or left an unacceptable residual."""


class IndeterminateError(CartanLabError):
    """A floating-point computation cannot certify a yes/no answer.

    Distinct from a negative answer: the data sits below the resolution
    threshold of the solver.
    """
