"""Exception hierarchy shared by all modules."""


class ToroidalError(Exception):
    """Base class for every error raised by the package."""


class NotPrime(ToroidalError, ValueError):
    pass


class TooSmall(ToroidalError, ValueError):
    pass


class ZeroExponent(ToroidalError, ValueError):
    pass


class BadResidue(ToroidalError, ValueError):
    pass


class DomainError(ToroidalError, ValueError):
    pass


class DegenerateExponent(ToroidalError, ValueError):
    pass


class PreconditionViolated(ToroidalError, ValueError):
    pass


class ReducibleHint(ToroidalError, ValueError):
    """The polynomial has a rational root, so it is not irreducible."""


class TrivialPower(ToroidalError, ValueError):
    """chi^a or chi^b is trivial; the functional equation does not apply."""


class TooLarge(ToroidalError, RuntimeError):
    """An enumeration would exceed the configured work cap."""


class PoleError(ToroidalError, ArithmeticError):
    pass


class QuadratureFailure(ToroidalError, ArithmeticError):
    pass
