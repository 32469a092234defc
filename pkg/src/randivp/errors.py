"""Exception hierarchy shared by all modules."""


class RandIVPError(Exception):
    """Base class for all package errors."""


class JetError(RandIVPError, ArithmeticError):
    pass


class DivisionByZeroJet(JetError, ZeroDivisionError):
    pass


class DomainError(JetError, ValueError):
    pass


class OutOfDomain(RandIVPError, ValueError):
    pass


class GridMismatch(RandIVPError):
    pass


class OracleFailure(RandIVPError):
    pass


class InvalidRequest(RandIVPError, ValueError):
    pass


class InvalidPlan(RandIVPError, ValueError):
    pass


class UnknownProblem(RandIVPError, KeyError):
    pass


class InvalidSpec(RandIVPError, ValueError):
    pass
