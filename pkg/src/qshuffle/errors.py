"""Exception hierarchy.

``MathematicalInconsistency`` marks failures where two independent routes
to the same quantity disagree; the CLI maps those to exit status 3.
"""


class QShuffleError(Exception):
    pass


class MathematicalInconsistency(QShuffleError):
    pass


# exactring
class NotDivisible(QShuffleError):
    pass


class MissingVariable(QShuffleError):
    pass


class ZeroAssignment(QShuffleError, ValueError):
    pass


class SubsetTooSmall(QShuffleError, ValueError):
    pass


# freealg
class IndexOutOfRange(QShuffleError, ValueError):
    pass


class HasConstantTerm(QShuffleError, ValueError):
    pass


class MissingDiagonalParameter(QShuffleError, KeyError):
    pass


# smatrix
class RepeatedIndex(QShuffleError, ValueError):
    pass


class RangeError(QShuffleError, ValueError):
    pass


class SingularMatrix(QShuffleError):
    pass


class NonMonomialResidual(MathematicalInconsistency):
    pass


# quotient
class InconsistentConstraints(QShuffleError, ValueError):
    pass


class FormDoesNotDescend(MathematicalInconsistency):
    pass


# kernelconst
class ExhaustedRetries(QShuffleError):
    pass


class OracleMismatch(MathematicalInconsistency):
    pass


# braid
class DimensionMismatch(QShuffleError, ValueError):
    pass


class NotAnEdge(QShuffleError, ValueError):
    pass


# classify
class NoFreePair(QShuffleError):
    pass


class ProvisoViolated(QShuffleError):
    pass


class SizeTooLarge(QShuffleError, ValueError):
    pass
