"""Exception hierarchy.

Two families: ``InputError`` for data that violates a precondition (bad
points, bad anchors, malformed requests) and ``NumericalError`` for
failures of a numerical procedure on otherwise valid data. The CLI maps
the first to exit code 2 and the second to exit code 1.
"""


class BlaschkeError(Exception):
    """Base class of every error raised by this package."""


class InputError(BlaschkeError, ValueError):
    pass


class NumericalError(BlaschkeError, ArithmeticError):
    pass


# transforms
class PoleAtOne(InputError):
    pass


class PoleAtMinusI(InputError):
    pass


class InvalidDiscPoint(InputError):
    pass


class InvalidHalfPlanePoint(InputError):
    pass


# realpoly
class NotConjugateClosed(InputError):
    pass


class DegenerateLeadingCoefficient(InputError):
    pass


class NoSignChange(InputError):
    pass


class NodesTooClose(InputError):
    pass


# equilibrium
class CoincidentCharges(InputError):
    pass


class AnchorOutOfInterval(InputError):
    pass


class NoConvergence(NumericalError):
    pass


# lame
class PoleMismatch(InputError):
    pass


# blaschke
class ZeroOutsideDisc(NumericalError):
    pass


class WrongCriticalCount(NumericalError):
    pass


# moments
class HankelNotPositiveDefinite(NumericalError):
    pass


class SubHankelNotPositiveDefinite(HankelNotPositiveDefinite):
    pass


class AnchorOnLowerRoot(InputError):
    pass


class NonPositiveWeight(NumericalError):
    pass
