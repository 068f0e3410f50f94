"""Exception hierarchy shared by all circon modules."""


class CirconError(Exception):
    """Base class; carries the CLI exit code for the failure kind."""

    exit_code = 3


class ValidationError(CirconError, ValueError):
    exit_code = 2


class RankDeficient(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ResolutionTooCoarse(ValidationError):
    pass


class UnknownCorpusName(ValidationError):
    pass


class BadParams(ValidationError):
    pass


class BadBudget(ValidationError):
    pass


class UnsupportedCombination(ValidationError):
    pass


class UnsupportedGroup(ValidationError):
    pass


class WrongDimension(ValidationError):
    pass


class EmptyBody(ValidationError):
    pass


class DegenerateFiber(CirconError):
    pass


class PunctureHit(DegenerateFiber):
    pass


class NoFiberSolution(CirconError):
    pass


class EmptyFamily(CirconError):
    pass


class EmptyProfiles(CirconError):
    pass


class SurroundsAxis(CirconError):
    pass


class DegenerateProjection(CirconError):
    pass


class TooManySkipped(CirconError):
    pass
