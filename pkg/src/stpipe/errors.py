"""Exception types. All derive from :class:`StpipeError` (a ``ValueError``)."""


class StpipeError(ValueError):
    pass


# audio
class NotRiff(StpipeError):
    pass


class UnsupportedFormat(StpipeError):
    pass


class Truncated(StpipeError):
    pass


class BadFactor(StpipeError):
    pass


class SilentSignal(StpipeError):
    pass


class BadFrame(StpipeError):
    pass


# textnorm
class NotANumber(StpipeError):
    pass


class TooLarge(StpipeError):
    pass


# segmenter
class DegenerateLabels(StpipeError):
    pass


class Infeasible(StpipeError):
    pass


# corpusops
class EmptyCorpus(StpipeError):
    pass


class EmptySide(StpipeError):
    pass


class TooFew(StpipeError):
    pass


# metrics
class EmptyReference(StpipeError):
    pass


class LengthMismatch(StpipeError):
    pass


# fusion
class MalformedLine(StpipeError):
    pass


class IdMismatch(StpipeError):
    pass


class MissingScore(StpipeError):
    pass


class GridEmpty(StpipeError):
    pass


class RefMismatch(StpipeError):
    pass
