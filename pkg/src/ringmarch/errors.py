"""Exception types raised across the package."""


class RingMarchError(ValueError):
    """Base class for all model, analysis and I/O errors."""


class BadDimensions(RingMarchError):
    pass


class DuplicateOccupancy(RingMarchError):
    pass


class UnderpopulatedTrack(RingMarchError):
    pass


class UnknownLocust(RingMarchError, KeyError):
    pass


class DifferentTracks(RingMarchError):
    pass


class EmptyTrack(RingMarchError):
    pass


class NotTwoSegments(RingMarchError):
    pass


class WrongTails(RingMarchError):
    pass


class StateSpaceTooLarge(RingMarchError):
    pass


class NotSingleTrack(RingMarchError):
    pass


class NonpositiveSize(RingMarchError):
    pass


class BadBarriers(RingMarchError):
    pass


class InfeasibleGuard(RingMarchError):
    pass


class OddM(RingMarchError):
    pass


class TooFull(RingMarchError):
    pass


class BadGlyph(RingMarchError):
    pass


class RaggedLines(RingMarchError):
    pass


class ConfigFileError(RingMarchError):
    pass


class IoError(RingMarchError):
    pass
