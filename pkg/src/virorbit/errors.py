"""Exception types raised by the library."""


class VirorbitError(Exception):
    """Base class for all library errors."""


class WeightMismatch(VirorbitError):
    pass


class NotMonotone(VirorbitError):
    pass


class BoundaryAmbiguous(VirorbitError):
    pass


class StepsTooCoarse(VirorbitError):
    pass


class NotImmersion(VirorbitError):
    pass


class NotQuasiPeriodic(VirorbitError):
    """A group path whose image is not invariant under a single monodromy."""


class MonodromyMismatch(VirorbitError):
    pass


class ZeroTranslationNumber(VirorbitError):
    pass


class PositiveTranslationNumber(VirorbitError):
    pass


class DegenerateFamily(VirorbitError):
    pass


class NotOnLevelSet(VirorbitError):
    pass
