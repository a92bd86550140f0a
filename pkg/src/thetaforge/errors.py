"""Exception hierarchy for thetaforge."""


class ThetaForgeError(Exception):
    """Base class for all library errors."""


class InvalidPeriodMatrix(ThetaForgeError, ValueError):
    pass


class InvalidPolicy(ThetaForgeError, ValueError):
    pass


class CharacteristicOrderError(ThetaForgeError, ValueError):
    pass


class AdmissibilityError(ThetaForgeError, ValueError):
    """Index tuple violates an exact rational admissibility condition."""


class DimensionShortfall(ThetaForgeError, ValueError):
    pass


class DegenerateProjectivePoint(ThetaForgeError):
    pass


class DegenerateFrame(ThetaForgeError):
    pass


class AmbiguousReconstruction(ThetaForgeError):
    pass


class VanishingDenominator(ThetaForgeError):
    pass


class CrossCheckError(ThetaForgeError):
    """Two independent evaluation routes disagree beyond tolerance."""


class InsufficientData(ThetaForgeError):
    pass
