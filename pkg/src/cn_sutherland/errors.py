"""Exception hierarchy shared by all modules."""


class SutherlandError(Exception):
    """Base class for every error raised by this package."""


# linear algebra
class LinAlgError(SutherlandError):
    pass


class NonSquare(LinAlgError):
    pass


class NotHermitian(LinAlgError):
    pass


class ConvergenceFailure(LinAlgError):
    pass


class SingularMatrix(LinAlgError):
    pass


class SingularDenominator(LinAlgError):
    pass


class IndexOutOfRange(LinAlgError, IndexError):
    pass


class DuplicateIndex(LinAlgError):
    pass


class EqualIndices(LinAlgError):
    pass


# model / dynamics
class InvalidCoupling(SutherlandError, ValueError):
    pass


class OutOfChamber(SutherlandError, ValueError):
    pass


class IntegrationError(SutherlandError):
    pass


class ChamberExit(IntegrationError):
    pass


class StepUnderflow(IntegrationError):
    pass


class EnergyDriftExceeded(IntegrationError):
    pass


class GridTooCoarse(SutherlandError):
    pass


# spectral analysis
class EigenFailure(SutherlandError):
    pass


class PairingViolation(SutherlandError):
    pass


class DegenerateSpectrum(SutherlandError):
    pass


class DegenerateLambda(SutherlandError, ValueError):
    pass


class ZeroComponent(SutherlandError):
    pass


class ZeroMomentum(SutherlandError, ValueError):
    pass


class WindowTooSmall(SutherlandError):
    pass


class ConfigInvalid(SutherlandError):
    pass
