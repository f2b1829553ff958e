"""Exception types raised across the package."""


class InvalidWindowError(ValueError):
    """Photon-number window is malformed or too narrow for the requested state."""


class NormalizationError(ValueError):
    """An input that must be unit-normalized is not."""


class ShapeMismatchError(ValueError):
    """Two objects defined over photon-number windows do not share the same window."""


class BesselDomainError(ValueError):
    """Order or argument outside the validated range of the Bessel kernel."""


class NumericalError(RuntimeError):
    """An iterative numerical routine failed to converge."""


class AccuracyError(RuntimeError):
    """Requested time step cannot deliver the stepper's accuracy contract."""


class ScheduleVariantError(TypeError):
    """Operation not defined for this drive schedule variant."""


class ValidityError(RuntimeError):
    """A run violated a hard validity check while strict mode was on."""
