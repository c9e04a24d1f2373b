"""Exception hierarchy shared by every daisyforge module."""


class DaisyforgeError(Exception):
    """Base class; the CLI maps these to exit status 1."""


class NotPrimePower(DaisyforgeError, ValueError):
    pass


class MixedDimensions(DaisyforgeError, ValueError):
    pass


class ZeroVector(DaisyforgeError, ValueError):
    pass


class OutOfRange(DaisyforgeError, ValueError):
    pass


class InvalidFamily(DaisyforgeError, ValueError):
    """A family file or constructor argument violates the member invariants."""


class LayerTooLarge(DaisyforgeError):
    pass


class BudgetExceeded(DaisyforgeError):
    """A construction or search would exceed the configured member/node cap."""


class TargetTooSmall(DaisyforgeError, ValueError):
    pass


class BadResidue(DaisyforgeError, ValueError):
    pass


class PatternMismatch(DaisyforgeError, ValueError):
    pass


class BadLayerIndex(DaisyforgeError, ValueError):
    pass


class ScaleExceeded(DaisyforgeError):
    pass


class OracleScaleExceeded(ScaleExceeded):
    pass


class BoundTooLoose(DaisyforgeError):
    pass


class CorruptCertificate(DaisyforgeError):
    pass
