"""Exception types shared across the package."""


class AnisogateError(Exception):
    """Base class for all package-specific errors."""


class DegenerateDeviceError(AnisogateError):
    """Device parameters make the requested quantity undefined (e.g. t = 0)."""


class DegenerateAxisError(AnisogateError):
    """Pulse parameters give a zero rotation vector with nonzero strength."""


class AxisPlaneError(AnisogateError):
    """A rotation axis that must lie in the yz plane does not."""


class SingularTiltError(AnisogateError):
    """First-order tilt is undefined: parallel axes with a net angle error."""


class WedgeError(AnisogateError):
    """Degenerate or inconsistent wedge specification."""


class SynthesisError(AnisogateError):
    """A pulse-sequence construction cannot meet its contract."""


class VerificationError(AnisogateError):
    """A verifier precondition or contract is violated."""


class ProgramFormatError(AnisogateError):
    """A pulse-program record does not match the interchange format."""
