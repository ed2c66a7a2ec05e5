"""Exception types raised by the cPIMAC library."""


class CpimacError(ValueError):
    """Base class for all library errors."""


class DegenerateChannel(CpimacError):
    """A channel coefficient is zero, non-finite or below the magnitude floor."""


class LinearDependence(CpimacError):
    """Two received directions that must span the plane are (nearly) parallel."""


class ZeroInterferenceDirection(CpimacError):
    """The aligned interference direction at Rx1 has vanishing norm."""


class InsufficientGrid(CpimacError):
    """The power grid is too short or too low for a DoF regression."""


class PoorFit(CpimacError):
    """Sum-rate is not affine in log2(P) over the grid (r^2 below the gate)."""


class ConfigError(CpimacError):
    """Invalid simulation configuration."""
