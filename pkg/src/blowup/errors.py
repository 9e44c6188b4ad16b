"""Engine error hierarchy; the CLI maps these to exit codes."""


class ResolutionError(Exception):
    """Base class for driver aborts (CLI exit code 2)."""


class IrrationalLocusError(ResolutionError):
    """A zero-dimensional locus has a univariate factor without rational roots."""

    def __init__(self, polynomial_text: str):
        super().__init__(f"irrational locus: {polynomial_text}")
        self.polynomial_text = polynomial_text


class NoMaximalContactError(ResolutionError):
    """No chart variable serves as a coordinate-aligned maximal contact."""


class CoefficientExponentError(ResolutionError):
    """The coefficient/companion formula would need an unsupported exponent."""


class AlignmentError(ResolutionError):
    """A required center or stratum is not coordinate-aligned."""


class NonReducedError(ResolutionError):
    """Strict transforms stabilized singular with no singular points left."""


class NotZeroDimensionalError(ResolutionError):
    """rational_points was asked for a positive-dimensional locus."""
