"""Exception types shared across the package."""


class LatcubeError(Exception):
    """Base class for all errors raised by latcube."""


class DomainError(LatcubeError, ValueError):
    """Argument lies outside the admissible domain of an operation."""


class DivergentDensityError(LatcubeError, ValueError):
    """A density (or derivative limit) is infinite at the requested point."""


class ResourceLimitError(LatcubeError):
    """An enumeration would exceed its configured size cap."""


class LatticeSearchError(LatcubeError):
    """The lattice search hit its size cap without finding a candidate.

    Signals the cap, not nonexistence: raising callers may retry with a
    larger ``cap_factor``.
    """


class NonReconstructingLatticeError(LatcubeError, ValueError):
    """Coefficient reconstruction was requested on a lattice that does not
    separate the given frequency set."""


class DegenerateInputError(LatcubeError, ValueError):
    """Input is identically zero where a relative quantity is required."""
