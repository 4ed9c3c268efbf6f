"""Exception types raised across the package."""


class PoleError(ValueError):
    """Log-gamma evaluated at a nonpositive integer."""


class OracleCapError(ValueError):
    """Atom number exceeds the dense-oracle cap."""


class SingularSteadyStateError(RuntimeError):
    """The trace-constrained steady-state system could not be solved."""


class NoDipError(ValueError):
    """No resolvable intensity dip in a profile or trace."""


class DipCountError(ValueError):
    """A trace does not contain the expected number of resolvable dips."""
