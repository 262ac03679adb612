"""Exception types raised by the solvers.

Everything user-facing derives from ``EnstabError`` so the CLI can map
solver failures to a single exit code.
"""


class EnstabError(Exception):
    """Base class for all solver errors."""


class BracketError(EnstabError):
    """A root bracket does not contain a sign change."""


class ConvergenceError(EnstabError):
    """An iteration exceeded its budget without meeting its tolerance."""


class StepSizeUnderflow(EnstabError):
    """The adaptive stepper pushed the step below machine resolution."""

    def __init__(self, t: float):
        super().__init__(f"step size underflow at t = {t!r}")
        self.t = t


class NonFiniteState(EnstabError):
    """The integrated state left the finite range (right-hand side overflow)."""

    def __init__(self, t: float):
        super().__init__(f"non-finite state at t = {t!r}")
        self.t = t


class ShootingError(EnstabError):
    """No admissible shooting parameter was found in the scanned bracket."""


class EigenSearchError(EnstabError):
    """Eigenvalue search failed (bracket expansion cap or ambiguous node count)."""


class ResonanceError(EnstabError):
    """The linear boundary problem is degenerate at the requested parameter."""
