"""Exception types raised by natpower.

Everything derives from :class:`NatPowerError` so callers can catch the
whole family at once.
"""


class NatPowerError(Exception):
    """Base class for all package errors."""


class RankDeficient(NatPowerError):
    """A factorization needed full column rank and did not get it."""


class NotSymmetric(NatPowerError):
    """A symmetric routine received a non-symmetric matrix."""


class NearSingular(NatPowerError):
    """A matrix that must be inverted (or inverse-square-rooted) is numerically singular.

    ``iteration`` is set by the iteration drivers to the index of the step
    that failed; it is ``None`` for direct calls.
    """

    def __init__(self, msg, iteration=None):
        super().__init__(msg)
        self.iteration = iteration


class EigFailed(NatPowerError):
    """The QR iteration did not converge within its sweep budget."""


class NotOrthonormal(NatPowerError):
    """A frame failed the Stiefel orthonormality check."""


class ShapeError(NatPowerError):
    """Array shapes do not conform."""


class CrossGramSingular(NatPowerError):
    """The left/right cross-Gramian ``V^T U`` is numerically singular."""


class ResolventSingular(NatPowerError):
    """``zI - A`` is singular at the requested evaluation point."""


class Uncontrollable(NatPowerError):
    """Single-input pole placement on a pair without full Krylov rank."""


class Unobservable(NatPowerError):
    """Dual of :class:`Uncontrollable` for observer gains."""


class ParseError(NatPowerError):
    """Malformed matrix text; ``line`` is 1-based when known."""

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line
