"""Exception hierarchy shared by all freemul modules."""


class FreemulError(Exception):
    """Base class for all errors raised by this package."""


class MalformedDocument(FreemulError):
    """Measure document is syntactically or structurally invalid."""


class MassNotNormalizable(FreemulError):
    """Total mass deviates from 1 by more than the repairable window."""


class ZeroFirstMomentCircle(FreemulError):
    """Circle measure has vanishing first moment; Sigma is undefined."""


class DeltaZeroHalfLine(FreemulError):
    """Half-line measure equals the point mass at zero."""


class WrongSpace(FreemulError):
    """Operation applied to a measure on the wrong space."""


class DomainError(FreemulError):
    """Evaluation point lies outside the measure's analytic domain."""


class PoleHit(FreemulError):
    """Evaluation point collides with an atom pole."""


class EtaPole(FreemulError):
    """1 + psi vanishes at the evaluation point."""


class NoConvergence(FreemulError):
    """Extrapolation or limit procedure failed to settle."""


class NotInvertible(FreemulError):
    """Series has vanishing linear coefficient; no compositional inverse."""


class ZeroConstantTerm(FreemulError):
    """Series has vanishing constant term; log/power undefined."""


class MaxIterExceeded(FreemulError):
    """Solver iteration budget exhausted before reaching tolerance."""


class BranchLost(FreemulError):
    """Continuation step too large to track the logarithm branch."""


class DomainEscape(FreemulError):
    """Solver iterate left the analytic domain."""


class EtaVanishes(FreemulError):
    """eta hit (a neighborhood of) zero inside the disk; hypothesis violated."""


class MassAuditFailure(FreemulError):
    """Recovered parts do not add up to unit mass within the audit window."""


class InconsistentRun(FreemulError):
    """Inputs passed to a check derive from different pipeline runs."""


class UnwrapFailure(FreemulError):
    """Adjacent argument samples jump by >= pi; sampling too coarse."""
