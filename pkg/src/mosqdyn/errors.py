"""Exception taxonomy shared across the package."""


class MosqdynError(Exception):
    """Base class for all errors raised by this package."""


class ParamError(MosqdynError):
    """A model constant failed validation; ``param`` names the offender."""

    def __init__(self, param: str, message: str):
        super().__init__(message)
        self.param = param


class NonFiniteError(ParamError):
    """NaN or infinity where a finite real is required."""


class NonPositiveRateError(ParamError):
    """alpha, beta or mu outside the strictly positive range."""


class NegativeDeathError(ParamError):
    """d0 or d1 below zero."""


class DomainError(MosqdynError):
    """An argument lies outside the operation's mathematical domain."""


class RegimeError(MosqdynError):
    """Operation needs the restricted-map parameter regime and did not get it."""


class NotAFixedPointError(MosqdynError):
    """Classification requested at a point the map does not fix."""


class NotClaimedInvariantError(MosqdynError):
    """Invariance was requested for a region that carries no invariance claim."""


class BranchError(MosqdynError):
    """Shifted-quadratic branch requested while B0 <= 0."""


class CertificateFailure(MosqdynError):
    """A cycle-exclusion certificate could not be established.

    Signals either a floating-point pathology or parameters outside the
    claimed regime; never swallowed silently.
    """


class UsageError(MosqdynError):
    """Bad command line, config file, or environment input (exit status 2)."""
