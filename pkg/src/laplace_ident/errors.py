"""Exception types shared across the package."""


class LaplaceIdentError(Exception):
    """Base class for all errors raised by laplace_ident."""


class NonVanishingHead(LaplaceIdentError):
    """The head function of a concatenation is nonzero past the junction time."""


class DomainError(LaplaceIdentError):
    """A transform was evaluated at or left of its abscissa of convergence."""


class DivisionByZero(LaplaceIdentError):
    """The denominator transform of a ratio is numerically zero."""


class AssumptionViolated(LaplaceIdentError):
    """Standing assumptions on (p, n, m) fail; carries the AssumptionReport."""

    def __init__(self, report, message=None):
        self.report = report
        super().__init__(message or "; ".join(report.details) or "assumption violated")


class BadNormalization(LaplaceIdentError):
    """p(0) does not have the value a theorem checker requires."""


class IdenticalFunctions(LaplaceIdentError):
    """Two functions agree everywhere, so there is no divergence point."""


class BadParams(LaplaceIdentError):
    """Preset parameters fall outside the family's admissible range."""
