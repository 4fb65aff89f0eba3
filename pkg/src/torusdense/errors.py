"""Exception hierarchy shared by all modules."""


class TorusDenseError(Exception):
    """Base class for every error raised by the package."""


class NotHyperbolic(TorusDenseError):
    pass


class RationalSpectrum(TorusDenseError):
    pass


class NotUnimodular(TorusDenseError):
    pass


class CapExceeded(TorusDenseError):
    pass


class NotPeriodicWithin(TorusDenseError):
    pass


class NotCoprime(TorusDenseError):
    pass


class BadMultiples(TorusDenseError):
    pass


class IrrationalResidue(TorusDenseError):
    """The shadow point kept a nonzero sqrt(D) part; always a bug."""


class ShadowBoundViolated(TorusDenseError):
    pass


class DecayViolated(TorusDenseError):
    pass


class PrecisionExhausted(TorusDenseError):
    pass


class HypothesisViolation(TorusDenseError):
    """S(p) < 0 < S(q) could not be established."""


class Obstructed(TorusDenseError):
    """The Diophantine search failed; carries lattice evidence."""

    def __init__(self, message, best_gap=None, evidence=(), lattice=None):
        super().__init__(message)
        self.best_gap = best_gap
        self.evidence = list(evidence)
        self.lattice = lattice


class CertificateError(TorusDenseError):
    """A replayed certificate check failed; ``check`` names it."""

    def __init__(self, check, message):
        super().__init__(f"{check}: {message}")
        self.check = check
