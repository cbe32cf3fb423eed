"""Exception hierarchy for qpfock."""


class QPFockError(Exception):
    """Base class for all library errors."""


class NonConvergence(QPFockError):
    """An iterative or adaptive routine hit its iteration cap."""


class InvalidTau(QPFockError, ValueError):
    """Theta parameter tau with non-positive imaginary part."""


class TailBoundFailure(QPFockError):
    """A series would need more terms than the hard cap allows."""


class InvalidShift(QPFockError, ValueError):
    """Weyl shift whose imaginary part is not in (pi/alpha)Z."""


class TooFewPoints(QPFockError, ValueError):
    """Operation needs more points than were supplied."""


class NoAdmissibleWindow(QPFockError):
    """No counting window fits inside the data extent."""


class IndexingAmbiguity(QPFockError):
    """Two-sided enumeration of a point set is not consistent."""


class ZeroDenominator(QPFockError):
    """A per-node normalizer underflowed (near collision of nodes)."""


class TailBoundViolation(QPFockError):
    """Evaluation point lies outside the band certified by a product truncation."""


class AlphaBetaOrder(QPFockError, ValueError):
    """Reconstruction requires alpha < beta."""


class ConfigError(QPFockError, ValueError):
    """Invalid run configuration."""
