"""Exception types shared across the library."""


class CycleError(ValueError):
    """The generating pairs contain a strict cycle, so no partial order exists."""


class ChainBudgetExceeded(RuntimeError):
    """Maximal-chain enumeration hit its budget; carries the partial list."""

    def __init__(self, partial, budget):
        super().__init__(f"more than {budget} maximal chains")
        self.partial = partial
        self.budget = budget


class MetricError(ValueError):
    """A distance table violates the metric axioms."""


class DimensionMismatchError(ValueError):
    """Coordinate dimensions of the inputs do not agree."""


class NoCoordinatesError(ValueError):
    """An operation needing event coordinates got an abstract poset."""


class DegenerateError(ValueError):
    """A geometric construction collapsed (coincident critical distances)."""


class SizeMismatchError(ValueError):
    """A certificate or witness does not match the poset it claims to describe."""


class InvalidCertificateError(ValueError):
    """An embedding certificate fails revalidation."""


class InvalidWitnessError(ValueError):
    """A dimension witness fails revalidation."""
