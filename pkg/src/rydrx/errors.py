"""Exception types shared across the receiver pipeline."""


class RydrxError(Exception):
    """Base class for simulator errors."""


class SteadyStateError(RydrxError):
    """Steady-state solve failed (singular or ill-conditioned system)."""


class UnresolvedSplittingError(RydrxError):
    """Fewer than two AT peaks could be resolved in a spectrum."""


class AmbiguousPeaksError(RydrxError):
    """More than two comparable peaks; pairing would be a guess."""


class AsymmetrySaturatedError(RydrxError):
    """|F| at or beyond the invertible range of the detuning retrieval."""


class OvermodulationError(RydrxError):
    """AM envelope would go negative."""


class LinkError(RydrxError):
    """End-to-end link run failed (too many per-sample failures)."""


class SchemaError(RydrxError):
    """Serialized file does not match a supported schema."""
