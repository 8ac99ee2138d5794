"""Error types shared across the pipeline.

Each stage raises its own subclass so the command line tool can map
failures to distinct exit codes.
"""


class SerinarrError(Exception):
    """Base class for all pipeline errors."""


class IngestError(SerinarrError):
    """Input could not be parsed or does not form a usable series."""


class EmptyZoneError(IngestError):
    """A zone of the time axis received no samples.

    Attributes
    ----------
    zone : int
        Index of the first empty zone.
    """

    def __init__(self, zone: int, n_zones: int):
        self.zone = zone
        self.n_zones = n_zones
        super().__init__(
            f"zone {zone} of {n_zones} contains no samples; "
            f"use fewer levels or a denser series"
        )


class FitError(SerinarrError):
    """Curve fitting failed or produced an unusable descriptor pool."""


class SolveError(SerinarrError):
    """Cover or detail selection could not produce a result."""


class OutputError(SerinarrError):
    """Writing an output artifact failed."""
