"""Exception types shared across the package."""


class BandSenseError(Exception):
    """Base class for all package-specific errors."""


class InfeasibleBend(BandSenseError):
    """Bend angle too large for the band spacing: arc length exceeds the segment.

    ``segment`` is the zero-based segment index when known, else None.
    """

    def __init__(self, theta_rad, limit_rad, segment=None):
        self.theta_rad = theta_rad
        self.limit_rad = limit_rad
        self.segment = segment
        where = f" in segment {segment}" if segment is not None else ""
        super().__init__(
            f"bend angle {theta_rad:.6f} rad exceeds feasibility limit "
            f"{limit_rad:.6f} rad{where}"
        )


class AntiparallelHeadings(BandSenseError):
    """Consecutive headings are opposite; the bend axis is undefined."""


class EmptyInput(BandSenseError):
    """An operation received fewer inputs than it can work with."""


class EmptyCloud(BandSenseError):
    """Statistics requested on a shape cloud with no samples."""


class LengthMismatch(BandSenseError):
    """Two sequences that must correspond elementwise have different lengths."""


class DegenerateSegment(BandSenseError):
    """The first two points of a polyline coincide; no direction to align."""


class WindowTooLong(BandSenseError):
    """A baseline window longer than the series it applies to."""


class MisalignedSeries(BandSenseError):
    """Sensor series that must share a time base do not."""


class TimeOutOfRange(BandSenseError):
    """A query time outside the scenario's trajectory span."""


class AddressCollision(BandSenseError):
    """Two bus nodes share the same address."""


class FrameError(BandSenseError):
    """A bus frame failed to decode (bad checksum, length, or kind)."""


class MissingBands(BandSenseError):
    """A reconstruction was requested at a tick with missing band records."""

    def __init__(self, band_ids):
        self.band_ids = list(band_ids)
        super().__init__(f"missing records for bands {self.band_ids}")


class SchemaVersionMismatch(BandSenseError):
    """A file header declares a schema version this reader does not support."""


class ParseError(BandSenseError):
    """A malformed line in a data file.

    ``line_number`` is 1-based.
    """

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(where + message)


class TooFewPoints(BandSenseError):
    """A ground-truth file with fewer than two band points."""
