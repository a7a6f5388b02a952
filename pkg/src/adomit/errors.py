"""Exception types raised by the adomit package."""


class AdomitError(ValueError):
    """Base class for all data and configuration errors."""


class DegenerateSegmentError(AdomitError):
    """A segment whose endpoints coincide has no slope angle."""


class NoIntersectionError(AdomitError):
    """The threshold ray never meets the baseline to the right of its origin."""


class MapError(AdomitError):
    """Base class for bitext map validation failures."""


class MapParseError(MapError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class MonotonicityError(MapError):
    def __init__(self, first, second):
        super().__init__(
            f"y decreases between points ({first[0]}, {first[1]}) and ({second[0]}, {second[1]})"
        )
        self.first = first
        self.second = second


class OutOfBoundsError(MapError):
    pass


class ConfigurationError(AdomitError):
    """Parameters that make a computation meaningless, e.g. a threshold too steep."""


class PlacementError(AdomitError):
    def __init__(self, requested, placed, message=None):
        super().__init__(
            message or f"could only place {placed} of {requested} omissions"
        )
        self.requested = requested
        self.placed = placed
