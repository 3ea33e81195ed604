"""Exception hierarchy shared by every module."""


class StereoQuantError(Exception):
    """Base class for all package errors."""


class ConfigError(StereoQuantError, ValueError):
    pass


class GeometryError(StereoQuantError, ValueError):
    """A point or region is geometrically unusable for the camera rig."""


class BehindCamera(GeometryError):
    pass


class OutOfView(GeometryError):
    pass


class TargetNotVisible(GeometryError):
    pass


class DegenerateRegion(GeometryError):
    pass


class TooManyPoints(StereoQuantError, MemoryError):
    """Grid would exceed the configured point cap."""

    def __init__(self, count, cap, bytes_needed):
        self.count = int(count)
        self.cap = int(cap)
        self.bytes_needed = int(bytes_needed)
        super().__init__(
            f"grid needs {self.count:,} points (cap {self.cap:,}); "
            f"about {self.bytes_needed / 2**20:.1f} MiB of working memory"
        )


class GridMismatch(StereoQuantError, ValueError):
    pass


class FewerThanTwoTables(StereoQuantError, ValueError):
    pass


class NotFound(StereoQuantError, KeyError):
    pass


class OutsideRegion(StereoQuantError, ValueError):
    pass


class NotCovered(StereoQuantError, KeyError):
    pass


class VersionMismatch(StereoQuantError):
    pass


class CorruptFile(StereoQuantError):
    pass


class EmptyRegion(StereoQuantError, ValueError):
    pass


class LengthMismatch(StereoQuantError, ValueError):
    pass


class EmptySeries(StereoQuantError, ValueError):
    pass


class NonPositiveValue(StereoQuantError, ValueError):
    pass


class NonPositiveData(StereoQuantError, ValueError):
    pass


class TooFewPoints(StereoQuantError, ValueError):
    pass
