"""Exception hierarchy shared by all svbev modules."""


class SvbevError(Exception):
    """Base class for every error raised by this package."""


# camera / calibration
class GeometryError(SvbevError):
    pass


class AngleOutOfFov(GeometryError):
    pass


class RadiusOutOfRange(GeometryError):
    pass


class BehindCamera(GeometryError):
    pass


class OutOfFov(GeometryError):
    pass


class RayParallelToGround(GeometryError):
    pass


class RayHitsAboveHorizon(GeometryError):
    pass


class CalibrationError(SvbevError):
    pass


class MissingChannel(CalibrationError):
    pass


class NonOrthonormalRotation(CalibrationError):
    pass


class NonMonotoneDistortion(CalibrationError):
    pass


class FormatError(SvbevError):
    """A document does not match its schema (unknown field, wrong type, bad header)."""


# domain model
class UnknownVehicleType(SvbevError, KeyError):
    pass


class DuplicateContactPoint(SvbevError, ValueError):
    pass


# fusion
class ConflictingGeometry(SvbevError):
    pass


# bev generation
class PoseError(SvbevError):
    pass


class DegenerateSide(PoseError):
    pass


class WheelsCoincident(PoseError):
    pass


class PointsCoincident(PoseError):
    pass


class MissingRegressedHeading(PoseError):
    pass


class InsufficientGeometry(PoseError):
    pass


# runtime
class MismatchedFrameIds(SvbevError):
    pass
