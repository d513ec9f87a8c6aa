"""Exception hierarchy shared across the package."""


class GeometryError(Exception):
    """Base class for all geometric construction and query errors."""


# -- curves ------------------------------------------------------------
class NonFiniteCurvature(GeometryError):
    pass


class ToleranceTooCoarse(GeometryError):
    pass


class ParameterOutOfRange(GeometryError):
    pass


# -- domains -----------------------------------------------------------
class NotClosed(GeometryError):
    pass


class SelfIntersecting(GeometryError):
    pass


class LoopsIntersect(GeometryError):
    pass


class BadOrientation(GeometryError):
    pass


class LengthMismatch(GeometryError):
    pass


class NotLocallyConvex(GeometryError):
    pass


# -- geodesics / gluing ------------------------------------------------
class PointOutside(GeometryError):
    pass


class Disconnected(GeometryError):
    pass


class ClippedGeodesic(GeometryError):
    """Shortest path touched a clip-box edge; the query is not trustworthy."""


class ConditionsViolated(GeometryError):
    pass


class NoCrossings(GeometryError):
    pass


class AngleDomain(GeometryError):
    pass


# -- comparison triangles ----------------------------------------------
class TriangleInequalityViolated(GeometryError):
    pass


# -- approximation -----------------------------------------------------
class WindowTooSmall(GeometryError):
    pass


# -- model surface -----------------------------------------------------
class OutsideModel(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class StepUnderflow(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


# -- scenarios ---------------------------------------------------------
class ParseError(Exception):
    """Scenario document failed to parse or validate."""


class GeometryInvalid(Exception):
    """Scenario geometry could not be constructed."""
