"""Exception hierarchy. Every error raised by the library derives from `HilbertLabError`."""


class HilbertLabError(ValueError):
    pass


# projective algebra
class NotCollinear(HilbertLabError):
    pass


class DegenerateConfiguration(HilbertLabError):
    pass


class NotInvertible(HilbertLabError):
    pass


class NotConverged(HilbertLabError):
    pass


class KernelPoint(HilbertLabError):
    pass


# domains and subsets
class InvalidDomain(HilbertLabError):
    pass


class SegmentOutside(HilbertLabError):
    pass


class CoincidentPoints(HilbertLabError):
    pass


class OutsidePoint(HilbertLabError):
    pass


class EmptySubset(HilbertLabError):
    pass


class BoundedSubset(HilbertLabError):
    pass


class NotASubset(HilbertLabError):
    pass


class DependentVertices(HilbertLabError):
    pass


# metric
class NotInterior(HilbertLabError):
    pass


class EmptySet(HilbertLabError):
    pass


class NotInRelativeInterior(HilbertLabError):
    pass


class FaceMismatch(HilbertLabError):
    pass


class NotConverging(HilbertLabError):
    pass


# groups
class DomainNotPreserved(HilbertLabError):
    pass


class NotProximal(HilbertLabError):
    pass


class AxisMissesDomain(HilbertLabError):
    pass


class EmptyLimitSet(HilbertLabError):
    pass


class BadSignature(HilbertLabError):
    pass


class RelationViolated(HilbertLabError):
    pass


class PingPongFails(HilbertLabError):
    pass


class WordLimitExceeded(HilbertLabError):
    pass


# peripheral families and quotients
class TooFewTranslates(HilbertLabError):
    pass


class NotProperlyEmbedded(HilbertLabError):
    pass


class ProjectionEscapes(HilbertLabError):
    pass


class TooFewSamples(HilbertLabError):
    pass


class NotIdealPoint(HilbertLabError):
    pass


class EmptySample(HilbertLabError):
    pass


# scene / cli
class ParseError(HilbertLabError):
    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class ValidationError(HilbertLabError):
    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class UnknownCommand(HilbertLabError):
    pass


class UnsupportedPlotDimension(HilbertLabError):
    pass
