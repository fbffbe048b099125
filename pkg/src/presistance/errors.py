"""Exception types shared across the toolkit."""


class PresistanceError(Exception):
    """Base class for all toolkit errors."""


class GraphError(PresistanceError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class NonPositiveWeight(GraphError):
    pass


class Disconnected(GraphError):
    """Raised when a graph is not connected; carries the components."""

    def __init__(self, components):
        self.components = [sorted(c) for c in components]
        super().__init__(
            "graph is not connected; components: "
            + ", ".join("{" + ",".join(map(str, c)) + "}" for c in self.components)
        )


class InvalidParams(PresistanceError):
    pass


class DimensionMismatch(PresistanceError):
    pass


class NonFinite(PresistanceError):
    pass


class InvalidP(PresistanceError):
    pass


class SingularShift(PresistanceError):
    """Pseudoinverse computation broke down on both solve routes."""


class FingerprintMismatch(PresistanceError):
    pass


class InvalidK(PresistanceError):
    pass


class LengthMismatch(PresistanceError):
    pass


class EigenFailure(PresistanceError):
    pass


class ParseError(PresistanceError):
    pass


class RaggedRows(ParseError):
    pass


class NonNumericFeature(ParseError):
    pass


class DegenerateKernel(PresistanceError):
    pass
