"""Exception hierarchy shared by all flexgate modules."""


class FlexgateError(Exception):
    pass


class MeshError(FlexgateError, ValueError):
    """Input does not describe a closed triangulated surface."""


class NonManifoldEdge(MeshError):
    pass


class NonTriangleFace(MeshError):
    pass


class DanglingVertex(MeshError):
    pass


class NotOrientable(MeshError):
    pass


class DegenerateFace(FlexgateError, ValueError):
    pass


class BothBranchesUndefined(FlexgateError, ValueError):
    pass


class BranchUndefined(FlexgateError, ValueError):
    pass


class NotAFirstOrderFlex(FlexgateError, ValueError):
    pass


class SizeMismatch(FlexgateError, ValueError):
    pass


class DegenerateVertexSet(FlexgateError, ValueError):
    pass


class DecompositionFailed(FlexgateError, ValueError):
    pass


class TheoremHypothesisViolated(FlexgateError, ValueError):
    pass


class IndexOutOfRange(FlexgateError, IndexError):
    pass


class EnumerationTooLarge(FlexgateError, ValueError):
    pass


class AngleUnwrapFailure(FlexgateError, ArithmeticError):
    pass


class ContinuationStalled(FlexgateError, RuntimeError):
    pass


class KernelCollapse(FlexgateError, RuntimeError):
    pass


class InvalidParams(FlexgateError, ValueError):
    pass


class UnknownExample(FlexgateError, KeyError):
    pass


class ParseError(FlexgateError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
