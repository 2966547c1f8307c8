"""Exception types raised across the package."""


class GraphError(ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class NonPositiveWeight(GraphError):
    pass


class IndexOutOfRange(GraphError):
    pass


class IsolatedVertex(GraphError):
    pass


class DisconnectedGraph(GraphError):
    pass


class DimensionMismatch(ValueError):
    pass


class EmptyVector(ValueError):
    pass


class MissingSignal(KeyError):
    pass


class ConfigError(ValueError):
    pass


# dataset_io

class DatasetError(Exception):
    pass


class MissingFile(DatasetError, FileNotFoundError):
    pass


class MalformedLine(DatasetError):
    def __init__(self, path, lineno, text, reason="could not parse"):
        self.path = path
        self.lineno = lineno
        self.text = text
        super().__init__(f"{path}:{lineno}: {reason}: {text!r}")


class EdgeAcrossGraphs(DatasetError):
    pass


class OrphanVertexIndex(DatasetError):
    pass


class SchemaMismatch(DatasetError):
    pass


# analysis / learning

class TooFewSamples(ValueError):
    pass


class ClassTooSmall(ValueError):
    pass


class ZeroSelfDistance(ValueError):
    pass


class DegenerateLabels(ValueError):
    pass


class FoldTooSmall(ValueError):
    pass


class NonConvergenceWarning(RuntimeWarning):
    pass


class DegenerateDataWarning(RuntimeWarning):
    pass


class DatasetWarning(UserWarning):
    pass
