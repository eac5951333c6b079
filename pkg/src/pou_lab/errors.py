"""Exception hierarchy. Every error carries a stable machine-readable code."""


class PouLabError(Exception):
    code = "POU_LAB_ERROR"


class GraphFormatError(PouLabError, ValueError):
    code = "INVALID_GRAPH"


class CycleDetected(PouLabError):
    code = "CYCLE_DETECTED"


class DanglingEdge(PouLabError):
    code = "DANGLING_EDGE"


class DuplicateEdgeId(PouLabError):
    code = "DUPLICATE_EDGE_ID"


class SourceSinkInvalid(PouLabError):
    code = "SOURCE_SINK_INVALID"


class PathCapExceeded(PouLabError):
    code = "PATH_CAP_EXCEEDED"


class NotAFlow(PouLabError):
    code = "NOT_A_FLOW"


class NotMaximal(PouLabError):
    code = "NOT_MAXIMAL"


class InvalidDistribution(PouLabError, ValueError):
    code = "INVALID_DISTRIBUTION"


class PathNotInGraph(PouLabError):
    code = "PATH_NOT_IN_GRAPH"


class PathsNotDisjoint(PouLabError):
    code = "PATHS_NOT_DISJOINT"


class NotDecreasing(PouLabError):
    code = "NOT_DECREASING"


class NonIidStrategy(PouLabError):
    code = "NON_IID_STRATEGY"


class ResponseCapExceeded(PouLabError):
    code = "RESPONSE_CAP_EXCEEDED"


class NotDisjointPaths(PouLabError):
    code = "NOT_DISJOINT_PATHS"


class DegenerateDenominator(PouLabError):
    code = "DEGENERATE_DENOMINATOR"


class NonpositiveTeamValue(PouLabError):
    code = "NONPOSITIVE_TEAM_VALUE"


class SupportCapExceeded(PouLabError):
    code = "SUPPORT_CAP_EXCEEDED"


class GridCapExceeded(PouLabError):
    code = "GRID_CAP_EXCEEDED"


class InvalidParams(PouLabError, ValueError):
    code = "INVALID_PARAMS"


class LPError(PouLabError):
    code = "LP_FAILED"
