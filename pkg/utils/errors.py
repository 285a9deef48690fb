"""Exception hierarchy for the superposition graph workbench."""


class SupergraphError(Exception):
    """Base class for every error raised by this package."""


class ConfigInvalid(SupergraphError):
    pass


class NonConvergent(SupergraphError):
    """A moment series could not be decided finite or infinite."""


class NotTwoConnected(SupergraphError):
    pass


class NotBalanced(SupergraphError):
    pass


class AlphaOutOfRange(SupergraphError):
    pass


class AlphaOneUnsupported(SupergraphError):
    """alpha = 1 needs the log-m centering constant, which is not available."""


class MalformedMotif(SupergraphError):
    pass


class HostTooLarge(SupergraphError):
    pass


class TooManyEdges(SupergraphError):
    pass


class KOutOfBudget(SupergraphError):
    pass


class InfiniteVariance(SupergraphError):
    pass


class MethodBudgetExceeded(SupergraphError):
    pass


class ZeroScale(SupergraphError):
    pass


class InsufficientSamples(SupergraphError):
    pass


class DegenerateSample(InsufficientSamples):
    """All upper order statistics coincide, so the log-spacing sum is zero."""


class EmptySample(SupergraphError):
    pass


class BudgetExceeded(SupergraphError):
    pass


class IoFailure(SupergraphError):
    pass
