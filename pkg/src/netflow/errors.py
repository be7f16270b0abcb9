"""Exception types raised by the netflow package."""


class NetflowError(Exception):
    """Base class for all netflow errors."""


class SelfLoop(NetflowError):
    """An edge connects a node to itself."""


class EndpointOutOfRange(NetflowError):
    """An edge endpoint is outside the 1..n node range."""


class DisconnectedGraph(NetflowError):
    """The underlying undirected graph is not connected."""


class InfeasibleEdgeCount(NetflowError):
    """Requested edge count cannot be realized on n nodes."""


class RejectionLimitExceeded(NetflowError):
    """Random generation failed to produce a connected non-bipartite graph
    within the attempt cap."""


class UnbalancedSupply(NetflowError):
    """Supply vector entries do not sum to zero."""


class NonPositiveCoefficient(NetflowError):
    """An edge cost coefficient is not strictly positive."""


class DimensionMismatch(NetflowError):
    """Vector/matrix dimensions do not agree."""


class SingularBeyondNullspace(NetflowError):
    """The Hessian has rank below n-1, so the Newton system has no unique
    solution on the mean-zero subspace (disconnected support)."""


class BacktrackExhausted(NetflowError):
    """Backtracking hit the trial cap without satisfying the acceptance rule.

    Carries the fallback step and the exchange rounds already spent so the
    caller can continue with ``alpha_fallback`` and flag the event.
    """

    def __init__(self, max_backtracks: int, alpha_fallback: float, exchanges_used: int):
        super().__init__(
            f"no acceptable step within {max_backtracks} backtracks; "
            f"falling back to alpha={alpha_fallback:g}"
        )
        self.max_backtracks = max_backtracks
        self.alpha_fallback = alpha_fallback
        self.exchanges_used = exchanges_used


class EmptyInput(NetflowError):
    """No usable input records were found."""
