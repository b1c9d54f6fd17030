class HeisenbergError(Exception):
    """Base class for domain failures (reported with exit status 1 by the CLI)."""


class InvalidParameter(HeisenbergError, ValueError):
    pass


class ChartSingular(HeisenbergError):
    pass


class OutsideCausalShadow(HeisenbergError):
    """x < |y|: the point is not reachable by any causal curve from the identity."""


class NoConvergence(HeisenbergError):
    def __init__(self, message, best_residual=float("nan")):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


class NotAdmissible(HeisenbergError):
    pass


class PlanFailure(HeisenbergError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IllConditioned(HeisenbergError):
    pass


class NotCausal(HeisenbergError):
    pass
