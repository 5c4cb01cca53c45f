"""Exception types shared across the solver library."""


class HcSolversError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatchError(HcSolversError):
    """An input vector does not match the problem/set dimension."""


class InfeasibleError(HcSolversError):
    """A projection target (box plus halfspaces) is empty."""


class QpInfeasibleError(InfeasibleError):
    """A bundle-level / linearized QP subproblem has no feasible point."""


class EmptyFeasibleSetError(HcSolversError):
    """A switching inner loop produced no feasible iterate to average."""


class InfeasibleStartError(HcSolversError):
    """The starting point violates the required constraint slack."""


class FeasibilityNotReachedError(HcSolversError):
    """A feasibility restoration phase ran out of budget."""


class PreconditionViolatedError(HcSolversError):
    """A parameter schedule was requested outside its validity range."""


class NonSmoothProblemError(HcSolversError):
    """A smoothness constant is required but the problem is non-smooth."""


class MissingMuHError(HcSolversError):
    """The hidden strong-convexity modulus is required but not declared."""


class NoFeasibleGridPointError(HcSolversError):
    """A grid scan found no point satisfying the constraint slack."""


class ConfigError(HcSolversError):
    """Bad or inconsistent CLI/benchmark configuration."""
