"""Exception hierarchy shared across the package."""


class ColorisoError(Exception):
    """Base class for all package errors."""


class InvalidFieldError(ColorisoError):
    """Modulus is not a prime number."""


class BudgetExceededError(ColorisoError):
    """A configured memory or work budget would be exceeded."""


class DimensionMismatchError(ColorisoError):
    """Evaluation point does not match the polynomial's variable count."""


class DegenerateInputError(ColorisoError):
    """Inputs violate a degeneracy precondition (repeated points, degree too low)."""


class AllRootsError(ColorisoError):
    """Every vertex of the tree is rooted; density is undefined."""


class CapExceededError(ColorisoError):
    """Exhaustive enumeration would exceed the configured cap."""


class ParameterError(ColorisoError):
    """Numeric parameters outside their allowed range."""


class SizeError(ColorisoError):
    """Instance size outside the supported regime."""


class RootMismatchError(ColorisoError):
    """A labelled copy is not rooted at the prescribed vertex tuple."""


class NonDisjointPairError(ColorisoError):
    """Two copies that must be vertex disjoint share a vertex."""


class UnbalancedTreeError(ColorisoError):
    """Operation requires a balanced rooted tree."""


class ImproperColouringError(ColorisoError):
    """Operation requires a proper edge colouring."""


class DegenerateOutputError(ColorisoError):
    """Regularization left too few vertices or an unbalanced bipartition."""


class ContractViolationError(ColorisoError):
    """Caller passed data violating a documented contract."""


class InfeasibleSizeError(ColorisoError):
    """Exhaustive enumeration is not feasible at this instance size."""


class FormatError(ColorisoError):
    """Malformed input file (CSV/JSON); message carries the location."""
