"""Exception types shared across the library."""


class GrassprojError(Exception):
    """Base class for all library errors."""


class RankDeficient(GrassprojError):
    """Input vectors are numerically dependent."""


class AmbientMismatch(GrassprojError):
    """Operands live in different ambient dimensions."""


class DimMismatch(GrassprojError):
    """Subspace dimensions do not satisfy the operation's requirement."""


class Singular(GrassprojError):
    """Linear map is not invertible."""


class ScaleTooFine(GrassprojError):
    """Requested scale is finer than the set's resolution."""


class EmptySet(GrassprojError):
    """Operation requires a nonempty cell set."""


class EmptyInput(GrassprojError):
    """Operation requires nonempty input sets."""


class PreconditionViolated(GrassprojError):
    """A stated hypothesis of a lemma checker fails on the given input."""


class WeightsInvalid(GrassprojError):
    """Probability weights are negative or do not sum to one."""


class BadIndex(GrassprojError):
    """Coordinate index set is empty or out of range."""


class ArithmeticMismatch(GrassprojError):
    """Integer parameters do not satisfy n = q*(n-m) + r."""


class InvalidCover(GrassprojError):
    """Multiset of index subsets is not a uniform cover of its ground set."""


class DimOverflow(GrassprojError):
    """Requested tuple of subspaces cannot fit in the ambient space."""


class EmptySupport(GrassprojError):
    """Empirical measure has no support."""


class BadBase(GrassprojError):
    """Digit-set generator base must be a power of two."""


class Degenerate(GrassprojError):
    """Subspace pair is too close to a degenerate configuration."""
