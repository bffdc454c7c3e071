"""Exception hierarchy for coxeter_walls.

Every error is a ValueError so callers can treat bad input uniformly.
"""


class CoxeterError(ValueError):
    """Base class for all domain errors."""


class SystemFormatError(CoxeterError):
    """A Coxeter matrix file or document could not be parsed."""


class DiagonalNotOne(CoxeterError):
    def __init__(self, s: int, value):
        self.pair = (s, s)
        super().__init__(f"Diagonal entry m({s},{s}) must be 1, got {value}")


class NotSymmetric(CoxeterError):
    def __init__(self, s: int, t: int, m_st, m_ts):
        self.pair = (s, t)
        super().__init__(
            f"Order matrix is not symmetric: m({s},{t})={m_st} but m({t},{s})={m_ts}"
        )


class OffDiagonalBelowTwo(CoxeterError):
    def __init__(self, s: int, t: int, value):
        self.pair = (s, t)
        super().__init__(f"Off-diagonal entry m({s},{t}) must be >= 2, got {value}")


class LetterOutOfRange(CoxeterError):
    def __init__(self, letter, rank: int):
        self.letter = letter
        super().__init__(f"Letter {letter} is not a generator index in [0, {rank})")


class SystemMismatch(CoxeterError):
    """Elements from different Coxeter systems were combined."""


class ResourceCap(CoxeterError):
    """An enumeration would exceed its configured element cap."""


class Undecided(CoxeterError):
    """Sphericity could not be decided consistently by both methods."""


class EmptyTarget(CoxeterError):
    """A quasi-density profile was requested against an empty target set."""


class NotAffineType(CoxeterError):
    def __init__(self, component, reason: str):
        self.component = tuple(component)
        super().__init__(f"Component {sorted(component)} is not of affine type: {reason}")


class NonConvergence(CoxeterError):
    """Folding did not reach the fundamental chamber within the iteration cap."""


class DegenerateSample(CoxeterError):
    """A chamber sample point lies on the wall being tested."""


class DegenerateCrossing(CoxeterError):
    """A segment kept meeting a codimension >= 2 stratum after all retries."""


class DimensionNotTwo(CoxeterError):
    def __init__(self, dim: int):
        self.dim = dim
        super().__init__(f"Tiling export needs a 2-dimensional realization, got dimension {dim}")
