"""Exception hierarchy shared by all skewcat modules."""

import os

DEFAULT_MAX_SIZE = 512


def max_size(override: int | None = None) -> int:
    """Resolve the size cap: explicit override, then SKEWCAT_MAX_SIZE, then the default."""
    if override is not None:
        return int(override)
    env = os.environ.get("SKEWCAT_MAX_SIZE")
    return int(env) if env else DEFAULT_MAX_SIZE


class SkewcatError(Exception):
    pass


class TableError(SkewcatError, ValueError):
    """Malformed operation table, map or matrix (shape or range)."""


class SizeOverflow(SkewcatError):
    pass


class LawViolation(SkewcatError):
    """A defining identity fails; ``witness`` holds the offending elements."""

    law = "law"

    def __init__(self, *witness: int, op: str | None = None):
        self.witness = tuple(int(w) for w in witness)
        self.op = op
        where = f" ({op})" if op else ""
        super().__init__(f"{self.law}{where} fails at {self.witness}")


class NotAssociative(LawViolation):
    law = "associativity"


class NotIdempotent(LawViolation):
    law = "idempotency"


class AbsorptionFails(LawViolation):
    law = "absorption"


class ZeroLawFails(LawViolation):
    law = "zero law"


class NotALattice(LawViolation):
    law = "commutativity"


class NotDistributive(LawViolation):
    law = "distributivity"


class NotAPoset(LawViolation):
    law = "partial order axiom"


class NotACongruence(SkewcatError):
    pass


class NotDistributiveReflection(SkewcatError):
    pass


class PreconditionUnmet(SkewcatError):
    pass


class NotMonotone(SkewcatError):
    pass


class NotProper(SkewcatError):
    pass


class NotSubdownset(SkewcatError):
    pass


class IncompatibleFamily(SkewcatError):
    def __init__(self, i: int, j: int, x: int):
        self.i, self.j, self.x = i, j, x
        super().__init__(f"sections {i} and {j} disagree at point {x}")


class NoRealization(SkewcatError):
    pass


class InternalCheckFailed(SkewcatError, AssertionError):
    """A property guaranteed by theory did not hold: bug or invalid input."""


class InternalCompatibilityViolation(InternalCheckFailed):
    pass
