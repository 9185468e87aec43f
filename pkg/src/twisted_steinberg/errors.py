"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SteinbergError(Exception):
    """Base class for all library errors."""


class NotAUnit(SteinbergError):
    """A ring element expected to be invertible is not."""


class AxiomViolation(SteinbergError):
    """A candidate groupoid table breaks a groupoid axiom.

    ``kind`` names the axiom, ``witness`` is the offending tuple of labels.
    """

    def __init__(self, kind: str, witness: tuple = ()):
        self.kind = kind
        self.witness = witness
        super().__init__(f"{kind}: {witness}")


class NotASubgroupoid(SteinbergError):
    def __init__(self, witness: tuple = ()):
        self.witness = witness
        super().__init__(f"not closed under composition/inversion: {witness}")


class NotABisection(SteinbergError):
    pass


class FibreCollision(SteinbergError):
    pass


class CocycleError(SteinbergError):
    """Base for cocycle validation failures; ``witness`` holds labels."""

    def __init__(self, witness: tuple = ()):
        self.witness = witness
        super().__init__(f"{type(self).__name__}: {witness}")


class CocycleNotAUnit(CocycleError, NotAUnit):
    pass


class NormalizationFail(CocycleError):
    pass


class CocycleIdentityFail(CocycleError):
    pass


class NoSection(SteinbergError):
    pass


class TwistMismatch(SteinbergError):
    pass


class BaseMismatch(SteinbergError):
    pass


class NotAHomomorphism(SteinbergError):
    def __init__(self, witness: tuple = ()):
        self.witness = witness
        super().__init__(f"grading is not multiplicative on {witness}")


class SupportOutsideEpsilon(SteinbergError):
    pass


class PreconditionFail(SteinbergError):
    pass


class ZeroInput(SteinbergError):
    pass


class NotHomogeneous(SteinbergError):
    pass


class NotHomogeneousGenerators(NotHomogeneous):
    pass


class NotEffective(SteinbergError):
    pass


class NotEffectiveEpsilon(NotEffective):
    pass


class TooLarge(SteinbergError):
    pass


class SinkVertex(SteinbergError):
    pass


class DepthExceeded(TooLarge):
    pass


class CocycleDomainError(CocycleError):
    pass
