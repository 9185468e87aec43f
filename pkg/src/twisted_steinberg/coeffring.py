"""Arithmetic in the coefficient ring Z/n and its unit group.

Elements are kept as canonical residues in ``[0, n)``.  The rest of the
package mostly works with plain ``int`` residues for speed and wraps them in
:class:`RingElem` only at API boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import NotAUnit


@dataclass(frozen=True)
class CoeffRing:
    """The ring Z/n for ``n >= 2``."""

    modulus: int

    def __post_init__(self):
        if not isinstance(self.modulus, int) or self.modulus < 2:
            raise ValueError(f"modulus must be an integer >= 2, got {self.modulus!r}")

    def __call__(self, value: int) -> RingElem:
        return RingElem(value % self.modulus, self)

    def __repr__(self) -> str:
        return f"Z/{self.modulus}"

    @cached_property
    def units(self) -> tuple[int, ...]:
        """Residues coprime to the modulus, ascending (so ``1`` comes first)."""
        return tuple(v for v in range(1, self.modulus) if math.gcd(v, self.modulus) == 1)

    @cached_property
    def unit_index(self) -> dict[int, int]:
        return {t: k for k, t in enumerate(self.units)}

    def reduce(self, value: int) -> int:
        return value % self.modulus

    def is_unit_value(self, value: int) -> bool:
        return math.gcd(value % self.modulus, self.modulus) == 1

    def inv(self, value: int) -> int:
        """Inverse of a residue; raises :class:`NotAUnit` when none exists."""
        value %= self.modulus
        if math.gcd(value, self.modulus) != 1:
            raise NotAUnit(f"{value} is not a unit of {self!r}")
        return pow(value, -1, self.modulus)

    def power(self, value: int, exponent: int) -> int:
        if exponent < 0:
            return pow(self.inv(value), -exponent, self.modulus)
        return pow(value, exponent, self.modulus)


@dataclass(frozen=True)
class RingElem:
    value: int
    ring: CoeffRing

    def __post_init__(self):
        if not 0 <= self.value < self.ring.modulus:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.ring.modulus}")

    def _coerce(self, other) -> int:
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ring(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ring(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ring(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.ring(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self.ring(-self.value)

    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ring.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ring.modulus))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.ring.modulus})"


def is_unit(r: RingElem) -> bool:
    return math.gcd(r.value, r.ring.modulus) == 1


def unit_inverse(r: RingElem) -> RingElem:
    return RingElem(r.ring.inv(r.value), r.ring)


def units_of(ring: CoeffRing) -> frozenset[RingElem]:
    return frozenset(RingElem(v, ring) for v in ring.units)
