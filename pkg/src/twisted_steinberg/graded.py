"""Gradings of finite twists by finitely generated abelian groups."""

from __future__ import annotations

import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .algebra import AlgElem, restrict_element
from .errors import NotAHomomorphism, SupportOutsideEpsilon
from .twist import DiscreteTwist, restrict_twist


@dataclass(frozen=True)
class AbelianGroup:
    """``Z/m1 x Z/m2 x ...``; a modulus of 0 stands for a copy of Z.

    Elements are tuples of ints, reduced into ``[0, m)`` on finite factors.
    """

    moduli: tuple[int, ...]

    def __post_init__(self):
        if not self.moduli or any(m < 0 or m == 1 for m in self.moduli):
            raise ValueError(f"bad group descriptor {self.moduli}")

    @classmethod
    def parse(cls, text: str) -> AbelianGroup:
        """Parse ``"Z"``, ``"Z/2"`` or products such as ``"Z/2xZ/3"``."""
        moduli = []
        for part in re.split(r"\s*[x×]\s*", text.strip()):
            m = re.fullmatch(r"Z(?:/(\d+))?", part.strip())
            if not m:
                raise ValueError(f"cannot parse group {text!r}")
            moduli.append(int(m.group(1)) if m.group(1) else 0)
        return cls(tuple(moduli))

    def __str__(self) -> str:
        return "x".join("Z" if m == 0 else f"Z/{m}" for m in self.moduli)

    @property
    def identity(self) -> tuple[int, ...]:
        return (0,) * len(self.moduli)

    def elem(self, value) -> tuple[int, ...]:
        if isinstance(value, int):
            value = (value,)
        value = tuple(int(v) for v in value)
        if len(value) != len(self.moduli):
            raise ValueError(f"{value} is not an element of {self}")
        return tuple(v % m if m else v for v, m in zip(value, self.moduli))

    def add(self, a, b) -> tuple[int, ...]:
        return self.elem(tuple(x + y for x, y in zip(a, b)))

    def neg(self, a) -> tuple[int, ...]:
        return self.elem(tuple(-x for x in a))

    def format(self, a) -> str:
        return str(a[0]) if len(a) == 1 else "(" + ",".join(map(str, a)) + ")"


def cyclic(m: int) -> AbelianGroup:
    return AbelianGroup((m,))


def integers() -> AbelianGroup:
    return AbelianGroup((0,))


@dataclass(frozen=True)
class Grading:
    twist: DiscreteTwist = field(repr=False)
    gamma: AbelianGroup
    cG: tuple[tuple[int, ...], ...]

    @cached_property
    def cSigma(self) -> tuple[tuple[int, ...], ...]:
        """``cG o q``."""
        return tuple(self.cG[a] for a in self.twist.qmap)

    def degree(self, a: int) -> tuple[int, ...]:
        return self.cG[a]

    def component(self, gamma) -> frozenset[int]:
        gamma = self.gamma.elem(gamma)
        return frozenset(a for a, d in enumerate(self.cG) if d == gamma)

    def sigma_component(self, gamma) -> frozenset[int]:
        gamma = self.gamma.elem(gamma)
        return frozenset(e for e, d in enumerate(self.cSigma) if d == gamma)

    @cached_property
    def epsilon(self) -> frozenset[int]:
        return self.component(self.gamma.identity)

    @cached_property
    def epsilon_twist(self) -> DiscreteTwist:
        """The restriction of the twist to ``G_eps``."""
        return restrict_twist(self.twist, self.epsilon)

    def degree_of(self, f: AlgElem):
        """The common degree of a nonzero homogeneous element, else ``None``."""
        degrees = {self.cG[a] for a in f.coeffs}
        return degrees.pop() if len(degrees) == 1 else None


def validate_grading(twist: DiscreteTwist, gamma: AbelianGroup, cG: Mapping) -> Grading:
    """Check that ``cG`` is a groupoid homomorphism into ``gamma``.

    ``cG`` maps ids or labels of the base to group elements; unlisted elements
    get the identity.  Raises :class:`NotAHomomorphism` with the first bad pair.
    """
    G = twist.base
    degrees = [gamma.identity] * len(G)
    for a, v in cG.items():
        a = a if isinstance(a, int) else G.id_of(a)
        degrees[a] = gamma.elem(v)
    for (a, b), ab in sorted(G.comp.items()):
        if gamma.add(degrees[a], degrees[b]) != degrees[ab]:
            raise NotAHomomorphism(G.lab((a, b)))
    return Grading(twist, gamma, tuple(degrees))


def homogeneous_decompose(f: AlgElem, grading: Grading) -> dict[tuple[int, ...], AlgElem]:
    parts: dict[tuple[int, ...], dict[int, int]] = {}
    for a, v in f.coeffs.items():
        parts.setdefault(grading.cG[a], {})[a] = v
    return {d: AlgElem(f.section, c) for d, c in sorted(parts.items())}


def epsilon_restrict(f: AlgElem, grading: Grading) -> AlgElem:
    """View an element supported in ``G_eps`` as an element over the restricted twist."""
    outside = sorted(set(f.coeffs) - grading.epsilon)
    if outside:
        raise SupportOutsideEpsilon(f"support meets {f.twist.base.lab(outside)}")
    return restrict_element(f, grading.epsilon_twist)
