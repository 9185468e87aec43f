"""Seeded random elements, ideals and cylinders for the oracle harness and the tests."""

from __future__ import annotations

import random

from .algebra import AlgElem
from .graded import Grading
from .graphwork import BPAlgElem, Cylinder, Graph, cylinders
from .twist import DiscreteTwist, Section


def random_element(S: Section | DiscreteTwist, rng: random.Random, nonzero: bool = True) -> AlgElem:
    """Uniform coordinates in ``(Z/n)^|G|``, resampled until nonzero when asked."""
    S = S if isinstance(S, Section) else S.section
    n, width = S.twist.ring.modulus, len(S.twist.base)
    while True:
        f = AlgElem(S, {a: rng.randrange(n) for a in range(width)})
        if f or not nonzero:
            return f


def random_homogeneous(grading: Grading, rng: random.Random) -> AlgElem:
    """A nonzero element supported in one degree component, the degree chosen uniformly."""
    S = grading.twist.section
    n = grading.twist.ring.modulus
    components = sorted({d for d in grading.cG})
    while True:
        comp = sorted(grading.component(rng.choice(components)))
        f = AlgElem(S, {a: rng.randrange(n) for a in comp})
        if f:
            return f


def random_generators(S: Section | DiscreteTwist, rng: random.Random, max_gens: int = 2,
                      grading: Grading | None = None) -> list[AlgElem]:
    """Zero to ``max_gens`` ideal generators; homogeneous when a grading is given."""
    count = rng.randrange(max_gens + 1)
    if grading is not None:
        return [random_homogeneous(grading, rng) for _ in range(count)]
    return [random_element(S, rng) for _ in range(count)]


def random_bp_element(graph: Graph, ring, rng: random.Random, depth: int = 2, terms: int = 2,
                      twist: int = 1, degree: int | None = None) -> BPAlgElem:
    pool: list[Cylinder] = cylinders(graph, depth)
    if degree is not None:
        pool = [c for c in pool if c.degree == degree]
    picked = [(rng.randrange(1, ring.modulus), rng.choice(pool)) for _ in range(terms)]
    return BPAlgElem(graph, ring, tuple(picked), twist)
