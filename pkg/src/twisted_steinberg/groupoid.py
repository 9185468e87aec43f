"""Finite groupoids given by explicit tables.

A finite Hausdorff étale groupoid is discrete, so every subset is compact
open and every bisection is a compact open bisection.  No topology is stored.

Element ids are the integers ``0 .. len(G) - 1``; human-readable labels live in
``FiniteGroupoid.labels``.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from .errors import AxiomViolation, NotABisection, NotASubgroupoid


@dataclass(frozen=True)
class FiniteGroupoid:
    """Raw groupoid tables.

    Constructing this class directly performs no checks; use
    :func:`validate_groupoid` or one of the builders to obtain a validated
    instance.
    """

    labels: tuple[str, ...]
    inv: tuple[int, ...]
    comp: Mapping[tuple[int, int], int]
    units: frozenset[int]
    rmap: tuple[int, ...]
    smap: tuple[int, ...]
    embedding: tuple[int, ...] | None = None
    parent: FiniteGroupoid | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"FiniteGroupoid({len(self)} elements, {len(self.units)} units)"

    @property
    def elements(self) -> range:
        return range(len(self.labels))

    @cached_property
    def index(self) -> dict[str, int]:
        return {lab: k for k, lab in enumerate(self.labels)}

    def id_of(self, label: Hashable) -> int:
        try:
            return self.index[str(label)]
        except KeyError:
            raise KeyError(f"unknown element label {label!r}") from None

    def compose(self, a: int, b: int) -> int | None:
        return self.comp.get((a, b))

    @cached_property
    def sorted_units(self) -> tuple[int, ...]:
        return tuple(sorted(self.units))

    @cached_property
    def range_fibres(self) -> dict[int, tuple[int, ...]]:
        """``x -> {γ : r(γ) = x}`` for each unit ``x``."""
        out: dict[int, list[int]] = {x: [] for x in self.units}
        for g in self.elements:
            out[self.rmap[g]].append(g)
        return {x: tuple(v) for x, v in out.items()}

    @cached_property
    def source_fibres(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {x: [] for x in self.units}
        for g in self.elements:
            out[self.smap[g]].append(g)
        return {x: tuple(v) for x, v in out.items()}

    @cached_property
    def composable_triples(self) -> tuple[tuple[int, int, int], ...]:
        triples = []
        for (a, b) in sorted(self.comp):
            for c in self.range_fibres[self.smap[b]]:
                triples.append((a, b, c))
        return tuple(triples)

    def lab(self, ids: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.labels[k] for k in ids)


def _first_violation(labels, inv, comp, units) -> tuple[AxiomViolation | None, tuple, tuple]:
    """Return ``(violation, rmap, smap)``; ``violation`` is ``None`` on success."""
    n = len(labels)
    L = labels
    elems = range(n)

    def fail(kind, *ids):
        return AxiomViolation(kind, tuple(L[k] if isinstance(k, int) and 0 <= k < n else k for k in ids)), (), ()

    if len(set(labels)) != n:
        return AxiomViolation("duplicate-label", ()), (), ()
    if len(inv) != n or any(not 0 <= v < n for v in inv):
        return AxiomViolation("inverse-total", ()), (), ()
    for g in elems:
        if inv[inv[g]] != g:
            return fail("inverse-involution", g)
    for (a, b), c in comp.items():
        if not (0 <= a < n and 0 <= b < n and 0 <= c < n):
            return AxiomViolation("composition-domain", (a, b, c)), (), ()
    for x in sorted(units):
        if not 0 <= x < n:
            return AxiomViolation("unit-domain", (x,)), (), ()
        if comp.get((x, x)) != x or inv[x] != x:
            return fail("unit", x)
    rmap, smap = [0] * n, [0] * n
    for g in elems:
        r = comp.get((g, inv[g]))
        s = comp.get((inv[g], g))
        if r is None or r not in units:
            return fail("range", g)
        if s is None or s not in units:
            return fail("source", g)
        rmap[g], smap[g] = r, s
    for a in elems:
        for b in elems:
            defined = (a, b) in comp
            if defined != (smap[a] == rmap[b]):
                return fail("composable-pairs", a, b)
    for (a, b), c in sorted(comp.items()):
        if rmap[c] != rmap[a] or smap[c] != smap[b]:
            return fail("range-source-of-product", a, b, c)
    for g in elems:
        if comp[(rmap[g], g)] != g or comp[(g, smap[g])] != g:
            return fail("unit-neutrality", g)
    idempotents = {g for g in elems if comp.get((g, g)) == g}
    if idempotents != set(units):
        extra = sorted(idempotents ^ set(units))
        return fail("unit-set", *extra)
    for (a, b), ab in sorted(comp.items()):
        for c in elems:
            if smap[b] != rmap[c]:
                continue
            if comp[(ab, c)] != comp[(a, comp[(b, c)])]:
                return fail("associativity", a, b, c)
    return None, tuple(rmap), tuple(smap)


def groupoid_violation(G: FiniteGroupoid) -> AxiomViolation | None:
    """Re-check the axioms on an already-built table (used for mutated inputs)."""
    return _first_violation(G.labels, G.inv, G.comp, G.units)[0]


def validate_groupoid(
    elements: Sequence[Hashable],
    inverse: Mapping[Hashable, Hashable],
    compose: Mapping[tuple[Hashable, Hashable], Hashable],
    units: Iterable[Hashable],
) -> FiniteGroupoid:
    """Build a :class:`FiniteGroupoid` from label-keyed tables, checking every axiom.

    Ids are assigned in the order of ``elements``.  Raises
    :class:`AxiomViolation` naming the first failed axiom and a witness.
    """
    labels = tuple(str(e) for e in elements)
    index = {lab: k for k, lab in enumerate(labels)}

    def idx(lab):
        try:
            return index[str(lab)]
        except KeyError:
            raise AxiomViolation("unknown-label", (str(lab),)) from None

    inv_map = {str(k): v for k, v in inverse.items()}
    missing = [lab for lab in labels if lab not in inv_map]
    if missing:
        raise AxiomViolation("inverse-total", (missing[0],))
    inv = tuple(idx(inv_map[lab]) for lab in labels)
    comp = {(idx(a), idx(b)): idx(c) for (a, b), c in compose.items()}
    unit_ids = frozenset(idx(u) for u in units)
    violation, rmap, smap = _first_violation(labels, inv, comp, unit_ids)
    if violation is not None:
        raise violation
    return FiniteGroupoid(labels, inv, comp, unit_ids, rmap, smap)


def groupoid_from_ids(labels, inv, comp, units) -> FiniteGroupoid:
    """Validate tables that are already keyed by integer ids."""
    violation, rmap, smap = _first_violation(tuple(labels), tuple(inv), comp, frozenset(units))
    if violation is not None:
        raise violation
    return FiniteGroupoid(tuple(labels), tuple(inv), comp, frozenset(units), rmap, smap)


# ---------------------------------------------------------------------------
# builders


def cyclic_group(m: int, identity: str = "e", generator: str = "g") -> tuple[list[str], Callable]:
    """Labels and multiplication of the cyclic group of order ``m``."""
    if m < 1:
        raise ValueError("order must be positive")

    def name(k):
        if k == 0:
            return identity
        return generator if k == 1 else f"{generator}^{k}"

    labels = [name(k) for k in range(m)]
    pos = {lab: k for k, lab in enumerate(labels)}
    return labels, lambda a, b: labels[(pos[a] + pos[b]) % m]


def product_group(*factors: tuple[list[str], Callable]) -> tuple[list[str], Callable]:
    labels_list = [f[0] for f in factors]
    combos = list(itertools.product(*labels_list))
    names = ["(" + ",".join(c) + ")" for c in combos]
    pos = {n: c for n, c in zip(names, combos)}
    back = {c: n for n, c in zip(names, combos)}

    def mul(a, b):
        ca, cb = pos[a], pos[b]
        return back[tuple(f[1](x, y) for f, x, y in zip(factors, ca, cb))]

    return names, mul


def group_table(labels: Sequence[str], mul: Callable) -> tuple[str, dict[str, str]]:
    """Identity and inverse table of a finite group; checks the group axioms."""
    labels = [str(x) for x in labels]
    identity = [e for e in labels if all(mul(e, x) == x and mul(x, e) == x for x in labels)]
    if len(identity) != 1:
        raise AxiomViolation("group-identity", ())
    e = identity[0]
    inverse = {}
    for x in labels:
        cands = [y for y in labels if mul(x, y) == e]
        if len(cands) != 1:
            raise AxiomViolation("group-inverse", (x,))
        inverse[x] = cands[0]
    return e, inverse


def group_groupoid(labels: Sequence[str], mul: Callable) -> FiniteGroupoid:
    """A group viewed as a groupoid with one unit."""
    e, inverse = group_table(labels, mul)
    comp = {(a, b): mul(a, b) for a in labels for b in labels}
    return validate_groupoid(labels, inverse, comp, [e])


def pair_groupoid(points: Sequence[Hashable]) -> FiniteGroupoid:
    """The full equivalence relation on ``points``; ``(i,j)(j,k) = (i,k)``."""
    pts = [str(p) for p in points]
    lab = {(i, j): f"({i},{j})" for i in pts for j in pts}
    elements = [lab[i, j] for i in pts for j in pts]
    inverse = {lab[i, j]: lab[j, i] for i in pts for j in pts}
    comp = {(lab[i, j], lab[j, k]): lab[i, k] for i in pts for j in pts for k in pts}
    return validate_groupoid(elements, inverse, comp, [lab[i, i] for i in pts])


def group_bundle(points: Sequence[Hashable], labels: Sequence[str], mul: Callable) -> FiniteGroupoid:
    """Trivial group bundle; the identity over ``x`` is labelled ``x`` and ``h`` over ``x`` is ``h_x``."""
    pts = [str(p) for p in points]
    e, inverse = group_table(labels, mul)

    def name(h, x):
        return x if h == e else f"{h}_{x}"

    elements = [name(e, x) for x in pts] + [name(h, x) for x in pts for h in labels if h != e]
    inv = {name(h, x): name(inverse[h], x) for x in pts for h in labels}
    comp = {(name(a, x), name(b, x)): name(mul(a, b), x) for x in pts for a in labels for b in labels}
    return validate_groupoid(elements, inv, comp, pts)


def transformation_groupoid(
    points: Sequence[Hashable],
    labels: Sequence[str],
    mul: Callable,
    act: Callable[[str, str], str],
) -> FiniteGroupoid:
    """Transformation groupoid of a left action: elements ``(h,x)`` with
    ``r(h,x) = h.x``, ``s(h,x) = x`` and ``(k, h.x)(h, x) = (kh, x)``."""
    pts = [str(p) for p in points]
    e, inverse = group_table(labels, mul)
    for x in pts:
        if act(e, x) != x:
            raise AxiomViolation("action-identity", (x,))
        for h in labels:
            for k in labels:
                if act(k, act(h, x)) != act(mul(k, h), x):
                    raise AxiomViolation("action-compatibility", (k, h, x))

    def name(h, x):
        return f"({h},{x})"

    elements = [name(e, x) for x in pts] + [name(h, x) for h in labels if h != e for x in pts]
    inv = {name(h, x): name(inverse[h], act(h, x)) for h in labels for x in pts}
    comp = {
        (name(k, act(h, x)), name(h, x)): name(mul(k, h), x)
        for h in labels
        for k in labels
        for x in pts
    }
    return validate_groupoid(elements, inv, comp, [name(e, x) for x in pts])


def disjoint_union(*parts: FiniteGroupoid, prefixes: Sequence[str] | None = None) -> FiniteGroupoid:
    if prefixes is None:
        prefixes = [f"{k}:" for k in range(len(parts))] if len(parts) > 1 else [""]
    labels, inv, comp, units = [], [], {}, set()
    offset = 0
    for pre, G in zip(prefixes, parts):
        labels += [pre + lab for lab in G.labels]
        inv += [offset + v for v in G.inv]
        comp.update({(offset + a, offset + b): offset + c for (a, b), c in G.comp.items()})
        units |= {offset + x for x in G.units}
        offset += len(G)
    return groupoid_from_ids(labels, inv, comp, units)


def relabel(G: FiniteGroupoid, perm: Sequence[int]) -> FiniteGroupoid:
    """Isomorphic copy in which old id ``k`` becomes new id ``perm[k]``."""
    n = len(G)
    labels = [""] * n
    inv = [0] * n
    for k in range(n):
        labels[perm[k]] = G.labels[k]
        inv[perm[k]] = perm[G.inv[k]]
    comp = {(perm[a], perm[b]): perm[c] for (a, b), c in G.comp.items()}
    return groupoid_from_ids(labels, inv, comp, {perm[x] for x in G.units})


# named fixtures used throughout tests, docs and the CLI


def z2grp() -> FiniteGroupoid:
    """The group Z/2 = {u, g} as a one-unit groupoid."""
    return group_groupoid(*cyclic_group(2, identity="u", generator="g"))


def full2() -> FiniteGroupoid:
    """Pair groupoid on {1, 2}."""
    return pair_groupoid([1, 2])


def bundle() -> FiniteGroupoid:
    """Z/2-bundle over {a, b}: elements a, b, g_a, g_b."""
    return group_bundle(["a", "b"], *cyclic_group(2, identity="u", generator="g"))


def small_groupoids(max_size: int = 4) -> list[tuple[str, FiniteGroupoid]]:
    """Every groupoid with at most ``max_size`` elements, up to isomorphism.

    A finite groupoid is a disjoint union of connected ones, and a connected
    groupoid on ``k`` objects with isotropy group ``H`` has ``k**2 * |H|``
    elements.  Components are therefore drawn from groups of order <= 4 and the
    pair groupoid on two points; the groups of order <= 4 are the cyclic ones
    and the Klein four-group.
    """
    if max_size > 4:
        raise ValueError("component catalogue only covers sizes <= 4")
    components: list[tuple[str, FiniteGroupoid]] = [
        ("Z1", group_groupoid(*cyclic_group(1))),
        ("Z2", group_groupoid(*cyclic_group(2))),
        ("Z3", group_groupoid(*cyclic_group(3))),
        ("Z4", group_groupoid(*cyclic_group(4))),
        ("V4", group_groupoid(*product_group(cyclic_group(2, "0", "1"), cyclic_group(2, "0", "1")))),
        ("PAIR2", pair_groupoid([1, 2])),
    ]
    out: list[tuple[str, FiniteGroupoid]] = []

    # multisets of components, listed as non-decreasing index sequences
    def extend(start, chosen, size):
        if chosen:
            parts = [components[k][1] for k in chosen]
            name = "+".join(components[k][0] for k in chosen)
            out.append((name, parts[0] if len(parts) == 1 else disjoint_union(*parts)))
        for k in range(start, len(components)):
            s = len(components[k][1])
            if size + s <= max_size:
                extend(k, chosen + [k], size + s)

    extend(0, [], 0)
    out.sort(key=lambda item: (len(item[1]), item[0]))
    return out


# ---------------------------------------------------------------------------
# isotropy, bisections, subgroupoids


def isotropy(G: FiniteGroupoid) -> frozenset[int]:
    return frozenset(g for g in G.elements if G.rmap[g] == G.smap[g])


def isotropy_interior(G: FiniteGroupoid) -> frozenset[int]:
    """Interior of the isotropy.

    The groupoid is discrete, so every subset is open and the interior is the
    isotropy itself.
    """
    return isotropy(G)


def is_effective(G: FiniteGroupoid) -> bool:
    return isotropy_interior(G) == G.units


def is_bisection(G: FiniteGroupoid, members: Iterable[int]) -> bool:
    members = list(members)
    return len({G.rmap[g] for g in members}) == len(members) == len({G.smap[g] for g in members})


@dataclass(frozen=True)
class Bisection:
    parent: FiniteGroupoid = field(repr=False)
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not is_bisection(self.parent, self.members):
            raise NotABisection(f"{sorted(self.parent.lab(self.members))} is not a bisection")

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)


def compose_bisections(B1: Bisection, B2: Bisection) -> Bisection:
    if B1.parent is not B2.parent and B1.parent != B2.parent:
        raise ValueError("bisections live in different groupoids")
    G = B1.parent
    members = {G.comp[(a, b)] for a in B1.members for b in B2.members if (a, b) in G.comp}
    return Bisection(G, frozenset(members))


def invert_bisection(B: Bisection) -> Bisection:
    return Bisection(B.parent, frozenset(B.parent.inv[g] for g in B.members))


def subgroupoid_violation(G: FiniteGroupoid, H: Iterable[int]) -> tuple | None:
    Hs = set(H)
    for a in sorted(Hs):
        if G.inv[a] not in Hs:
            return ("inverse", G.labels[a])
        for b in G.range_fibres[G.smap[a]]:
            if b in Hs and G.comp[(a, b)] not in Hs:
                return ("composition", G.labels[a], G.labels[b])
    return None


def restrict(G: FiniteGroupoid, H: Iterable[int]) -> FiniteGroupoid:
    """The subgroupoid on ``H``; local ids follow the order of the parent ids.

    ``embedding[k]`` is the parent id of local element ``k``.
    """
    Hs = sorted(set(H))
    bad = subgroupoid_violation(G, Hs)
    if bad is not None:
        raise NotASubgroupoid(bad)
    local = {g: k for k, g in enumerate(Hs)}
    comp = {
        (local[a], local[b]): local[c]
        for (a, b), c in G.comp.items()
        if a in local and b in local
    }
    return FiniteGroupoid(
        labels=tuple(G.labels[g] for g in Hs),
        inv=tuple(local[G.inv[g]] for g in Hs),
        comp=comp,
        units=frozenset(local[g] for g in Hs if g in G.units),
        rmap=tuple(local[G.rmap[g]] for g in Hs),
        smap=tuple(local[G.smap[g]] for g in Hs),
        embedding=tuple(Hs),
        parent=G,
    )
