"""Normalized 2-cocycles and discrete twists over finite groupoids.

A discrete twist is a sequence ``G0 x R^x --i--> Sigma --q--> G``.  Twists are
either built from a cocycle (the extension model ``Sigma = G x R^x``) or given
by explicit tables, in which case :func:`validate_twist` checks the axioms.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .coeffring import CoeffRing, RingElem
from .errors import (
    CocycleDomainError,
    CocycleIdentityFail,
    CocycleNotAUnit,
    NoSection,
    NormalizationFail,
    NotAUnit,
)
from .groupoid import (
    FiniteGroupoid,
    groupoid_from_ids,
    groupoid_violation,
    isotropy_interior,
    restrict,
)


@dataclass(frozen=True)
class Cocycle2:
    base: FiniteGroupoid = field(repr=False)
    ring: CoeffRing
    table: Mapping[tuple[int, int], int] = field(repr=False)

    def __call__(self, a: int, b: int) -> int:
        return self.table[(a, b)]

    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.table.values())

    @cached_property
    def extension(self) -> DiscreteTwist:
        """The extension-model twist built from this cocycle (cached)."""
        return twist_from_cocycle(self)

    def nontrivial_entries(self) -> list[tuple[str, str, int]]:
        G = self.base
        return [(G.labels[a], G.labels[b], v) for (a, b), v in sorted(self.table.items()) if v != 1]


def _cocycle_failure(G: FiniteGroupoid, ring: CoeffRing, table: Mapping[tuple[int, int], int]):
    if set(table) != set(G.comp):
        extra = sorted(set(table) ^ set(G.comp))[0]
        return CocycleDomainError(G.lab(extra))
    for (a, b), v in sorted(table.items()):
        if not ring.is_unit_value(v):
            return CocycleNotAUnit(G.lab((a, b)) + (v,))
    for g in G.elements:
        if table[(G.rmap[g], g)] % ring.modulus != 1:
            return NormalizationFail(G.lab((G.rmap[g], g)))
        if table[(g, G.smap[g])] % ring.modulus != 1:
            return NormalizationFail(G.lab((g, G.smap[g])))
    n = ring.modulus
    for a, b, c in G.composable_triples:
        ab, bc = G.comp[(a, b)], G.comp[(b, c)]
        if (table[(a, b)] * table[(ab, c)] - table[(b, c)] * table[(a, bc)]) % n:
            return CocycleIdentityFail(G.lab((a, b, c)))
    return None


def validate_cocycle(base: FiniteGroupoid, ring: CoeffRing, table: Mapping) -> Cocycle2:
    """Check unit values, normalization and the cocycle identity exhaustively.

    ``table`` is keyed by pairs of ids or of labels and must cover exactly the
    composable pairs.
    """
    ids = {}
    for (a, b), v in table.items():
        if not isinstance(a, int):
            a = base.id_of(a)
        if not isinstance(b, int):
            b = base.id_of(b)
        ids[(a, b)] = int(v) % ring.modulus
    failure = _cocycle_failure(base, ring, ids)
    if failure is not None:
        raise failure
    return Cocycle2(base, ring, ids)


def cocycle_from_entries(base: FiniteGroupoid, ring: CoeffRing, entries: Mapping = ()) -> Cocycle2:
    """Cocycle equal to 1 except on the listed (label or id) pairs."""
    table = {pair: 1 for pair in base.comp}
    for (a, b), v in dict(entries).items():
        a = a if isinstance(a, int) else base.id_of(a)
        b = b if isinstance(b, int) else base.id_of(b)
        if (a, b) not in base.comp:
            raise CocycleDomainError(base.lab((a, b)))
        table[(a, b)] = v
    return validate_cocycle(base, ring, table)


def trivial_cocycle(base: FiniteGroupoid, ring: CoeffRing) -> Cocycle2:
    return Cocycle2(base, ring, {pair: 1 for pair in base.comp})


def coboundary(base: FiniteGroupoid, ring: CoeffRing, b: Mapping[int, int]) -> Cocycle2:
    """``(db)(a, c) = b(a) b(c) b(ac)^-1`` for a unit-valued ``b`` equal to 1 on units."""
    n = ring.modulus
    val = {g: (1 if g in base.units else b.get(g, 1) % n) for g in base.elements}
    table = {(x, y): val[x] * val[y] * ring.inv(val[z]) % n for (x, y), z in base.comp.items()}
    return validate_cocycle(base, ring, table)


def random_cocycle(base: FiniteGroupoid, ring: CoeffRing, rng: random.Random) -> Cocycle2:
    """A normalized cocycle found by randomized backtracking.

    Values are assigned pair by pair in a random unit order; each cocycle-identity
    constraint is checked as soon as its four pairs are assigned.  The result is
    not uniformly distributed over all cocycles.
    """
    n = ring.modulus
    units = list(ring.units)
    table = {}
    free = []
    for (a, b) in sorted(base.comp):
        if a in base.units or b in base.units:
            table[(a, b)] = 1
        else:
            free.append((a, b))
    position = {pair: k for k, pair in enumerate(free)}
    # constraints indexed by the free pair that completes them
    checks: dict[int, list[tuple]] = {k: [] for k in range(len(free))}
    for a, b, c in base.composable_triples:
        ab, bc = base.comp[(a, b)], base.comp[(b, c)]
        quad = ((a, b), (ab, c), (b, c), (a, bc))
        last = max((position[p] for p in quad if p in position), default=None)
        if last is not None:
            checks[last].append(quad)

    def ok(k):
        for p1, p2, p3, p4 in checks[k]:
            if (table[p1] * table[p2] - table[p3] * table[p4]) % n:
                return False
        return True

    def assign(k):
        if k == len(free):
            return True
        order = units[:]
        rng.shuffle(order)
        for v in order:
            table[free[k]] = v
            if ok(k) and assign(k + 1):
                return True
        del table[free[k]]
        return False

    if not assign(0):  # pragma: no cover - the trivial cocycle always exists
        raise RuntimeError("no cocycle found")
    return validate_cocycle(base, ring, table)


# ---------------------------------------------------------------------------
# twists


@dataclass(frozen=True)
class DiscreteTwist:
    """``G0 x R^x --imap--> total --qmap--> base``.

    ``imap`` is keyed by ``(unit id of base, unit residue)``.  ``cocycle`` is set
    for extension-model twists.  Restricted twists remember their ``parent`` and
    the parent ids of their total space in ``total_embedding``.
    """

    base: FiniteGroupoid = field(repr=False)
    total: FiniteGroupoid = field(repr=False)
    ring: CoeffRing
    imap: Mapping[tuple[int, int], int] = field(repr=False)
    qmap: tuple[int, ...] = field(repr=False)
    cocycle: Cocycle2 | None = field(default=None, repr=False)
    total_embedding: tuple[int, ...] | None = field(default=None, repr=False)
    parent: DiscreteTwist | None = field(default=None, compare=False, repr=False)

    def __repr__(self) -> str:
        return f"DiscreteTwist(|G|={len(self.base)}, |Sigma|={len(self.total)}, {self.ring!r})"

    def base_unit_of_range(self, e: int) -> int:
        return self.qmap[self.total.rmap[e]]

    def base_unit_of_source(self, e: int) -> int:
        return self.qmap[self.total.smap[e]]

    @cached_property
    def fibres(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {g: [] for g in self.base.elements}
        for e, g in enumerate(self.qmap):
            out[g].append(e)
        return {g: tuple(v) for g, v in out.items()}

    @cached_property
    def central_image(self) -> frozenset[int]:
        """``i(G0 x R^x)``."""
        return frozenset(self.imap.values())

    def preimage(self, H: Iterable[int]) -> frozenset[int]:
        Hs = set(H)
        return frozenset(e for e, g in enumerate(self.qmap) if g in Hs)

    def label(self, e: int) -> str:
        return self.total.labels[e]

    @cached_property
    def section(self) -> Section:
        """The canonical section, shared by every element built on this twist."""
        return canonical_section(self)


def twist_from_cocycle(sigma: Cocycle2) -> DiscreteTwist:
    """Extension model: elements ``(a, t)``, ``(a, s)(b, t) = (ab, s t sigma(a, b))``."""
    G, ring = sigma.base, sigma.ring
    n = ring.modulus
    U = ring.units
    k = len(U)
    uidx = ring.unit_index

    def eid(a, t):
        return a * k + uidx[t]

    labels = [f"({G.labels[a]},{t})" for a in G.elements for t in U]
    inv = [0] * (len(G) * k)
    for a in G.elements:
        ainv = G.inv[a]
        c = ring.inv(sigma(a, ainv))
        for s in U:
            inv[eid(a, s)] = eid(ainv, ring.inv(s) * c % n)
    comp = {}
    for (a, b), ab in G.comp.items():
        w = sigma(a, b)
        for s in U:
            for t in U:
                comp[(eid(a, s), eid(b, t))] = eid(ab, s * t * w % n)
    total = groupoid_from_ids(labels, inv, comp, [eid(x, 1) for x in G.units])
    imap = {(x, t): eid(x, t) for x in G.units for t in U}
    qmap = tuple(a for a in G.elements for _ in U)
    return DiscreteTwist(G, total, ring, imap, qmap, cocycle=sigma)


def trivial_twist(G: FiniteGroupoid, ring: CoeffRing) -> DiscreteTwist:
    return twist_from_cocycle(trivial_cocycle(G, ring))


@dataclass
class AxiomCheck:
    name: str
    ok: bool
    witness: tuple = ()
    detail: str = ""

    def line(self) -> str:
        if self.ok:
            return f"{self.name} ok"
        return f"{self.name} FAIL {self.detail} {self.witness}".rstrip()


@dataclass
class TwistReport:
    checks: list[AxiomCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def first_failure(self) -> AxiomCheck | None:
        return next((c for c in self.checks if not c.ok), None)

    def summary(self) -> str:
        return ", ".join(c.line() for c in self.checks)


def _search_section(tw: DiscreteTwist) -> tuple[int, ...] | None:
    table = []
    for a in tw.base.elements:
        if a in tw.base.units:
            e = tw.imap.get((a, 1))
            if e is None or tw.qmap[e] != a:
                return None
        else:
            fibre = tw.fibres.get(a, ())
            if not fibre:
                return None
            e = fibre[0]
        table.append(e)
    return tuple(table)


def validate_twist(tw: DiscreteTwist) -> TwistReport:
    """Exhaustive check of the groupoid tables, the homomorphism conditions and DT1-DT3.

    Failures are reported with witnesses, never raised.
    """
    G, S, ring = tw.base, tw.total, tw.ring
    n = ring.modulus
    U = ring.units
    checks: list[AxiomCheck] = []

    bad = groupoid_violation(G) or groupoid_violation(S)
    checks.append(AxiomCheck("GROUPOID", bad is None, bad.witness if bad else (), bad.kind if bad else ""))
    if bad is not None:
        # composition tables are unreliable; the remaining checks are skipped
        for name in ("HOM", "DT1", "DT2", "DT3"):
            checks.append(AxiomCheck(name, False, (), "skipped: groupoid tables invalid"))
        return TwistReport(checks)

    def hom() -> AxiomCheck:
        if len(tw.qmap) != len(S) or any(not 0 <= g < len(G) for g in tw.qmap):
            return AxiomCheck("HOM", False, (), "qmap not total")
        for (a, b), ab in sorted(S.comp.items()):
            qa, qb = tw.qmap[a], tw.qmap[b]
            if G.comp.get((qa, qb)) != tw.qmap[ab]:
                return AxiomCheck("HOM", False, S.lab((a, b)), "q not multiplicative")
        for e in S.elements:
            if tw.qmap[S.inv[e]] != G.inv[tw.qmap[e]]:
                return AxiomCheck("HOM", False, S.lab((e,)), "q does not preserve inverses")
        if sorted(tw.qmap[x] for x in S.units) != sorted(G.units):
            return AxiomCheck("HOM", False, (), "q is not a bijection of unit spaces")
        for x in sorted(G.units):
            for t in U:
                if (x, t) not in tw.imap:
                    return AxiomCheck("HOM", False, (G.labels[x], t), "imap not total")
        if {tw.imap[(x, 1)] for x in G.units} != set(S.units):
            return AxiomCheck("HOM", False, (), "i(G0 x {1}) is not the unit space of Sigma")
        for x in sorted(G.units):
            for s in U:
                for t in U:
                    prod = S.comp.get((tw.imap[(x, s)], tw.imap[(x, t)]))
                    if prod != tw.imap[(x, s * t % n)]:
                        return AxiomCheck("HOM", False, (G.labels[x], s, t), "i not multiplicative")
        return AxiomCheck("HOM", True)

    h = hom()
    checks.append(h)
    if not h.ok:
        for name in ("DT1", "DT2", "DT3"):
            checks.append(AxiomCheck(name, False, (), "skipped: maps are not homomorphisms"))
        return TwistReport(checks)

    def dt1() -> AxiomCheck:
        if len(set(tw.imap.values())) != len(tw.imap):
            return AxiomCheck("DT1", False, (), "i not injective")
        missing = sorted(set(G.elements) - set(tw.qmap))
        if missing:
            return AxiomCheck("DT1", False, G.lab(missing[:1]), "q not surjective")
        for x in sorted(G.units):
            image = {tw.imap[(x, t)] for t in U}
            if image != set(tw.fibres[x]):
                diff = sorted(image ^ set(tw.fibres[x]))
                return AxiomCheck("DT1", False, (G.labels[x],) + S.lab(diff), "i({x} x R^x) != q^-1(x)")
        return AxiomCheck("DT1", True)

    def dt2() -> AxiomCheck:
        section = _search_section(tw)
        if section is None:
            return AxiomCheck("DT2", False, (), "no section")
        seen = {}
        for b in G.elements:
            for t in U:
                e = S.comp.get((tw.imap[(G.rmap[b], t)], section[b]))
                if e is None:
                    return AxiomCheck("DT2", False, (G.labels[b], t), "product undefined")
                if e in seen:
                    return AxiomCheck("DT2", False, (G.labels[b], t) + seen[e], "not injective")
                seen[e] = (G.labels[b], t)
        if len(seen) != len(S):
            return AxiomCheck("DT2", False, S.lab(sorted(set(S.elements) - set(seen))[:1]), "not surjective")
        return AxiomCheck("DT2", True)

    def dt3() -> AxiomCheck:
        for e in S.elements:
            r, s = tw.base_unit_of_range(e), tw.base_unit_of_source(e)
            for t in U:
                left = S.comp.get((tw.imap[(r, t)], e))
                right = S.comp.get((e, tw.imap[(s, t)]))
                if left is None or left != right:
                    return AxiomCheck("DT3", False, (S.labels[e], t), "i(r,t) e != e i(s,t)")
        return AxiomCheck("DT3", True)

    checks += [dt1(), dt2(), dt3()]
    return TwistReport(checks)


def rx_act(tw: DiscreteTwist, t: int | RingElem, e: int) -> int:
    """``t . e = i(r(e), t) e``."""
    t = int(t) % tw.ring.modulus
    if not tw.ring.is_unit_value(t):
        raise NotAUnit(f"{t} is not a unit of {tw.ring!r}")
    return tw.total.comp[(tw.imap[(tw.base_unit_of_range(e), t)], e)]


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True)
class Section:
    twist: DiscreteTwist = field(repr=False)
    table: tuple[int, ...]

    def __post_init__(self):
        tw = self.twist
        if len(self.table) != len(tw.base):
            raise NoSection("section must be defined on every element of G")
        for a, e in enumerate(self.table):
            if tw.qmap[e] != a:
                raise NoSection(f"q(S({tw.base.labels[a]})) != {tw.base.labels[a]}")
        for x in tw.base.units:
            if self.table[x] != tw.imap[(x, 1)]:
                raise NoSection(f"S({tw.base.labels[x]}) is not a unit")

    def __getitem__(self, a: int) -> int:
        return self.table[a]

    @cached_property
    def coords(self) -> dict[int, tuple[int, int]]:
        """``e -> (a, t)`` with ``e = t . S(a)``."""
        out = {}
        for a, e in enumerate(self.table):
            for t in self.twist.ring.units:
                out[rx_act(self.twist, t, e)] = (a, t)
        if len(out) != len(self.twist.total):
            raise NoSection("fibre coordinates do not cover Sigma; twist is invalid")
        return out

    @cached_property
    def cocycle(self) -> Cocycle2:
        """The cocycle of this section, ``S(a)S(b) = i(r(a), c(a, b)) S(ab)``."""
        return cocycle_from_section(self.twist, self)


def canonical_section(tw: DiscreteTwist) -> Section:
    """``S(x) = i(x, 1)`` on units and the least id of each other fibre.

    For extension-model twists this is ``S(a) = (a, 1)``.
    """
    table = _search_section(tw)
    if table is None:
        raise NoSection("q is not surjective or i(x, 1) is not over x")
    return Section(tw, table)


def section_from_table(tw: DiscreteTwist, table: Mapping[int, int] | Iterable[int]) -> Section:
    if isinstance(table, Mapping):
        table = [table[a] for a in tw.base.elements]
    return Section(tw, tuple(table))


def cocycle_from_section(tw: DiscreteTwist, S: Section) -> Cocycle2:
    """``S(a)S(b) = i(r(a), sigma(a, b)) S(ab)``."""
    table = {}
    for (a, b), ab in tw.base.comp.items():
        prod = tw.total.comp[(S[a], S[b])]
        c, t = S.coords[prod]
        assert c == ab
        table[(a, b)] = t
    return validate_cocycle(tw.base, tw.ring, table)


def fibre_isomorphism(model: DiscreteTwist, tw: DiscreteTwist, S: Section) -> dict[int, int]:
    """The map ``(a, t) -> t . S(a)`` from an extension model onto ``tw``.

    Raises ``ValueError`` unless it is a bijective groupoid isomorphism that
    commutes with ``i`` and ``q``.
    """
    ring = tw.ring
    if model.cocycle is None:
        raise ValueError("model must be an extension-model twist")
    k = len(ring.units)
    phi = {}
    for a in model.base.elements:
        for j, t in enumerate(ring.units):
            phi[a * k + j] = rx_act(tw, t, S[a])
    if sorted(phi.values()) != list(tw.total.elements):
        raise ValueError("not a bijection")
    for (x, y), z in model.total.comp.items():
        if tw.total.comp.get((phi[x], phi[y])) != phi[z]:
            raise ValueError(f"not multiplicative at {model.total.lab((x, y))}")
    for e in model.total.elements:
        if tw.qmap[phi[e]] != model.qmap[e]:
            raise ValueError("does not commute with q")
    for key, e in model.imap.items():
        if tw.imap[key] != phi[e]:
            raise ValueError("does not commute with i")
    return phi


def restrict_twist(tw: DiscreteTwist, H: Iterable[int]) -> DiscreteTwist:
    """Twist over the subgroupoid ``H`` with total space ``q^-1(H)``."""
    GH = restrict(tw.base, H)
    local_base = {g: k for k, g in enumerate(GH.embedding)}
    pre = sorted(tw.preimage(GH.embedding))
    SH = restrict(tw.total, pre)
    local_total = {e: k for k, e in enumerate(pre)}
    imap = {
        (local_base[x], t): local_total[e]
        for (x, t), e in tw.imap.items()
        if x in local_base
    }
    qmap = tuple(local_base[tw.qmap[e]] for e in pre)
    cocycle = None
    if tw.cocycle is not None:
        cocycle = Cocycle2(
            GH,
            tw.ring,
            {(local_base[a], local_base[b]): v for (a, b), v in tw.cocycle.table.items() if a in local_base and b in local_base},
        )
    return DiscreteTwist(GH, SH, tw.ring, imap, qmap, cocycle, tuple(pre), tw)


def isotropy_interior_twist(tw: DiscreteTwist) -> DiscreteTwist:
    """The twist ``G0 x R^x -> Iso(Sigma)° -> Iso(G)°``."""
    iso_G = isotropy_interior(tw.base)
    iso_S = isotropy_interior(tw.total)
    if tw.preimage(iso_G) != iso_S:
        raise AssertionError("q^-1(Iso(G)°) != Iso(Sigma)°")
    if frozenset(tw.qmap[e] for e in iso_S) != iso_G:
        raise AssertionError("q(Iso(Sigma)°) != Iso(G)°")
    return restrict_twist(tw, iso_G)
