"""Elements of twisted Steinberg algebras over finite groupoids.

An element is stored by its values on a section ``S`` of ``q``: ``coeffs[a] =
f(S(a))``.  The full function on ``Sigma`` is recovered from contravariance,
``f(t . S(a)) = t^-1 coeffs[a]``, so every stored element is contravariant by
construction.  Untwisted elements are elements over :func:`trivial_twist`.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

from .coeffring import RingElem
from .errors import BaseMismatch, FibreCollision, NotABisection, NotASubgroupoid, TwistMismatch
from .groupoid import is_bisection
from .twist import Cocycle2, DiscreteTwist, Section


def _same(a, b) -> bool:
    return a is b or a == b


@dataclass(frozen=True, eq=False)
class AlgElem:
    section: Section = field(repr=False)
    coeffs: Mapping[int, int]

    def __post_init__(self):
        n = self.section.twist.ring.modulus
        clean = {a: v % n for a, v in self.coeffs.items() if v % n}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def twist(self) -> DiscreteTwist:
        return self.section.twist

    @property
    def ring(self):
        return self.section.twist.ring

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        return f"AlgElem({format_elem(self)})"

    def coeff(self, a: int) -> RingElem:
        return self.ring(self.coeffs.get(a, 0))

    def value(self, e: int) -> int:
        """Value of the function at ``e`` in ``Sigma``."""
        a, t = self.section.coords[e]
        return self.ring.inv(t) * self.coeffs.get(a, 0) % self.ring.modulus

    def function(self) -> tuple[int, ...]:
        return tuple(self.value(e) for e in self.twist.total.elements)

    def with_section(self, S: Section) -> AlgElem:
        if S is self.section:
            return self
        if not _same(S.twist, self.twist):
            raise TwistMismatch("section belongs to a different twist")
        return AlgElem(S, {a: self.value(S[a]) for a in self.twist.base.elements})

    def vector(self) -> tuple[int, ...]:
        return tuple(self.coeffs.get(a, 0) for a in self.twist.base.elements)

    def _check(self, other: AlgElem) -> AlgElem:
        if not isinstance(other, AlgElem):
            raise TypeError(f"expected AlgElem, got {type(other).__name__}")
        if not _same(self.twist, other.twist):
            raise TwistMismatch("elements live over different twists")
        return other.with_section(self.section)

    def __add__(self, other: AlgElem) -> AlgElem:
        other = self._check(other)
        out = dict(self.coeffs)
        for a, v in other.coeffs.items():
            out[a] = out.get(a, 0) + v
        return AlgElem(self.section, out)

    def __neg__(self) -> AlgElem:
        return AlgElem(self.section, {a: -v for a, v in self.coeffs.items()})

    def __sub__(self, other: AlgElem) -> AlgElem:
        return self + (-other)

    def scale(self, r: int | RingElem) -> AlgElem:
        r = int(r)
        return AlgElem(self.section, {a: r * v for a, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            return convolve(self, other)
        if isinstance(other, (int, RingElem)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, RingElem)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgElem):
            return NotImplemented
        if not _same(self.twist, other.twist):
            return False
        return self.coeffs == other.with_section(self.section).coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))


def format_elem(f: AlgElem) -> str:
    """``2*1_(1,1) + 1*1_(1,2)``: coefficients at ``S(a)``, labels of ``G``."""
    if not f.coeffs:
        return "0"
    labels = f.twist.base.labels
    return " + ".join(f"{v}*1_{labels[a]}" for a, v in f.coeffs.items())


def element(S: Section | DiscreteTwist, coeffs: Mapping) -> AlgElem:
    """Element with the given values at ``S(a)``; keys are ids or labels of ``G``."""
    if isinstance(S, DiscreteTwist):
        S = S.section
    base = S.twist.base
    out = {}
    for a, v in coeffs.items():
        a = a if isinstance(a, int) else base.id_of(a)
        out[a] = out.get(a, 0) + int(v)
    return AlgElem(S, out)


def from_vector(S: Section, vec: Iterable[int]) -> AlgElem:
    return AlgElem(S, dict(enumerate(vec)))


def zero(S: Section | DiscreteTwist) -> AlgElem:
    return element(S, {})


def identity(S: Section | DiscreteTwist) -> AlgElem:
    """``~1`` of the unit space, the multiplicative identity."""
    S = S if isinstance(S, Section) else S.section
    return AlgElem(S, {x: 1 for x in S.twist.base.units})


def indicator(S: Section | DiscreteTwist, B: Iterable) -> AlgElem:
    """``~1_{S(B)}`` for a bisection ``B`` of ``G`` (ids or labels)."""
    S = S if isinstance(S, Section) else S.section
    base = S.twist.base
    ids = [b if isinstance(b, int) else base.id_of(b) for b in B]
    if not is_bisection(base, ids):
        raise NotABisection(f"{base.lab(ids)} is not a bisection of G")
    return AlgElem(S, {b: 1 for b in ids})


def indicator_tilde(S: Section | DiscreteTwist, X: Iterable[int]) -> AlgElem:
    """``~1_X`` for a bisection ``X`` of ``Sigma``: value ``t^-1`` on ``tX``."""
    S = S if isinstance(S, Section) else S.section
    tw = S.twist
    X = list(X)
    image = [tw.qmap[x] for x in X]
    # checked first: a fibre collision is never a bisection, and this is the sharper report
    if len(set(image)) != len(X):
        raise FibreCollision(f"{tw.total.lab(X)} meets a fibre of q twice")
    if not is_bisection(tw.total, X):
        raise NotABisection(f"{tw.total.lab(X)} is not a bisection of Sigma")
    if not is_bisection(tw.base, image):
        raise NotABisection(f"q-image {tw.base.lab(image)} is not a bisection of G")
    coeffs = {}
    for x in X:
        a, t = S.coords[x]
        # S(a) = t^-1 . x, where ~1_X takes the value t
        coeffs[a] = t
    return AlgElem(S, coeffs)


def convolve(f: AlgElem, g: AlgElem) -> AlgElem:
    """``(f*g)(e) = sum over a in G^{r(e)} cap supp_G(f) of f(S(a)) g(S(a)^-1 e)``."""
    g = f._check(g)
    S = f.section
    tw = S.twist
    G, Sig = tw.base, tw.total
    n = tw.ring.modulus
    inv = {t: tw.ring.inv(t) for t in tw.ring.units}
    coords = S.coords
    out: dict[int, int] = {}
    for a, fa in f.coeffs.items():
        sa_inv = Sig.inv[S[a]]
        for c in G.range_fibres[G.rmap[a]]:
            b, t = coords[Sig.comp[(sa_inv, S[c])]]
            gb = g.coeffs.get(b)
            if gb:
                out[c] = (out.get(c, 0) + fa * inv[t] * gb) % n
    return AlgElem(S, out)


def _untwisted(f: AlgElem, sigma: Cocycle2) -> None:
    if f.twist.cocycle is None or not f.twist.cocycle.is_trivial():
        raise BaseMismatch("expected an element of the untwisted algebra")
    if not _same(f.twist.base, sigma.base) or f.ring != sigma.ring:
        raise BaseMismatch("cocycle lives on a different groupoid or ring")


def convolve_sigma(f: AlgElem, g: AlgElem, sigma: Cocycle2) -> AlgElem:
    """``(f *_sigma g)(c) = sum over eta with r(eta) = s(c) of
    sigma(c eta, eta^-1) f(c eta) g(eta^-1)``, on untwisted elements."""
    _untwisted(f, sigma)
    _untwisted(g, sigma)
    G = sigma.base
    n = sigma.ring.modulus
    out = {}
    for c in G.elements:
        total = 0
        for eta in G.range_fibres[G.smap[c]]:
            ce, eta_inv = G.comp[(c, eta)], G.inv[eta]
            fv, gv = f.coeffs.get(ce), g.coeffs.get(eta_inv)
            if fv and gv:
                total += sigma(ce, eta_inv) * fv * gv
        out[c] = total % n
    return AlgElem(f.section, out)


def cocycle_iso(f: AlgElem, sigma: Cocycle2) -> AlgElem:
    """``f -> f~`` with ``f~(a, t) = t^-1 f(a)`` in the extension model of ``sigma``."""
    _untwisted(f, sigma)
    return AlgElem(sigma.extension.section, dict(f.coeffs))


def cocycle_iso_inverse(h: AlgElem, sigma: Cocycle2, untwisted: Section | DiscreteTwist) -> AlgElem:
    """Inverse of :func:`cocycle_iso`, landing over the trivial twist ``untwisted``."""
    S = untwisted if isinstance(untwisted, Section) else untwisted.section
    if not _same(h.twist, sigma.extension):
        raise BaseMismatch("element is not over the extension model of this cocycle")
    result = AlgElem(S, dict(h.with_section(sigma.extension.section).coeffs))
    _untwisted(result, sigma)
    return result


def support_G(f: AlgElem) -> frozenset[int]:
    """``q(supp(f))``."""
    return frozenset(f.coeffs)


@dataclass(frozen=True)
class GenDecomposition:
    section: Section = field(repr=False)
    terms: tuple[tuple[int, frozenset[int]], ...]

    @cached_property
    def images(self) -> tuple[frozenset[int], ...]:
        q = self.section.twist.qmap
        return tuple(frozenset(q[x] for x in X) for _, X in self.terms)

    def reconstruct(self) -> AlgElem:
        total = zero(self.section)
        for r, X in self.terms:
            total = total + indicator_tilde(self.section, X).scale(r)
        return total


def disjoint_decomposition(f: AlgElem) -> GenDecomposition:
    """Write ``f`` as ``sum r_D ~1_D`` over bisections with disjoint images in ``G``.

    Level sets of the coefficients are split greedily into bisections (in id
    order).  Terms are ordered by coefficient residue, then by least member.
    """
    S = f.section
    G = S.twist.base
    levels: dict[int, list[int]] = {}
    for a, v in f.coeffs.items():
        levels.setdefault(v, []).append(a)
    terms = []
    for v in sorted(levels):
        blocks: list[tuple[list[int], set, set]] = []
        for a in levels[v]:
            for members, rs, ss in blocks:
                if G.rmap[a] not in rs and G.smap[a] not in ss:
                    members.append(a)
                    rs.add(G.rmap[a])
                    ss.add(G.smap[a])
                    break
            else:
                blocks.append(([a], {G.rmap[a]}, {G.smap[a]}))
        for members, _, _ in blocks:
            terms.append((v, frozenset(S[a] for a in members), min(members)))
    terms.sort(key=lambda t: (t[0], t[2]))
    return GenDecomposition(S, tuple((v, X) for v, X, _ in terms))


def include(f: AlgElem, target: Section | None = None) -> AlgElem:
    """Extension by zero from a restricted twist into its parent."""
    sub = f.twist
    if sub.parent is None or sub.total_embedding is None:
        raise NotASubgroupoid("element is not over a restricted twist")
    target = target or sub.parent.section
    if not _same(target.twist, sub.parent):
        raise TwistMismatch("target section is not over the parent twist")
    n = f.ring.modulus
    coords = target.coords
    out = {}
    for a, v in f.coeffs.items():
        pe = sub.total_embedding[f.section[a]]
        b, t = coords[pe]
        # f(pe) = v and pe = t . S(b), so f(S(b)) = t v
        out[b] = t * v % n
    return AlgElem(target, out)


def restrict_element(f: AlgElem, sub: DiscreteTwist) -> AlgElem:
    """Inverse of :func:`include` for elements supported in the subgroupoid."""
    if sub.parent is None or not _same(sub.parent, f.twist):
        raise TwistMismatch("sub is not a restriction of the element's twist")
    emb = set(sub.base.embedding)
    outside = sorted(set(f.coeffs) - emb)
    if outside:
        raise NotASubgroupoid(f.twist.base.lab(outside[:1]))
    S = sub.section
    return AlgElem(S, {a: f.value(sub.total_embedding[S[a]]) for a in sub.base.elements})
