"""Kernel witnesses and injectivity checks for quotients of twisted Steinberg algebras.

A homomorphism out of the algebra is modelled by its kernel: a two-sided ideal,
stored as a Howell basis in the coordinates ``f -> (f(S(a)))_a``.  Injectivity
is triviality of that ideal.  The witness algorithms follow the constructive
route of the uniqueness theorems: from any nonzero kernel element they produce
a nonzero kernel element supported in the isotropy interior.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .algebra import (
    AlgElem,
    GenDecomposition,
    convolve,
    disjoint_decomposition,
    format_elem,
    from_vector,
    include,
    indicator,
    indicator_tilde,
)
from .errors import (
    NotEffective,
    NotEffectiveEpsilon,
    NotHomogeneous,
    NotHomogeneousGenerators,
    PreconditionFail,
    TooLarge,
    TwistMismatch,
    ZeroInput,
)
from .graded import Grading, epsilon_restrict, homogeneous_decompose
from .groupoid import is_bisection, is_effective, isotropy_interior
from .howell import Row, contains, howell_form, intersect_coordinates, module_size
from .twist import DiscreteTwist, Section

MAX_SUBSET_UNITS = 16
MAX_ENUMERATION = 2**20


def _as_section(algebra: Section | DiscreteTwist) -> Section:
    return algebra if isinstance(algebra, Section) else algebra.section


def _product_table(S: Section) -> dict[tuple[int, int], tuple[int, int]]:
    """``1_{S(a)} * 1_{S(b)} = c . 1_{S(ab)}`` as ``(a, b) -> (ab, c)``."""
    table = {}
    for (a, b) in S.twist.base.comp:
        prod = convolve(AlgElem(S, {a: 1}), AlgElem(S, {b: 1}))
        ((ab, c),) = prod.coeffs.items()
        table[(a, b)] = (ab, c)
    return table


@dataclass(frozen=True, eq=False)
class QuotientHom:
    """The quotient map by the ideal generated by ``generators``.

    ``basis`` is the Howell basis of the ideal; the quotient ring itself is
    never built, since ``pi(f) != 0`` exactly when ``f`` is outside the ideal.
    """

    section: Section = field(repr=False)
    generators: tuple[AlgElem, ...]
    basis: tuple[Row, ...]

    @property
    def twist(self) -> DiscreteTwist:
        return self.section.twist

    @property
    def modulus(self) -> int:
        return self.twist.ring.modulus

    @property
    def width(self) -> int:
        return len(self.twist.base)

    def contains(self, f: AlgElem) -> bool:
        if not (f.twist is self.twist or f.twist == self.twist):
            raise TwistMismatch("element is over a different twist")
        return contains(self.basis, f.with_section(self.section).vector(), self.modulus)

    @property
    def is_zero(self) -> bool:
        return not self.basis

    def size(self) -> int:
        return module_size(self.basis, self.modulus)

    def elements(self) -> list[AlgElem]:
        """The basis rows as algebra elements."""
        return [from_vector(self.section, row) for row in self.basis]

    def __repr__(self) -> str:
        return f"QuotientHom(|ideal|={self.size()}, rows={len(self.basis)}, {self.twist.ring!r})"


def ideal_closure(gens: Iterable[AlgElem], algebra: Section | DiscreteTwist | None = None) -> QuotientHom:
    """Two-sided ideal generated by ``gens``.

    Iterates ``span + left/right products with every 1_{S(a)}`` to a fixpoint,
    canonicalizing with the Howell form after each sweep.  ``algebra`` is only
    needed when ``gens`` is empty.
    """
    gens = tuple(gens)
    if algebra is not None:
        S = _as_section(algebra)
    elif gens:
        S = gens[0].section
    else:
        raise ValueError("an empty generator list needs the algebra")
    tw = S.twist
    if any(not (g.twist is tw or g.twist == tw) for g in gens):
        raise TwistMismatch("generators live over different twists")
    gens = tuple(g.with_section(S) for g in gens)
    n, width = tw.ring.modulus, len(tw.base)
    G = tw.base
    table = _product_table(S)
    by_left: dict[int, list[tuple[int, int, int]]] = {}
    by_right: dict[int, list[tuple[int, int, int]]] = {}
    for (a, b), (ab, c) in table.items():
        by_left.setdefault(a, []).append((b, ab, c))
        by_right.setdefault(b, []).append((a, ab, c))

    rows = howell_form([g.vector() for g in gens], n, width)
    while True:
        candidates = list(rows)
        for row in rows:
            for a in G.elements:
                left = [0] * width
                for b, ab, c in by_left.get(a, ()):
                    left[ab] = (left[ab] + c * row[b]) % n
                right = [0] * width
                for b, ab, c in by_right.get(a, ()):
                    right[ab] = (right[ab] + row[b] * c) % n
                candidates += [left, right]
        new = howell_form(candidates, n, width)
        if new == rows:
            break
        rows = new
    return QuotientHom(S, gens, rows)


def lemma1_assert(F: Sequence[Iterable[int]], twist: DiscreteTwist) -> bool:
    """For bisections of ``Sigma`` with disjoint images in ``G``, check that
    ``D2^-1 D1`` misses ``i(G0 x R^x)`` whenever ``D1 != D2``."""
    Sig = twist.total
    fam = [frozenset(D) for D in F]
    for D in fam:
        if not is_bisection(Sig, D):
            raise PreconditionFail(f"{Sig.lab(sorted(D))} is not a bisection of Sigma")
    images = [frozenset(twist.qmap[x] for x in D) for D in fam]
    for i, j in combinations(range(len(fam)), 2):
        if images[i] & images[j]:
            raise PreconditionFail(f"terms {i} and {j} have overlapping images in G")
    central = twist.central_image
    for i, j in combinations(range(len(fam)), 2):
        for D1, D2 in ((fam[i], fam[j]), (fam[j], fam[i])):
            for x in D2:
                xi = Sig.inv[x]
                for y in D1:
                    p = Sig.comp.get((xi, y))
                    if p is not None and p in central:
                        raise AssertionError(f"D2^-1 D1 meets i(G0 x R^x) at {Sig.labels[p]}")
    return True


def _x_set(H) -> frozenset[int]:
    interior = isotropy_interior(H)
    return frozenset(
        u for u in H.units
        if all(e in interior for e in H.range_fibres[u] if H.smap[e] == u)
    )


def compute_X_sigma(twist: DiscreteTwist) -> frozenset[int]:
    """``X_Sigma = {u : Sigma_u^u in Iso(Sigma)°}``, checked against ``q^-1(X_G)``."""
    X_sigma = _x_set(twist.total)
    X_G = _x_set(twist.base)
    expected = twist.preimage(X_G) & twist.total.units
    if X_sigma != expected:
        raise AssertionError("X_Sigma != q^-1(X_G) cap Sigma0")
    return X_sigma


def _sigma_unit(twist: DiscreteTwist, u: int | str) -> int:
    if isinstance(u, str):
        return twist.imap[(twist.base.id_of(u), 1)]
    if u not in twist.total.units:
        raise PreconditionFail(f"{twist.label(u)} is not a unit of Sigma")
    return u


def _supported_in_isotropy(f: AlgElem) -> bool:
    G = f.twist.base
    interior = isotropy_interior(G)
    return all(a in interior for a in f.coeffs)


def compress(f: AlgElem, u: int | str) -> tuple[frozenset[int], AlgElem]:
    """``K = {u}`` and ``~1_K * f * ~1_K``; ``u`` is a unit of ``Sigma`` (or a unit label of ``G``)."""
    tw = f.twist
    Sig = tw.total
    u = _sigma_unit(tw, u)
    interior = isotropy_interior(Sig)
    loops = [e for e in Sig.range_fibres[u] if Sig.smap[e] == u]
    if any(e not in interior for e in loops):
        raise PreconditionFail(f"Sigma_u^u is not inside Iso(Sigma)° at {tw.label(u)}")
    hits = [e for e in loops if f.value(e)]
    if not hits:
        raise PreconditionFail(f"f vanishes on the isotropy at {tw.label(u)}")
    gamma = hits[0]
    K = frozenset({u})
    one_K = indicator_tilde(f.section, K)
    g = one_K * f * one_K
    if not g or g.value(gamma) != f.value(gamma) or not _supported_in_isotropy(g):
        raise AssertionError("compression postcondition failed")
    return K, g


@dataclass(frozen=True, eq=False)
class WitnessReport:
    input: AlgElem
    decomposition: GenDecomposition = field(repr=False)
    d0: frozenset[int]
    f: AlgElem
    u: int
    K: frozenset[int]
    witness: AlgElem
    certificate: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.certificate.values())

    def recheck(self) -> bool:
        """Recompute every claim from the stored fields."""
        S = self.input.section
        d0_inv = [S.twist.total.inv[x] for x in self.d0]
        f = indicator_tilde(S, d0_inv) * self.input
        one_K = indicator_tilde(S, self.K)
        w = one_K * f * one_K
        return (
            f == self.f
            and w == self.witness
            and bool(w)
            and _supported_in_isotropy(w)
            and ideal_closure([self.input]).contains(w)
        )

    def lines(self) -> list[str]:
        tw = self.input.twist
        total = tw.total
        return [
            f"input:   {format_elem(self.input)}",
            f"D0:      {{{', '.join(total.labels[x] for x in sorted(self.d0))}}}",
            f"f:       {format_elem(self.f)}",
            f"u:       {total.labels[self.u]}",
            f"K:       {{{', '.join(total.labels[x] for x in sorted(self.K))}}}",
            f"witness: {format_elem(self.witness)}",
            "certificate: " + ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in self.certificate.items()),
        ]


def isotropy_witness(g: AlgElem, closure: QuotientHom | None = None) -> WitnessReport:
    """A nonzero element of the ideal generated by ``g`` supported in the isotropy interior.

    Decompose ``g`` over bisections with disjoint images, take the first term
    ``D0`` (least coefficient residue, then least member), set ``f = ~1_{D0^-1} g``,
    take the least unit ``u`` in ``supp(f)`` and compress with ``K = {u}``.
    """
    if not g:
        raise ZeroInput("isotropy_witness needs a nonzero element")
    S = g.section
    tw = S.twist
    dec = disjoint_decomposition(g)
    lemma1 = lemma1_assert([X for _, X in dec.terms], tw)
    d0 = dec.terms[0][1]
    d0_inv = [tw.total.inv[x] for x in d0]
    f = indicator_tilde(S, d0_inv) * g
    X_sigma = compute_X_sigma(tw)
    candidates = [S[x] for x in tw.base.sorted_units if f.coeffs.get(x) and S[x] in X_sigma]
    if not candidates:
        raise AssertionError("f vanishes on the unit space, contradicting disjointness")
    u = candidates[0]
    K, w = compress(f, u)
    closure = closure if closure is not None else ideal_closure([g])
    certificate = {
        "lemma1": lemma1,
        "nonzero": bool(w),
        "isotropy_support": _supported_in_isotropy(w),
        "in_ideal": closure.contains(w),
    }
    return WitnessReport(g, dec, d0, f, u, K, w, certificate)


def graded_epsilon_witness(g: AlgElem, grading: Grading) -> AlgElem:
    """``f = ~1_{B^-1} * g`` for the least-id singleton ``B`` of ``supp(g)``, over ``Sigma_eps``."""
    if not g:
        raise ZeroInput("graded_epsilon_witness needs a nonzero element")
    if grading.degree_of(g) is None:
        raise NotHomogeneous(f"{format_elem(g)} is not homogeneous")
    S = g.section
    tw = S.twist
    a0 = min(g.coeffs)
    B_inv = [tw.total.inv[S[a0]]]
    f = indicator_tilde(S, B_inv) * g
    G = tw.base
    if not f or not set(f.coeffs) <= grading.epsilon or not any(a in G.units for a in f.coeffs):
        raise AssertionError("graded lemma postcondition failed")
    return epsilon_restrict(f, grading)


@dataclass(frozen=True, eq=False)
class Verdict:
    injective: bool
    witness: AlgElem | None = None
    method: str = ""
    detail: str = ""
    closure_size: int | None = None
    report: WitnessReport | None = field(default=None, repr=False)

    def __str__(self) -> str:
        if self.injective:
            return "Injective"
        return f"NotInjective(witness={format_elem(self.witness)})" if self.witness is not None else "NotInjective"


def _kernel_element(pi: QuotientHom) -> AlgElem:
    """The first nonzero generator, so witnesses trace back to the user's input."""
    return next((g for g in pi.generators if g), None) or pi.elements()[0]


def gut_check(pi: QuotientHom) -> Verdict:
    if pi.is_zero:
        return Verdict(True, method="gut", detail="kernel is zero")
    g = _kernel_element(pi)
    report = isotropy_witness(g, closure=ideal_closure([g]))
    w = report.witness
    if not (report.ok and pi.contains(w)):
        raise AssertionError("isotropy witness failed its certificate")
    return Verdict(False, w, "gut", "nonzero kernel element supported in Iso(Sigma)°", report=report)


def _unit_indicator_search(pi: QuotientHom, units: Sequence[int], method: str) -> Verdict:
    if len(units) > MAX_SUBSET_UNITS:
        raise TooLarge(f"{len(units)} units exceed the subset search limit of {MAX_SUBSET_UNITS}")
    n = pi.modulus
    for k in range(1, len(units) + 1):
        for W in combinations(units, k):
            one_W = indicator(pi.section, W)
            for r in range(1, n):
                v = one_W.scale(r)
                if pi.contains(v):
                    labels = pi.twist.base.lab(list(W))
                    return Verdict(False, v, method, f"{r}*1_W in the kernel for W = {labels}")
    return Verdict(True, method=method, detail="no r*1_W in the kernel")


def ck_check(pi: QuotientHom) -> Verdict:
    """Injective iff no ``r ~1_W`` (W nonempty in the unit space, r != 0) is killed."""
    G = pi.twist.base
    if not is_effective(G):
        raise NotEffective("the base groupoid is not effective")
    return _unit_indicator_search(pi, G.sorted_units, "ck")


def _check_homogeneous(pi: QuotientHom, grading: Grading) -> None:
    if not (grading.twist is pi.twist or grading.twist == pi.twist):
        raise TwistMismatch("grading is over a different twist")
    for g in pi.generators:
        if g and grading.degree_of(g) is None:
            raise NotHomogeneousGenerators(f"{format_elem(g)} is not homogeneous")


def graded_check(pi: QuotientHom, grading: Grading, mode: str = "general") -> Verdict:
    """Graded uniqueness test for the quotient by a graded ideal.

    ``general``: injective iff no nonzero kernel element is supported in
    ``Iso(G_eps)°``.  ``epsilon-effective``: needs ``G_eps`` effective and
    tests ``r ~1_K`` over the unit space.
    """
    _check_homogeneous(pi, grading)
    tw = pi.twist
    G = tw.base
    if mode == "epsilon-effective":
        if not is_effective(grading.epsilon_twist.base):
            raise NotEffectiveEpsilon("G_eps is not effective")
        return _unit_indicator_search(pi, G.sorted_units, "graded-epsilon-effective")
    if mode != "general":
        raise ValueError(f"unknown mode {mode!r}")
    J = sorted(a for a in grading.epsilon if G.rmap[a] == G.smap[a])
    meet = intersect_coordinates(pi.basis, pi.modulus, pi.width, J)
    if pi.is_zero:
        if meet:
            raise AssertionError("nonzero intersection inside a zero ideal")
        return Verdict(True, method="graded", detail="kernel is zero")
    witness = _graded_witness(pi, grading)
    if not meet or not set(witness.coeffs) <= set(J) or not pi.contains(witness):
        raise AssertionError("graded witness does not lie in the isotropy intersection")
    return Verdict(False, witness, "graded", "nonzero kernel element supported in Iso(G_eps)°")


def _graded_witness(pi: QuotientHom, grading: Grading) -> AlgElem:
    """Homogeneous component, then the epsilon lemma, then the isotropy witness on ``G_eps``."""
    g = _kernel_element(pi)
    for _, part in homogeneous_decompose(g, grading).items():
        if not pi.contains(part):
            raise AssertionError("kernel is not graded")
    g_gamma = next(iter(homogeneous_decompose(g, grading).values()))
    f = graded_epsilon_witness(g_gamma, grading)
    report = isotropy_witness(f)
    if not report.ok:
        raise AssertionError("epsilon isotropy witness failed its certificate")
    return include(report.witness, pi.section)


def brute_force_injectivity(pi: QuotientHom) -> Verdict:
    """Independent oracle: enumerate the ideal element by element, no Howell form."""
    n, width = pi.modulus, pi.width
    if n**width > MAX_ENUMERATION:
        raise TooLarge(f"{n}^{width} coordinate vectors exceed {MAX_ENUMERATION}")
    S = pi.section
    zero_vec = (0,) * width
    span = {zero_vec}
    spanning: list[tuple[int, ...]] = []

    def add(vec: tuple[int, ...]) -> bool:
        nonlocal span
        if vec in span:
            return False
        span = {tuple((s + k * v) % n for s, v in zip(base, vec)) for base in span for k in range(n)}
        spanning.append(vec)
        return True

    for g in pi.generators:
        add(g.vector())
    singles = [AlgElem(S, {a: 1}) for a in pi.twist.base.elements]
    i = 0
    while i < len(spanning):
        x = from_vector(S, spanning[i])
        for e in singles:
            add(convolve(e, x).vector())
            add(convolve(x, e).vector())
        i += 1
    size = len(span)
    if size == 1:
        return Verdict(True, method="brute", detail="ideal is zero", closure_size=1)
    least = min(v for v in span if any(v))
    return Verdict(False, from_vector(S, least), "brute", f"ideal has {size} elements", closure_size=size)
