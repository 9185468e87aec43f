from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twisted_steinberg.algebra import (
    AlgElem,
    convolve,
    convolve_sigma,
    cocycle_iso,
    cocycle_iso_inverse,
    disjoint_decomposition,
    element,
    from_vector,
    identity,
    include,
    indicator,
    indicator_tilde,
    restrict_element,
    support_G,
    zero,
)
from twisted_steinberg.coeffring import CoeffRing
from twisted_steinberg.errors import (
    BaseMismatch,
    FibreCollision,
    NotABisection,
    NotASubgroupoid,
    TwistMismatch,
)
from twisted_steinberg.groupoid import full2, is_bisection, small_groupoids, z2grp
from twisted_steinberg.twist import (
    random_cocycle,
    restrict_twist,
    rx_act,
    section_from_table,
    trivial_cocycle,
    trivial_twist,
)

PRIMES = (2, 3, 5)


def sid(tw, label, t):
    G, R = tw.base, tw.ring
    return G.id_of(label) * len(R.units) + R.unit_index[t]


def sigma_convolve_oracle(f: AlgElem, g: AlgElem) -> tuple[int, ...]:
    """Convolution of functions on Sigma summing over the whole range fibre.

    Each ``alpha`` is counted once per unit, so the sum is divided by ``|R^x|``,
    which is invertible for prime moduli.
    """
    tw = f.twist
    Sig, n = tw.total, tw.ring.modulus
    fv, gv = f.function(), g.function()
    k_inv = pow(len(tw.ring.units), -1, n)
    out = []
    for e in Sig.elements:
        total = 0
        for x in Sig.elements:
            if Sig.rmap[x] == Sig.rmap[e]:
                total += fv[x] * gv[Sig.comp[(Sig.inv[x], e)]]
        out.append(total * k_inv % n)
    return tuple(out)


def twisted_scenarios():
    rng = random.Random(11)
    out = []
    for name, G in small_groupoids():
        for n in PRIMES:
            out.append((f"{name}/Z{n}", random_cocycle(G, CoeffRing(n), rng)))
    return out


SCENARIOS = twisted_scenarios()


@st.composite
def scenario_and_elements(draw, count=2):
    name, sigma = draw(st.sampled_from(SCENARIOS))
    tw = sigma.extension
    n, width = tw.ring.modulus, len(tw.base)
    vecs = [draw(st.lists(st.integers(0, n - 1), min_size=width, max_size=width)) for _ in range(count)]
    return sigma, [from_vector(tw.section, v) for v in vecs]


# examples


def test_indicator_tilde_examples(full2_z3, z2grp_twisted):
    tw = full2_z3
    f = indicator_tilde(tw, [tw.section[tw.base.id_of("(1,2)")]])
    assert f.coeffs == {tw.base.id_of("(1,2)"): 1}
    ext = z2grp_twisted.extension
    h = indicator_tilde(ext, [sid(ext, "g", 2)])
    assert h.coeffs == {ext.base.id_of("g"): 2}
    assert indicator_tilde(ext, ext.total.units) == identity(ext)


def test_indicator_tilde_errors(full2_z3, z2grp_twisted):
    ext = z2grp_twisted.extension
    with pytest.raises(FibreCollision):
        indicator_tilde(ext, [sid(ext, "u", 1), sid(ext, "u", 2)])
    tw = full2_z3
    with pytest.raises(NotABisection):
        indicator_tilde(tw, [sid(tw, "(1,1)", 1), sid(tw, "(1,2)", 1)])
    with pytest.raises(NotABisection):
        indicator(tw, ["(1,1)", "(2,1)", "(1,2)"])


def test_convolve_examples(z2grp_twisted):
    tw = trivial_twist(full2(), CoeffRing(5))
    assert indicator(tw, ["(1,2)"]) * indicator(tw, ["(2,1)"]) == indicator(tw, ["(1,1)"])
    ext = z2grp_twisted.extension
    sg = indicator(ext, ["g"])
    assert sg * sg == identity(ext).scale(2)
    f = element(ext, {"u": 1, "g": 2})
    assert f * identity(ext) == f and identity(ext) * f == f


def test_convolve_rejects_mixed_twists(full2_z3, z2grp_z3):
    with pytest.raises(TwistMismatch):
        identity(full2_z3) * identity(z2grp_z3)


def test_convolve_sigma_examples(z2grp_twisted, z2grp_z3):
    sigma = z2grp_twisted
    one_g, one_u = element(z2grp_z3, {"g": 1}), element(z2grp_z3, {"u": 1})
    assert convolve_sigma(one_g, one_g, sigma) == one_u.scale(2)
    f = element(z2grp_z3, {"u": 2, "g": 1})
    assert convolve_sigma(one_u, f, sigma) == f
    with pytest.raises(BaseMismatch):
        convolve_sigma(cocycle_iso(one_g, sigma), one_g, sigma)


def test_cocycle_iso_examples(z2grp_twisted, z2grp_z3):
    sigma = z2grp_twisted
    ext = sigma.extension
    one_g = element(z2grp_z3, {"g": 1})
    assert cocycle_iso(one_g, sigma) == indicator_tilde(ext, [sid(ext, "g", 1)])
    lhs = cocycle_iso(convolve_sigma(one_g, one_g, sigma), sigma)
    rhs = cocycle_iso(one_g, sigma) * cocycle_iso(one_g, sigma)
    assert lhs == rhs == identity(ext).scale(2)
    triv = trivial_twist(z2grp(), CoeffRing(3))
    tsig = trivial_cocycle(triv.base, triv.ring)
    f = element(triv, {"u": 1, "g": 2})
    assert cocycle_iso(f, tsig).coeffs == f.coeffs


def test_disjoint_decomposition_examples(full2_z3):
    tw = full2_z3
    f = element(tw, {"(1,2)": 1, "(1,1)": 2})
    d = disjoint_decomposition(f)
    assert len(d.terms) == 2
    assert not d.images[0] & d.images[1]
    assert d.reconstruct() == f
    assert disjoint_decomposition(zero(tw)).terms == ()
    X = frozenset(tw.section[tw.base.id_of(a)] for a in ("(1,2)", "(2,1)"))
    g = indicator_tilde(tw, X).scale(2)
    assert disjoint_decomposition(g).terms == ((2, X),)


def test_support_examples(full2_z3):
    tw = full2_z3
    assert support_G(identity(tw)) == tw.base.units
    assert support_G(zero(tw)) == frozenset()
    assert support_G(indicator(tw, ["(1,2)"])) == {tw.base.id_of("(1,2)")}


def test_include_examples(full2_z3):
    tw = full2_z3
    U = restrict_twist(tw, tw.base.units)
    f = identity(U).scale(2)
    assert include(f) == identity(tw).scale(2)
    assert include(zero(U)) == zero(tw)
    x1, x2 = (element(U, {u: 1}) for u in U.base.units)
    assert include(x1 * x2) == include(x1) * include(x2) == zero(tw)
    assert restrict_element(include(f), U) == f
    with pytest.raises(NotASubgroupoid):
        include(identity(tw))
    with pytest.raises(NotASubgroupoid):
        restrict_element(indicator(tw, ["(1,2)"]), U)


# oracles


@given(scenario_and_elements())
def test_convolve_matches_sigma_oracle(case):
    _, (f, g) = case
    assert convolve(f, g).function() == sigma_convolve_oracle(f, g)


@pytest.mark.parametrize("name, sigma", [s for s in SCENARIOS if s[1].ring.modulus <= 3])
def test_associativity_exhaustive_on_generators(name, sigma):
    tw = sigma.extension
    n = tw.ring.modulus
    gens = [indicator(tw, [a]).scale(r) for a in tw.base.elements for r in range(1, n)]
    for f, g, h in itertools.product(gens, repeat=3):
        assert (f * g) * h == f * (g * h)


@given(scenario_and_elements(count=3))
def test_associativity_random(case):
    _, (f, g, h) = case
    assert (f * g) * h == f * (g * h)


@given(scenario_and_elements(), st.randoms(use_true_random=False))
def test_section_independence(case, rnd):
    sigma, (f, g) = case
    tw = sigma.extension
    units = tw.ring.units
    table = [tw.section[a] if a in tw.base.units else rx_shift(tw, tw.section[a], rnd.choice(units))
             for a in tw.base.elements]
    S2 = section_from_table(tw, table)
    product_other = convolve(f.with_section(S2), g.with_section(S2))
    assert product_other.section is S2
    assert product_other.function() == convolve(f, g).function()


def rx_shift(tw, e, t):
    return rx_act(tw, t, e)


def sigma_bisections(tw, max_size=2):
    Sig = tw.total
    for k in range(1, max_size + 1):
        for X in itertools.combinations(Sig.elements, k):
            image = [tw.qmap[x] for x in X]
            if len(set(image)) == k and is_bisection(Sig, X) and is_bisection(tw.base, image):
                yield X


@pytest.mark.parametrize("name, sigma", [s for s in SCENARIOS if s[1].ring.modulus == 3][:6])
def test_indicator_products_exhaustive(name, sigma):
    tw = sigma.extension
    Sig = tw.total
    bis = list(sigma_bisections(tw))
    for X in bis:
        for Y in bis:
            XY = {Sig.comp[(x, y)] for x in X for y in Y if (x, y) in Sig.comp}
            image = [tw.qmap[z] for z in XY]
            if not XY or len(set(image)) != len(XY) or not is_bisection(Sig, XY) or not is_bisection(tw.base, image):
                continue
            assert indicator_tilde(tw, X) * indicator_tilde(tw, Y) == indicator_tilde(tw, XY)


@given(scenario_and_elements())
def test_cocycle_iso_is_an_isomorphism(case):
    sigma, (f, g) = case
    base_tw = trivial_twist(sigma.base, sigma.ring)
    f0 = from_vector(base_tw.section, f.vector())
    g0 = from_vector(base_tw.section, g.vector())
    assert cocycle_iso(convolve_sigma(f0, g0, sigma), sigma) == cocycle_iso(f0, sigma) * cocycle_iso(g0, sigma)
    assert cocycle_iso(f0 + g0, sigma) == cocycle_iso(f0, sigma) + cocycle_iso(g0, sigma)
    assert cocycle_iso_inverse(cocycle_iso(f0, sigma), sigma, base_tw) == f0


@given(scenario_and_elements(count=1))
def test_reconstruction(case):
    _, (f,) = case
    d = disjoint_decomposition(f)
    assert d.reconstruct() == f
    for i, j in itertools.combinations(range(len(d.images)), 2):
        assert not d.images[i] & d.images[j]
    for _, X in d.terms:
        assert is_bisection(f.twist.total, X)


def test_trivial_sigma_reduces_to_untwisted_convolution():
    rng = random.Random(3)
    for _, G in small_groupoids():
        tw = trivial_twist(G, CoeffRing(3))
        sigma = trivial_cocycle(G, tw.ring)
        for _ in range(5):
            f = from_vector(tw.section, [rng.randrange(3) for _ in G.elements])
            g = from_vector(tw.section, [rng.randrange(3) for _ in G.elements])
            assert convolve_sigma(f, g, sigma) == f * g


def test_include_is_multiplicative_on_unit_groupoids():
    rng = random.Random(9)
    for _, G in small_groupoids():
        tw = random_cocycle(G, CoeffRing(5), rng).extension
        U = restrict_twist(tw, G.units)
        for _ in range(5):
            f = from_vector(U.section, [rng.randrange(5) for _ in U.base.elements])
            g = from_vector(U.section, [rng.randrange(5) for _ in U.base.elements])
            assert include(f * g) == include(f) * include(g)
            assert (include(f) == zero(tw)) == (not f)
