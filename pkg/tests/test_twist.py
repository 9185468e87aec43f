from __future__ import annotations

import dataclasses
import random

import pytest

from twisted_steinberg.coeffring import CoeffRing
from twisted_steinberg.errors import (
    CocycleIdentityFail,
    NormalizationFail,
    NotASubgroupoid,
    NotAUnit,
)
from twisted_steinberg.groupoid import (
    bundle,
    cyclic_group,
    full2,
    group_groupoid,
    groupoid_from_ids,
    isotropy_interior,
    relabel,
    small_groupoids,
    z2grp,
)
from twisted_steinberg.twist import (
    DiscreteTwist,
    canonical_section,
    coboundary,
    cocycle_from_entries,
    cocycle_from_section,
    fibre_isomorphism,
    isotropy_interior_twist,
    random_cocycle,
    restrict_twist,
    rx_act,
    section_from_table,
    trivial_cocycle,
    trivial_twist,
    twist_from_cocycle,
    validate_cocycle,
    validate_twist,
)


def brute_cocycle_ok(sigma) -> bool:
    """Independent check of normalization and the cocycle identity from the raw tables."""
    G, n = sigma.base, sigma.ring.modulus
    comp = G.comp
    for (a, b), v in sigma.table.items():
        if a in G.units or b in G.units:
            if v != 1:
                return False
    for (a, b), ab in comp.items():
        for (b2, c), bc in comp.items():
            if b2 == b and (sigma.table[(a, b)] * sigma.table[(ab, c)] - sigma.table[(b, c)] * sigma.table[(a, bc)]) % n:
                return False
    return True


def sigma_id(tw, a_label, t):
    """Id of (a, t) in an extension model."""
    G, ring = tw.base, tw.ring
    return G.id_of(a_label) * len(ring.units) + ring.unit_index[t]


def test_validate_cocycle_examples():
    G, R = z2grp(), CoeffRing(3)
    sigma = cocycle_from_entries(G, R, {("g", "g"): 2})
    assert sigma(G.id_of("g"), G.id_of("g")) == 2
    with pytest.raises(NotAUnit):
        cocycle_from_entries(G, R, {("g", "g"): 0})
    assert validate_cocycle(full2(), R, {p: 1 for p in full2().comp}).is_trivial()


def test_normalization_and_identity_failures():
    G, R = z2grp(), CoeffRing(3)
    with pytest.raises(NormalizationFail):
        cocycle_from_entries(G, R, {("u", "g"): 2})
    Z3 = group_groupoid(*cyclic_group(3))
    with pytest.raises(CocycleIdentityFail):
        cocycle_from_entries(Z3, R, {("g", "g"): 2})


def test_twist_from_cocycle_z2grp():
    R = CoeffRing(3)
    tw = twist_from_cocycle(cocycle_from_entries(z2grp(), R, {("g", "g"): 2}))
    S = tw.total
    assert len(S) == 4
    g1 = sigma_id(tw, "g", 1)
    assert S.comp[(g1, g1)] == sigma_id(tw, "u", 2)
    # cyclic of order 4 generated by (g,1)
    powers, x = [], S.sorted_units[0]
    for _ in range(4):
        x = S.comp[(x, g1)]
        powers.append(x)
    assert sorted(powers) == list(S.elements)
    assert validate_twist(tw).ok


def test_trivial_twists():
    F = trivial_twist(full2(), CoeffRing(3))
    assert len(F.total) == 8 and validate_twist(F).ok
    Z = trivial_twist(z2grp(), CoeffRing(2))
    assert len(Z.total) == 2 and Z.total.comp == Z.base.comp


def test_mutation_swapping_fibres_breaks_dt1():
    tw = trivial_twist(full2(), CoeffRing(3))
    x1, x2 = tw.base.sorted_units
    imap = dict(tw.imap)
    for t in tw.ring.units:
        imap[(x1, t)], imap[(x2, t)] = tw.imap[(x2, t)], tw.imap[(x1, t)]
    bad = dataclasses.replace(tw, imap=imap)
    report = validate_twist(bad)
    assert report["GROUPOID"].ok and report["HOM"].ok
    assert not report["DT1"].ok and report["DT1"].witness


def test_mutation_of_composition_is_caught():
    tw = cocycle_from_entries(z2grp(), CoeffRing(3), {("g", "g"): 2}).extension
    S = tw.total
    comp = dict(S.comp)
    g1 = sigma_id(tw, "g", 1)
    comp[(g1, g1)] = sigma_id(tw, "u", 1)
    bad_total = dataclasses.replace(S, comp=comp)
    report = validate_twist(dataclasses.replace(tw, total=bad_total))
    assert not report.ok
    assert report.first_failure().name in {"GROUPOID", "HOM", "DT2"}


def test_rx_act_examples():
    tw = cocycle_from_entries(z2grp(), CoeffRing(3), {("g", "g"): 2}).extension
    g1, g2 = sigma_id(tw, "g", 1), sigma_id(tw, "g", 2)
    assert rx_act(tw, 2, g1) == g2
    assert rx_act(tw, 1, g1) == g1
    assert rx_act(tw, 2, rx_act(tw, 2, g1)) == g1
    with pytest.raises(NotAUnit):
        rx_act(tw, 0, g1)


def z4_over_z2grp():
    """Z/4 = {0,1,2,3} as an explicit twist of Z/2 by Z/3^x, with ids scrambled."""
    Z4 = group_groupoid(*cyclic_group(4))
    perm = [2, 0, 3, 1]
    total = relabel(Z4, perm)
    G = z2grp()
    u, g = G.id_of("u"), G.id_of("g")
    imap = {(u, 1): perm[0], (u, 2): perm[2]}
    qmap = [0] * 4
    for k in range(4):
        qmap[perm[k]] = u if k % 2 == 0 else g
    return DiscreteTwist(G, total, CoeffRing(3), imap, tuple(qmap))


def test_explicit_twist_section_and_cocycle():
    tw = z4_over_z2grp()
    assert validate_twist(tw).ok
    S = canonical_section(tw)
    assert all(tw.qmap[S[a]] == a for a in tw.base.elements)
    sigma = cocycle_from_section(tw, S)
    g = tw.base.id_of("g")
    assert sigma(g, g) == 2
    fibre_isomorphism(sigma.extension, tw, S)


def test_cocycle_round_trip_examples():
    R = CoeffRing(3)
    sigma = cocycle_from_entries(z2grp(), R, {("g", "g"): 2})
    tw = sigma.extension
    assert canonical_section(tw).table == tuple(sigma_id(tw, a, 1) for a in ("u", "g"))
    assert cocycle_from_section(tw, canonical_section(tw)).table == sigma.table
    triv = trivial_twist(z2grp(), R)
    assert cocycle_from_section(triv, triv.section).is_trivial()
    # S'(g) = (g, 2): S'(g)^2 = (u, 2*2*2) = i(u, 2)
    S2 = section_from_table(tw, [sigma_id(tw, "u", 1), sigma_id(tw, "g", 2)])
    sigma2 = cocycle_from_section(tw, S2)
    assert sigma2(1, 1) == 2
    fibre_isomorphism(sigma2.extension, tw, S2)


def test_restrict_twist_examples():
    R = CoeffRing(3)
    F = trivial_twist(full2(), R)
    U = restrict_twist(F, F.base.units)
    assert len(U.base) == 2 and len(U.total) == 4
    assert U.total.units == frozenset(U.total.elements) - {U.imap[(x, 2)] for x in U.base.units}
    B = trivial_twist(bundle(), R)
    whole = restrict_twist(B, B.base.elements)
    assert len(whole.total) == len(B.total)
    iso = isotropy_interior_twist(F)
    assert sorted(iso.total_embedding) == sorted(F.preimage(F.base.units))
    with pytest.raises(NotASubgroupoid):
        restrict_twist(F, [F.base.id_of("(1,2)")])


def scenarios(n_random=3):
    rng = random.Random(2024)
    for name, G in small_groupoids():
        for n in (2, 3, 5):
            R = CoeffRing(n)
            yield f"{name}/Z{n}/trivial", trivial_cocycle(G, R)
            for k in range(n_random):
                yield f"{name}/Z{n}/random{k}", random_cocycle(G, R, rng)


@pytest.mark.parametrize("name, sigma", list(scenarios()))
def test_twist_properties(name, sigma):
    assert brute_cocycle_ok(sigma)
    tw = sigma.extension
    assert validate_twist(tw).ok
    G, S = tw.base, tw.total
    assert len(S) == len(G) * len(tw.ring.units)
    # exact round trip through the canonical section
    assert cocycle_from_section(tw, canonical_section(tw)).table == sigma.table
    # isotropy interiors correspond
    assert frozenset(tw.qmap[e] for e in isotropy_interior(S)) == isotropy_interior(G)
    assert tw.preimage(isotropy_interior(G)) == isotropy_interior(S)
    # free action, central on both sides
    for e in S.elements:
        for t in tw.ring.units:
            te = rx_act(tw, t, e)
            assert (te == e) == (t == 1)
            right = S.comp[(e, tw.imap[(tw.base_unit_of_source(e), t)])]
            assert te == right


def test_coboundaries_are_cohomologous_to_trivial():
    R = CoeffRing(5)
    G = group_groupoid(*cyclic_group(4))
    sigma = coboundary(G, R, {1: 2, 2: 3, 3: 4})
    tw = sigma.extension
    triv = trivial_twist(G, R)
    # S(a) = (a, b(a)^-1) turns the twist back into the trivial one
    b = {0: 1, 1: 2, 2: 3, 3: 4}
    table = [tw.total.index[f"({G.labels[a]},{R.inv(b[a])})"] for a in G.elements]
    S = section_from_table(tw, table)
    assert cocycle_from_section(tw, S).is_trivial()
    fibre_isomorphism(triv, tw, S)


def test_random_cocycles_are_valid_on_every_small_groupoid():
    rng = random.Random(5)
    for _, G in small_groupoids():
        sigma = random_cocycle(G, CoeffRing(5), rng)
        assert brute_cocycle_ok(sigma)


def test_groupoid_from_ids_round_trip():
    tw = trivial_twist(full2(), CoeffRing(3))
    S = tw.total
    again = groupoid_from_ids(S.labels, S.inv, S.comp, S.units)
    assert again == S
