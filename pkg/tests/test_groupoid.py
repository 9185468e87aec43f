from __future__ import annotations

import itertools

import pytest

from twisted_steinberg.errors import AxiomViolation, NotABisection, NotASubgroupoid
from twisted_steinberg.groupoid import (
    Bisection,
    bundle,
    compose_bisections,
    cyclic_group,
    full2,
    group_groupoid,
    groupoid_violation,
    invert_bisection,
    is_bisection,
    is_effective,
    isotropy,
    isotropy_interior,
    pair_groupoid,
    relabel,
    restrict,
    small_groupoids,
    transformation_groupoid,
    validate_groupoid,
    z2grp,
)


def ids(G, *labels):
    return frozenset(G.id_of(x) for x in labels)


def full2_tables():
    pts = ["1", "2"]
    lab = {(i, j): f"({i},{j})" for i in pts for j in pts}
    elements = [lab[i, j] for i in pts for j in pts]
    inverse = {lab[i, j]: lab[j, i] for i in pts for j in pts}
    comp = {(lab[i, j], lab[j, k]): lab[i, k] for i in pts for j in pts for k in pts}
    return elements, inverse, comp, [lab["1", "1"], lab["2", "2"]]


def test_z2grp_is_valid():
    G = z2grp()
    assert G.labels == ("u", "g")
    assert G.units == ids(G, "u")
    assert G.compose(G.id_of("g"), G.id_of("g")) == G.id_of("u")


def test_full2_is_valid():
    G = full2()
    assert G.labels == ("(1,1)", "(1,2)", "(2,1)", "(2,2)")
    assert G.units == ids(G, "(1,1)", "(2,2)")


def test_full2_rewired_composition_is_rejected():
    elements, inverse, comp, units = full2_tables()
    comp[("(1,2)", "(2,1)")] = "(2,2)"
    with pytest.raises(AxiomViolation):
        validate_groupoid(elements, inverse, comp, units)


@pytest.mark.parametrize("mutation", ["drop-pair", "bad-inverse", "extra-unit", "non-associative"])
def test_mutations_are_caught(mutation):
    elements, inverse, comp, units = full2_tables()
    if mutation == "drop-pair":
        del comp[("(1,1)", "(1,2)")]
    elif mutation == "bad-inverse":
        inverse["(1,2)"] = "(1,2)"
    elif mutation == "extra-unit":
        units = units + ["(1,2)"]
    else:
        G = group_groupoid(*cyclic_group(3))
        bad = dict(G.comp)
        bad[(1, 1)] = 0
        from twisted_steinberg.groupoid import FiniteGroupoid

        H = FiniteGroupoid(G.labels, G.inv, bad, G.units, G.rmap, G.smap)
        assert groupoid_violation(H) is not None
        return
    with pytest.raises(AxiomViolation):
        validate_groupoid(elements, inverse, comp, units)


@pytest.mark.parametrize(
    "builder, iso, effective",
    [
        (z2grp, ("u", "g"), False),
        (full2, ("(1,1)", "(2,2)"), True),
        (bundle, ("a", "b", "g_a", "g_b"), False),
    ],
)
def test_isotropy_examples(builder, iso, effective):
    G = builder()
    assert isotropy(G) == ids(G, *iso)
    assert isotropy_interior(G) == isotropy(G)
    assert is_effective(G) is effective


def test_bisection_examples():
    F, Z, B = full2(), z2grp(), bundle()
    b = lambda G, *xs: Bisection(G, ids(G, *xs))  # noqa: E731
    assert compose_bisections(b(F, "(1,2)"), b(F, "(2,1)")).members == ids(F, "(1,1)")
    assert compose_bisections(b(Z, "g"), b(Z, "g")).members == ids(Z, "u")
    assert compose_bisections(b(F, "(1,2)"), b(F, "(1,2)")).members == frozenset()
    assert invert_bisection(b(F, "(1,2)")).members == ids(F, "(2,1)")
    assert invert_bisection(b(Z, "g")).members == ids(Z, "g")
    assert invert_bisection(b(B, "g_a", "g_b")).members == ids(B, "g_a", "g_b")
    with pytest.raises(NotABisection):
        b(F, "(1,1)", "(1,2)")


def test_restrict_examples():
    B, F = bundle(), full2()
    H = restrict(B, ids(B, "a", "b", "g_a"))
    assert len(H) == 3
    assert H.parent is B
    U = restrict(F, F.units)
    assert len(U) == 2 and U.units == frozenset(U.elements)
    with pytest.raises(NotASubgroupoid):
        restrict(F, ids(F, "(1,1)", "(1,2)"))


def bisections(G):
    out = []
    for k in range(len(G) + 1):
        for subset in itertools.combinations(G.elements, k):
            if is_bisection(G, subset):
                out.append(Bisection(G, frozenset(subset)))
    return out


def six_element_groupoids():
    swap = {"e": {"1": "1", "2": "2", "3": "3"}, "s": {"1": "2", "2": "1", "3": "3"}}
    labels, mul = cyclic_group(2, "e", "s")
    return [
        group_groupoid(*cyclic_group(6)),
        transformation_groupoid(["1", "2", "3"], labels, mul, lambda h, x: swap[h][x]),
    ]


@pytest.mark.parametrize("G", [g for _, g in small_groupoids()] + six_element_groupoids())
def test_bisection_algebra_exhaustive(G):
    bis = bisections(G)
    for X, Y in itertools.product(bis, repeat=2):
        XY = compose_bisections(X, Y)
        assert invert_bisection(XY).members == compose_bisections(invert_bisection(Y), invert_bisection(X)).members
    for X, Y, Z in itertools.product(bis, repeat=3):
        left = compose_bisections(compose_bisections(X, Y), Z)
        right = compose_bisections(X, compose_bisections(Y, Z))
        assert left.members == right.members


@pytest.mark.parametrize("name, G", small_groupoids())
def test_isotropy_restriction_is_a_bundle(name, G):
    H = restrict(G, isotropy(G))
    assert all(H.rmap[g] == H.smap[g] for g in H.elements)
    assert is_effective(G) == (isotropy(G) == G.units)


def _isomorphic(G, H) -> bool:
    if len(G) != len(H) or len(G.units) != len(H.units):
        return False
    for perm in itertools.permutations(range(len(G))):
        try:
            if relabel(G, perm).comp == H.comp and relabel(G, perm).inv == H.inv:
                return True
        except AxiomViolation:
            continue
    return False


def test_small_groupoid_catalogue():
    cat = small_groupoids()
    assert len(cat) == 13
    assert [len(G) for _, G in cat].count(4) == 7
    for (_, G), (_, H) in itertools.combinations(cat, 2):
        assert not _isomorphic(G, H)
    for _, G in cat:
        assert groupoid_violation(G) is None


def test_pair_groupoid_labels():
    G = pair_groupoid(["x", "y", "z"])
    assert len(G) == 9 and is_effective(G)
