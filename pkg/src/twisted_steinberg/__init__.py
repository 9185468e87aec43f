"""Exact computation in twisted Steinberg algebras of finite groupoids and
boundary-path groupoids of finite graphs, over coefficient rings Z/n."""

from __future__ import annotations

from .algebra import (
    AlgElem,
    convolve,
    convolve_sigma,
    cocycle_iso,
    cocycle_iso_inverse,
    disjoint_decomposition,
    element,
    format_elem,
    identity,
    include,
    indicator,
    indicator_tilde,
    restrict_element,
    zero,
)
from .coeffring import CoeffRing, RingElem, is_unit, unit_inverse, units_of
from .errors import *  # noqa: F403
from .graded import AbelianGroup, Grading, epsilon_restrict, homogeneous_decompose, validate_grading
from .graphwork import (
    BPAlgElem,
    Cylinder,
    Graph,
    Path,
    condition_L,
    conv_bp,
    equals_bp,
    graded_witness_bp,
    iso_interior_member,
    refine_cylinder,
    x_dense_check,
)
from .groupoid import (
    Bisection,
    FiniteGroupoid,
    bundle,
    full2,
    is_bisection,
    is_effective,
    isotropy,
    isotropy_interior,
    restrict,
    small_groupoids,
    validate_groupoid,
    z2grp,
)
from .twist import (
    Cocycle2,
    DiscreteTwist,
    Section,
    canonical_section,
    cocycle_from_entries,
    isotropy_interior_twist,
    random_cocycle,
    restrict_twist,
    trivial_twist,
    twist_from_cocycle,
    validate_cocycle,
    validate_twist,
)
from .uniqueness import (
    QuotientHom,
    Verdict,
    WitnessReport,
    brute_force_injectivity,
    ck_check,
    compress,
    compute_X_sigma,
    graded_check,
    graded_epsilon_witness,
    gut_check,
    ideal_closure,
    isotropy_witness,
    lemma1_assert,
)

__version__ = "0.1.0"
