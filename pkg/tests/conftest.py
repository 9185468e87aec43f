from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from twisted_steinberg.coeffring import CoeffRing
from twisted_steinberg.groupoid import bundle, full2, z2grp
from twisted_steinberg.twist import cocycle_from_entries, trivial_twist

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def Z3():
    return CoeffRing(3)


@pytest.fixture
def full2_z3(Z3):
    return trivial_twist(full2(), Z3)


@pytest.fixture
def z2grp_z3(Z3):
    return trivial_twist(z2grp(), Z3)


@pytest.fixture
def z2grp_twisted(Z3):
    """Z/2 over Z/3 with sigma(g, g) = 2."""
    return cocycle_from_entries(z2grp(), Z3, {("g", "g"): 2})


@pytest.fixture
def bundle_z3(Z3):
    return trivial_twist(bundle(), Z3)
