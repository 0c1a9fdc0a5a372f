import pytest
from hypothesis import settings

from runge_modular.congruence import borel, curve_invariants, full_gl2
from runge_modular.modform_space import build_basis

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def b4():
    G = borel(4)
    curve = curve_invariants(G)
    return G, curve, build_basis(12, G, curve)


@pytest.fixture(scope="session")
def gl3():
    G = full_gl2(3)
    curve = curve_invariants(G)
    return G, curve, build_basis(12, G, curve)
